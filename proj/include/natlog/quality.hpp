#pragma once

// Fluency gate: masked-LM pseudo-perplexity and top-k selection.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "natlog/adapters.hpp"
#include "natlog/error.hpp"
#include "natlog/text.hpp"

namespace natlog {

inline constexpr double kProbabilityFloor = 1e-10;
inline constexpr std::size_t kDefaultCandidateCap = 100;

/// exp(-(1/n) sum_i log p_i) over the whitespace words of `sentence`, each
/// p_i scored with word i masked. Zero probabilities are floored.
inline double pseudo_perplexity(std::string_view sentence, LmAdapter& lm) {
  const std::size_t n = text::split_ws(sentence).size();
  if (n == 0) throw InputError("pseudo_perplexity: empty sentence");
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double lp = lm.token_logprob(sentence, i);
    if (std::isnan(lp) || lp > 1e-9)
      throw ProtocolError("pseudo_perplexity: log probability " + std::to_string(lp) + " is not a log probability");
    if (lp < std::log(kProbabilityFloor)) {
      warn("pseudo_perplexity: probability below floor at word " + std::to_string(i) + " of \"" +
           std::string(sentence) + "\"");
      lp = std::log(kProbabilityFloor);
    }
    sum += lp;
  }
  return std::exp(-sum / static_cast<double>(n));
}

template <typename T>
struct Scored {
  T item;
  double pppl = 0;
};

/// Ascending by pppl, ties in input order, at most `cap` items.
template <typename T>
std::vector<Scored<T>> rank_and_filter(std::vector<Scored<T>> items, std::size_t cap = kDefaultCandidateCap) {
  if (cap < 1) throw InputError("rank_and_filter: cap must be at least 1");
  for (const auto& s : items)
    if (!(s.pppl > 0) || !std::isfinite(s.pppl))
      throw InvariantError("rank_and_filter: pseudo-perplexity must be positive and finite");
  std::stable_sort(items.begin(), items.end(),
                   [](const Scored<T>& a, const Scored<T>& b) { return a.pppl < b.pppl; });
  if (items.size() > cap) items.erase(items.begin() + static_cast<std::ptrdiff_t>(cap), items.end());
  return items;
}

}  // namespace natlog
