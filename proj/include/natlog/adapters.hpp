#pragma once

// Victim-model and masked-LM adapter interfaces, their JSON wire messages,
// and deterministic in-process implementations for offline use.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "natlog/annotation.hpp"
#include "natlog/error.hpp"
#include "natlog/relation.hpp"
#include "natlog/text.hpp"

namespace natlog {

inline constexpr std::string_view kMask = "[MASK]";
inline constexpr double kProbabilityTolerance = 1e-6;

struct VictimPrediction {
  NliLabel label = NliLabel::kNeutral;
  std::array<double, 3> probs{};  // indexed by NliLabel

  double prob(NliLabel l) const { return probs[static_cast<std::size_t>(l)]; }
};

/// Checks the prediction invariants; throws ProtocolError naming the field.
inline void validate(const VictimPrediction& p) {
  double sum = 0;
  for (auto l : kAllLabels) {
    const double v = p.prob(l);
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw ProtocolError("probs." + std::string(to_string(l)) + " must be in [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw ProtocolError("probs must sum to 1 (got " + std::to_string(sum) + ")");
  for (auto l : kAllLabels)
    if (p.prob(l) > p.prob(p.label) + kProbabilityTolerance)
      throw ProtocolError("label must be the argmax of probs");
}

/// Label = argmax, ties resolved in label order (entailment first).
inline VictimPrediction prediction_from_probs(std::array<double, 3> probs) {
  VictimPrediction p;
  p.probs = probs;
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (probs[i] > probs[best]) best = i;
  p.label = kAllLabels[best];
  return p;
}

inline nlohmann::ordered_json to_json(const VictimPrediction& p) {
  nlohmann::ordered_json probs;
  for (auto l : kAllLabels) probs[std::string(to_string(l))] = p.prob(l);
  return {{"label", std::string(to_string(p.label))}, {"probs", probs}};
}

inline VictimPrediction prediction_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ProtocolError("prediction body must be a JSON object");
  if (!j.contains("label") || !j.at("label").is_string())
    throw ProtocolError("field \"label\" missing or not a string");
  auto label = parse_label(j.at("label").get<std::string>());
  if (!label) throw ProtocolError("field \"label\": unknown label " + j.at("label").dump());
  if (!j.contains("probs") || !j.at("probs").is_object())
    throw ProtocolError("field \"probs\" missing or not an object");
  VictimPrediction p;
  p.label = *label;
  for (auto l : kAllLabels) {
    const std::string key(to_string(l));
    if (!j.at("probs").contains(key) || !j.at("probs").at(key).is_number())
      throw ProtocolError("field \"probs." + key + "\" missing or not a number");
    p.probs[static_cast<std::size_t>(l)] = j.at("probs").at(key).get<double>();
  }
  validate(p);
  return p;
}

struct Filler {
  std::string word;
  Pos pos = Pos::kOther;
  double prob = 0;
};

struct MlmResponse {
  std::vector<Filler> fillers;
  std::optional<double> token_logprob;
};

inline void validate(const MlmResponse& r) {
  for (std::size_t i = 0; i < r.fillers.size(); ++i) {
    const auto& f = r.fillers[i];
    if (!(f.prob > 0.0 && f.prob <= 1.0))
      throw ProtocolError("fillers[" + std::to_string(i) + "].prob must be in (0, 1]");
    if (i > 0 && f.prob > r.fillers[i - 1].prob)
      throw ProtocolError("fillers must be sorted by descending prob");
  }
}

inline nlohmann::ordered_json to_json(const MlmResponse& r) {
  nlohmann::ordered_json fillers = nlohmann::ordered_json::array();
  for (const auto& f : r.fillers)
    fillers.push_back({{"word", f.word}, {"pos", std::string(to_string(f.pos))}, {"prob", f.prob}});
  return {{"fillers", fillers}};
}

inline MlmResponse fill_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("fillers") || !j.at("fillers").is_array())
    throw ProtocolError("field \"fillers\" missing or not an array");
  MlmResponse r;
  std::size_t i = 0;
  for (const auto& f : j.at("fillers")) {
    const std::string at = "fillers[" + std::to_string(i++) + "]";
    if (!f.is_object() || !f.contains("word") || !f.at("word").is_string())
      throw ProtocolError("field \"" + at + ".word\" missing or not a string");
    if (!f.contains("pos") || !f.at("pos").is_string() || !parse_pos(f.at("pos").get<std::string>()))
      throw ProtocolError("field \"" + at + ".pos\" missing or not a coarse POS tag");
    if (!f.contains("prob") || !f.at("prob").is_number())
      throw ProtocolError("field \"" + at + ".prob\" missing or not a number");
    r.fillers.push_back({f.at("word").get<std::string>(), *parse_pos(f.at("pos").get<std::string>()),
                         f.at("prob").get<double>()});
  }
  validate(r);
  return r;
}

inline double logprob_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("logprob") || !j.at("logprob").is_number())
    throw ProtocolError("field \"logprob\" missing or not a number");
  const double lp = j.at("logprob").get<double>();
  if (std::isnan(lp) || lp > 0.0) throw ProtocolError("field \"logprob\" must be <= 0");
  return lp;
}

inline std::size_t count_masks(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kMask); pos != std::string_view::npos; pos = text.find(kMask, pos + kMask.size()))
    ++n;
  return n;
}

inline void require_single_mask(std::string_view text) {
  const auto n = count_masks(text);
  if (n != 1)
    throw InputError("mlm_fill: text must contain exactly one " + std::string(kMask) + " marker, found " +
                     std::to_string(n));
}

// ---------------------------------------------------------------------------
// Interfaces
// ---------------------------------------------------------------------------

class VictimAdapter {
 public:
  virtual ~VictimAdapter() = default;
  virtual VictimPrediction predict(std::string_view premise, std::string_view hypothesis) = 0;
  /// Whether predict() may be called from several threads at once.
  virtual bool concurrent_safe() const = 0;
};

class LmAdapter {
 public:
  virtual ~LmAdapter() = default;
  /// Top-k fillers for the single [MASK] in `text`, descending probability.
  virtual MlmResponse fill(std::string_view text, int k) = 0;
  /// Log probability of the whitespace word at `position` with it masked.
  virtual double token_logprob(std::string_view text, std::size_t position) = 0;
  virtual bool concurrent_safe() const = 0;
};

/// Serializes calls through an adapter that does not accept concurrent use.
class SerializedVictim final : public VictimAdapter {
 public:
  explicit SerializedVictim(VictimAdapter& inner) : inner_(inner) {}
  VictimPrediction predict(std::string_view p, std::string_view h) override {
    std::lock_guard lock(mu_);
    return inner_.predict(p, h);
  }
  bool concurrent_safe() const override { return true; }

 private:
  VictimAdapter& inner_;
  std::mutex mu_;
};

class SerializedLm final : public LmAdapter {
 public:
  explicit SerializedLm(LmAdapter& inner) : inner_(inner) {}
  MlmResponse fill(std::string_view text, int k) override {
    std::lock_guard lock(mu_);
    return inner_.fill(text, k);
  }
  double token_logprob(std::string_view text, std::size_t position) override {
    std::lock_guard lock(mu_);
    return inner_.token_logprob(text, position);
  }
  bool concurrent_safe() const override { return true; }

 private:
  LmAdapter& inner_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// Mock victim
// ---------------------------------------------------------------------------

/// Deterministic rule-based NLI classifier, attackable on purpose.
///
/// Let o be the fraction of distinct hypothesis words that occur in the
/// premise, and `flip` whether the total number of negation markers in both
/// sentences is odd. Logits:
///   entailment    = 10 (o - 0.8)
///   neutral       = -10 (o - 0.8)
///   contradiction = flip ? 10 (o - 0.6) : -3
/// plus a seeded jitter in [-0.025, 0.025) derived from an FNV-1a hash of
/// (seed, premise, hypothesis, label). Probabilities are the softmax.
class MockVictim final : public VictimAdapter {
 public:
  explicit MockVictim(std::uint64_t seed = 0) : seed_(seed) {}

  static const std::set<std::string, std::less<>>& negation_markers() {
    static const std::set<std::string, std::less<>> m = {"not",  "n't",     "no",   "never",
                                                         "nobody", "nothing", "none", "false"};
    return m;
  }

  static double overlap(std::string_view premise, std::string_view hypothesis) {
    const auto hw = text::bag_words(split_clitics(hypothesis));
    const std::set<std::string> hset(hw.begin(), hw.end());
    if (hset.empty()) return 0.0;
    const auto pw = text::bag_words(split_clitics(premise));
    const std::set<std::string> pset(pw.begin(), pw.end());
    std::size_t shared = 0;
    for (const auto& w : hset) shared += pset.contains(w) ? 1 : 0;
    return static_cast<double>(shared) / static_cast<double>(hset.size());
  }

  static int negation_count(std::string_view sentence) {
    int n = 0;
    for (const auto& w : text::bag_words(split_clitics(sentence))) n += negation_markers().contains(w) ? 1 : 0;
    return n;
  }

  VictimPrediction predict(std::string_view premise, std::string_view hypothesis) override {
    const double o = overlap(premise, hypothesis);
    const bool flip = (negation_count(premise) + negation_count(hypothesis)) % 2 == 1;
    std::array<double, 3> logits = {10.0 * (o - 0.8), flip ? 10.0 * (o - 0.6) : -3.0,
                                    -10.0 * (o - 0.8)};
    for (std::size_t k = 0; k < 3; ++k) logits[k] += jitter(premise, hypothesis, k);
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::array<double, 3> probs{};
    double z = 0;
    for (std::size_t k = 0; k < 3; ++k) z += (probs[k] = std::exp(logits[k] - mx));
    for (auto& p : probs) p /= z;
    return prediction_from_probs(probs);
  }

  bool concurrent_safe() const override { return true; }

 private:
  static std::string split_clitics(std::string_view s) {
    std::string out;
    for (const auto& t : text::tokenize(s)) out += t + " ";
    return out;
  }

  double jitter(std::string_view p, std::string_view h, std::size_t k) const {
    std::uint64_t x = 1469598103934665603ull;
    auto mix = [&](std::string_view s) {
      for (unsigned char c : s) {
        x ^= c;
        x *= 1099511628211ull;
      }
      x ^= 0xff;
      x *= 1099511628211ull;
    };
    mix(std::string_view(reinterpret_cast<const char*>(&seed_), sizeof seed_));
    mix(p);
    mix(h);
    x ^= k;
    x *= 1099511628211ull;
    const double u = static_cast<double>(x >> 11) / static_cast<double>(1ull << 53);
    return 0.05 * (u - 0.5);
  }

  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Stub language models
// ---------------------------------------------------------------------------

/// Every word in a fixed vocabulary is equally likely: fill() returns the
/// vocabulary with probability 1/V each, token_logprob() is -log V.
class UniformLm final : public LmAdapter {
 public:
  struct Word {
    std::string word;
    Pos pos;
  };

  explicit UniformLm(std::vector<Word> vocab) : vocab_(std::move(vocab)) {
    if (vocab_.empty()) throw InputError("UniformLm: empty vocabulary");
  }

  MlmResponse fill(std::string_view text, int k) override {
    require_single_mask(text);
    MlmResponse r;
    const double p = 1.0 / static_cast<double>(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size() && static_cast<int>(i) < k; ++i)
      r.fillers.push_back({vocab_[i].word, vocab_[i].pos, p});
    return r;
  }

  double token_logprob(std::string_view text, std::size_t position) override {
    const auto n = text::split_ws(text).size();
    if (position >= n)
      throw InputError("token_logprob: position " + std::to_string(position) + " out of range for " +
                       std::to_string(n) + " words");
    return -std::log(static_cast<double>(vocab_.size()));
  }

  bool concurrent_safe() const override { return true; }
  std::size_t vocab_size() const { return vocab_.size(); }

 private:
  std::vector<Word> vocab_;
};

/// Add-one smoothed bigram model used as a masked LM. The probability of
/// word w filling a gap between `left` and `right` is
///   P(w | left) P(right | w) / sum_v P(v | left) P(right | v)
/// over the vocabulary plus <unk>, with <s>/</s> at sentence edges and
///   P(b | a) = (c(a, b) + 1) / (c(a) + |V| + 2).
/// Training lines are whitespace-separated `word/pos` tokens (the tag is
/// optional and only used to tag fillers).
class BigramLm final : public LmAdapter {
 public:
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";

  explicit BigramLm(const std::vector<std::string>& lines) {
    std::map<std::string, std::map<Pos, int>> tag_counts;
    std::vector<std::vector<std::string>> sentences;
    for (const auto& line : lines) {
      std::vector<std::string> words;
      for (const auto& tok : text::split_ws(line)) {
        std::string w = tok;
        std::optional<Pos> tag;
        if (auto slash = tok.rfind('/'); slash != std::string::npos && slash > 0) {
          tag = parse_pos(tok.substr(slash + 1));
          if (tag) w = tok.substr(0, slash);
        }
        auto bag = text::bag_words(w);
        if (bag.empty()) continue;
        words.push_back(bag.front());
        if (tag) ++tag_counts[bag.front()][*tag];
      }
      if (!words.empty()) sentences.push_back(std::move(words));
    }
    std::set<std::string> vocab;
    for (const auto& s : sentences) vocab.insert(s.begin(), s.end());
    vocab_.assign(vocab.begin(), vocab.end());
    for (const auto& w : vocab_) {
      Pos best = Pos::kNoun;
      int best_n = 0;
      for (auto [p, n] : tag_counts[w])
        if (n > best_n) { best = p; best_n = n; }
      pos_[w] = best;
    }
    for (const auto& s : sentences) {
      std::string prev(kBos);
      for (const auto& w : s) {
        ++bigram_[prev][w];
        ++context_[prev];
        prev = w;
      }
      ++bigram_[prev][std::string(kEos)];
      ++context_[prev];
    }
  }

  static BigramLm from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open LM corpus " + path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
      if (!line.empty() && line.front() != '#') lines.push_back(line);
    return BigramLm(lines);
  }

  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  /// Add-one smoothed P(next | prev); both mapped to <unk> when unseen.
  double transition(std::string_view prev, std::string_view next) const {
    const std::string a = known_or_unk(prev, true);
    const std::string b = known_or_unk(next, false);
    double c_ab = 0, c_a = 0;
    if (auto it = bigram_.find(a); it != bigram_.end())
      if (auto jt = it->second.find(b); jt != it->second.end()) c_ab = jt->second;
    if (auto it = context_.find(a); it != context_.end()) c_a = it->second;
    return (c_ab + 1.0) / (c_a + static_cast<double>(vocab_.size()) + 2.0);
  }

  MlmResponse fill(std::string_view input, int k) override {
    require_single_mask(input);
    const auto words = text::normalized_words(input);
    std::size_t at = 0;
    while (at < words.size() && words[at] != "[mask]") ++at;
    if (at == words.size()) throw InputError("mlm_fill: mask must be a separate word");
    const auto dist = gap_distribution(words, at);
    std::vector<Filler> all;
    for (std::size_t i = 0; i < vocab_.size(); ++i) all.push_back({vocab_[i], pos_.at(vocab_[i]), dist[i]});
    std::stable_sort(all.begin(), all.end(), [](const Filler& a, const Filler& b) { return a.prob > b.prob; });
    MlmResponse r;
    for (std::size_t i = 0; i < all.size() && static_cast<int>(i) < k; ++i) r.fillers.push_back(all[i]);
    return r;
  }

  double token_logprob(std::string_view input, std::size_t position) override {
    const auto words = text::normalized_words(input);
    if (position >= words.size())
      throw InputError("token_logprob: position " + std::to_string(position) + " out of range for " +
                       std::to_string(words.size()) + " words");
    const auto [left, right] = neighbours(words, position);
    const std::string w = known_or_unk(words[position], false);
    return std::log(transition(left, w) * transition(w, right) / normalizer(left, right));
  }

  bool concurrent_safe() const override { return true; }

 private:
  std::string known_or_unk(std::string_view w, bool as_context) const {
    if (as_context && w == kBos) return std::string(w);
    if (!as_context && w == kEos) return std::string(w);
    return std::binary_search(vocab_.begin(), vocab_.end(), w) ? std::string(w) : std::string(kUnk);
  }

  static std::pair<std::string, std::string> neighbours(const std::vector<std::string>& words, std::size_t at) {
    return {at == 0 ? std::string(kBos) : words[at - 1],
            at + 1 == words.size() ? std::string(kEos) : words[at + 1]};
  }

  // Sum over the vocabulary and <unk> of P(w | left) P(right | w), cached
  // per context.
  double normalizer(const std::string& left, const std::string& right) const {
    const std::string key = left + '\t' + right;
    {
      std::lock_guard lock(cache_->mu);
      if (auto it = cache_->z.find(key); it != cache_->z.end()) return it->second;
    }
    double z = 0;
    for (std::size_t i = 0; i <= vocab_.size(); ++i) {
      const std::string_view w = i < vocab_.size() ? std::string_view(vocab_[i]) : kUnk;
      z += transition(left, w) * transition(w, right);
    }
    std::lock_guard lock(cache_->mu);
    cache_->z.emplace(key, z);
    return z;
  }

  // Distribution over vocab_ (indices 0..V-1) and <unk> (index V).
  std::vector<double> gap_distribution(const std::vector<std::string>& words, std::size_t at) const {
    const auto [left, right] = neighbours(words, at);
    std::vector<double> d(vocab_.size() + 1);
    double z = 0;
    for (std::size_t i = 0; i <= vocab_.size(); ++i) {
      const std::string_view w = i < vocab_.size() ? std::string_view(vocab_[i]) : kUnk;
      z += (d[i] = transition(left, w) * transition(w, right));
    }
    for (auto& v : d) v /= z;
    return d;
  }

  std::vector<std::string> vocab_;  // sorted
  std::unordered_map<std::string, Pos> pos_;
  std::unordered_map<std::string, std::unordered_map<std::string, int>> bigram_;
  std::unordered_map<std::string, int> context_;
  struct Cache {
    std::mutex mu;
    std::unordered_map<std::string, double> z;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace natlog
