#pragma once

// Surface-level text utilities: tokenization, detokenization, casing, and the
// naive English inflection used to realize substitutions.

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace natlog::text {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool is_capitalized(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

inline std::string capitalize(std::string s) {
  if (!s.empty()) s.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
  return s;
}

inline std::string decapitalize(std::string s) {
  if (!s.empty()) s.front() = static_cast<char>(std::tolower(static_cast<unsigned char>(s.front())));
  return s;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool is_punct_token(std::string_view t) {
  return t.size() == 1 && std::ispunct(static_cast<unsigned char>(t.front())) && t != "'";
}

/// Splits on whitespace, detaches leading/trailing punctuation, and splits
/// the clitics "n't" and "'s" into their own tokens.
inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& word : split_ws(sentence)) {
    std::string_view w = word;
    std::vector<std::string> tail;
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back())) && w.back() != '\'') {
      tail.emplace_back(1, w.back());
      w.remove_suffix(1);
    }
    std::size_t lead = 0;
    while (lead < w.size() && (w[lead] == '"' || w[lead] == '(')) ++lead;
    for (std::size_t k = 0; k < lead; ++k) out.emplace_back(1, w[k]);
    w.remove_prefix(lead);
    if (w.size() > 3 && lower(w.substr(w.size() - 3)) == "n't") {
      std::string stem(w.substr(0, w.size() - 3));
      // can't -> ca n't ; won't -> wo n't (Penn convention)
      out.push_back(stem);
      out.emplace_back(w.substr(w.size() - 3));
    } else if (w.size() > 2 && (w.substr(w.size() - 2) == "'s" || w.substr(w.size() - 2) == "'S")) {
      out.emplace_back(w.substr(0, w.size() - 2));
      out.emplace_back(w.substr(w.size() - 2));
    } else if (!w.empty()) {
      out.emplace_back(w);
    }
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) out.push_back(*it);
  }
  return out;
}

inline bool attaches_left(std::string_view t) {
  return t == "n't" || t == "'s" || t == "," || t == "." || t == "!" || t == "?" ||
         t == ";" || t == ":" || t == ")";
}

inline std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && !attaches_left(tokens[i]) && tokens[i - 1] != "(") out += ' ';
    out += tokens[i];
  }
  return out;
}

/// Lowercased words with surrounding punctuation stripped, as the mock
/// victim and the bigram stub see them.
inline std::vector<std::string> bag_words(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& w : split_ws(sentence)) {
    std::size_t b = 0, e = w.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(w[b])) && w[b] != '[') ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1])) && w[e - 1] != ']') --e;
    if (e > b) out.push_back(lower(std::string_view(w).substr(b, e - b)));
  }
  return out;
}

/// One normalized form per whitespace word (positions are preserved):
/// lowercased, surrounding punctuation stripped unless nothing would remain.
inline std::vector<std::string> normalized_words(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& w : split_ws(sentence)) {
    auto bag = bag_words(w);
    out.push_back(bag.empty() ? lower(w) : bag.front());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inflection
// ---------------------------------------------------------------------------

namespace detail {
inline const std::unordered_map<std::string, std::string>& irregular_plurals() {
  static const std::unordered_map<std::string, std::string> m = {
      {"man", "men"},     {"woman", "women"}, {"child", "children"}, {"person", "people"},
      {"goose", "geese"}, {"mouse", "mice"},  {"foot", "feet"},      {"tooth", "teeth"},
      {"sheep", "sheep"}, {"fish", "fish"},   {"deer", "deer"},      {"matriarch", "matriarchs"},
  };
  return m;
}
inline const std::unordered_map<std::string, std::string>& irregular_past() {
  static const std::unordered_map<std::string, std::string> m = {
      {"run", "ran"},     {"eat", "ate"},     {"drink", "drank"},   {"sleep", "slept"},
      {"throw", "threw"}, {"swim", "swam"},   {"fly", "flew"},      {"sing", "sang"},
      {"see", "saw"},     {"go", "went"},     {"buy", "bought"},    {"sit", "sat"},
      {"write", "wrote"}, {"ride", "rode"},   {"speak", "spoke"},   {"stand", "stood"},
      {"take", "took"},   {"make", "made"},   {"get", "got"},       {"give", "gave"},
      {"wear", "wore"},   {"bring", "brought"}, {"catch", "caught"}, {"drive", "drove"},
      {"read", "read"},   {"win", "won"},     {"lose", "lost"},     {"find", "found"},
      {"leave", "left"},  {"hold", "held"},   {"tell", "told"},     {"say", "said"},
      {"come", "came"},   {"fall", "fell"},   {"feel", "felt"},     {"meet", "met"},
      {"think", "thought"}, {"teach", "taught"}, {"build", "built"}, {"lie", "lied"},
      {"cut", "cut"},     {"hit", "hit"},     {"put", "put"},       {"sell", "sold"},
      {"dig", "dug"},     {"shine", "shone"}, {"bite", "bit"},      {"hide", "hid"},
      {"kneel", "knelt"}, {"creep", "crept"}, {"weep", "wept"},     {"sweep", "swept"},
      {"wake", "woke"},   {"begin", "began"}, {"draw", "drew"},     {"grow", "grew"},
      {"know", "knew"},   {"blow", "blew"},   {"shake", "shook"},   {"spend", "spent"},
      {"send", "sent"},   {"lend", "lent"},   {"bend", "bent"},     {"dance", "danced"},
  };
  return m;
}
inline bool is_vowel(char c) {
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}
inline bool ends_with(std::string_view s, std::string_view suf) {
  return s.size() >= suf.size() && s.substr(s.size() - suf.size()) == suf;
}
// Applies f to the last word of a possibly multi-word expression.
template <typename F>
std::string on_last_word(std::string_view phrase, F&& f) {
  auto pos = phrase.rfind(' ');
  if (pos == std::string_view::npos) return f(std::string(phrase));
  return std::string(phrase.substr(0, pos + 1)) + f(std::string(phrase.substr(pos + 1)));
}
// Applies f to the first word of a phrase (verbs: "take off" -> "took off").
template <typename F>
std::string on_first_word(std::string_view phrase, F&& f) {
  auto pos = phrase.find(' ');
  if (pos == std::string_view::npos) return f(std::string(phrase));
  return f(std::string(phrase.substr(0, pos))) + std::string(phrase.substr(pos));
}
}  // namespace detail

inline std::string pluralize(std::string_view phrase) {
  return detail::on_last_word(phrase, [](std::string w) {
    const auto& irr = detail::irregular_plurals();
    if (auto it = irr.find(lower(w)); it != irr.end()) return it->second;
    using detail::ends_with;
    if (ends_with(w, "s") || ends_with(w, "x") || ends_with(w, "z") || ends_with(w, "ch") ||
        ends_with(w, "sh"))
      return w + "es";
    if (w.size() > 1 && w.back() == 'y' && !detail::is_vowel(w[w.size() - 2]))
      return w.substr(0, w.size() - 1) + "ies";
    return w + "s";
  });
}

/// Best-effort singular of a plural noun; returns the input if no rule fits.
inline std::string singularize(std::string_view word) {
  std::string w = lower(word);
  for (const auto& [sg, pl] : detail::irregular_plurals())
    if (pl == w) return sg;
  using detail::ends_with;
  if (ends_with(w, "ies") && w.size() > 3) return w.substr(0, w.size() - 3) + "y";
  if ((ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes") || ends_with(w, "sses")) &&
      w.size() > 4)
    return w.substr(0, w.size() - 2);
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && w.size() > 2)
    return w.substr(0, w.size() - 1);
  return w;
}

namespace detail {
// Single-syllable CVC: run -> running, fib -> fibbed.
inline bool doubles_final(const std::string& w) {
  return w.size() == 3 && !is_vowel(w[0]) && is_vowel(w[1]) && !is_vowel(w[2]) && w[2] != 'w' && w[2] != 'x' &&
         w[2] != 'y';
}
}  // namespace detail

inline std::string past_tense(std::string_view phrase) {
  return detail::on_first_word(phrase, [](std::string w) {
    const auto& irr = detail::irregular_past();
    if (auto it = irr.find(lower(w)); it != irr.end()) return it->second;
    if (detail::ends_with(w, "e")) return w + "d";
    if (w.size() > 1 && w.back() == 'y' && !detail::is_vowel(w[w.size() - 2]))
      return w.substr(0, w.size() - 1) + "ied";
    if (detail::doubles_final(w)) return w + w.back() + "ed";
    return w + "ed";
  });
}

inline std::string third_person(std::string_view phrase) {
  return detail::on_first_word(phrase, [](std::string w) {
    using detail::ends_with;
    if (w == "be") return std::string("is");
    if (w == "have") return std::string("has");
    if (ends_with(w, "s") || ends_with(w, "x") || ends_with(w, "z") || ends_with(w, "ch") ||
        ends_with(w, "sh") || ends_with(w, "o"))
      return w + "es";
    if (w.size() > 1 && w.back() == 'y' && !detail::is_vowel(w[w.size() - 2]))
      return w.substr(0, w.size() - 1) + "ies";
    return w + "s";
  });
}

inline std::string gerund(std::string_view phrase) {
  return detail::on_first_word(phrase, [](std::string w) {
    if (detail::ends_with(w, "ie")) return w.substr(0, w.size() - 2) + "ying";
    if (detail::ends_with(w, "e") && !detail::ends_with(w, "ee") && w.size() > 2)
      return w.substr(0, w.size() - 1) + "ing";
    if (detail::doubles_final(w)) return w + w.back() + "ing";
    return w + "ing";
  });
}

enum class Form { kBase, kPlural, kPast, kThirdPerson, kGerund };

/// Recovers which inflection turned `lemma` into `surface`.
inline Form detect_noun_form(std::string_view surface, std::string_view lemma) {
  const auto s = lower(surface), l = lower(lemma);
  if (s != l && s == lower(pluralize(l))) return Form::kPlural;
  return Form::kBase;
}

inline Form detect_verb_form(std::string_view surface, std::string_view lemma) {
  const auto s = lower(surface), l = lower(lemma);
  if (s == l) return Form::kBase;
  if (s == lower(past_tense(l))) return Form::kPast;
  if (s == lower(third_person(l))) return Form::kThirdPerson;
  if (s == lower(gerund(l))) return Form::kGerund;
  return Form::kBase;
}

inline std::string inflect(std::string_view lemma, Form form) {
  switch (form) {
    case Form::kPlural: return pluralize(lemma);
    case Form::kPast: return past_tense(lemma);
    case Form::kThirdPerson: return third_person(lemma);
    case Form::kGerund: return gerund(lemma);
    case Form::kBase: break;
  }
  return std::string(lemma);
}

/// Best-effort verb lemma from a surface form, given a predicate that says
/// whether a candidate lemma is known.
template <typename Known>
std::string verb_lemma(std::string_view surface, Known&& known) {
  std::string w = lower(surface);
  if (known(w)) return w;
  for (const auto& [base, past] : detail::irregular_past())
    if (past == w && known(base)) return base;
  using detail::ends_with;
  std::vector<std::string> tries;
  if (ends_with(w, "ied")) tries.push_back(w.substr(0, w.size() - 3) + "y");
  if (ends_with(w, "ed")) {
    auto stem = w.substr(0, w.size() - 2);
    tries.push_back(stem);
    tries.push_back(w.substr(0, w.size() - 1));
    if (stem.size() > 2 && stem.back() == stem[stem.size() - 2]) tries.push_back(stem.substr(0, stem.size() - 1));
  }
  if (ends_with(w, "ies")) tries.push_back(w.substr(0, w.size() - 3) + "y");
  if (ends_with(w, "es")) tries.push_back(w.substr(0, w.size() - 2));
  if (ends_with(w, "s")) tries.push_back(w.substr(0, w.size() - 1));
  if (ends_with(w, "ing") && w.size() > 4) {
    auto stem = w.substr(0, w.size() - 3);
    tries.push_back(stem);
    tries.push_back(stem + "e");
    if (stem.size() > 2 && stem.back() == stem[stem.size() - 2]) tries.push_back(stem.substr(0, stem.size() - 1));
    if (ends_with(stem, "y")) tries.push_back(stem.substr(0, stem.size() - 1) + "ie");
  }
  for (auto& t : tries)
    if (known(t)) return t;
  return w;
}

/// Fixes "a"/"an" agreement after an insertion or substitution changed the
/// word following the article.
inline void fix_articles(std::vector<std::string>& tokens) {
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const auto w = lower(tokens[i]);
    if (w != "a" && w != "an") continue;
    const bool vowel = !tokens[i + 1].empty() && detail::is_vowel(tokens[i + 1].front());
    std::string fixed = vowel ? "an" : "a";
    if (is_capitalized(tokens[i])) fixed = capitalize(fixed);
    tokens[i] = fixed;
  }
}

}  // namespace natlog::text
