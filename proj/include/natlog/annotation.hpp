#pragma once

// Polarity-annotated sentences, projection and its reverse, and a built-in
// single-clause polarity annotator.

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "natlog/error.hpp"
#include "natlog/relation.hpp"
#include "natlog/text.hpp"

namespace natlog {

enum class Pos : std::uint8_t { kNoun, kVerb, kAdj, kAdv, kDet, kPrep, kOther };

inline constexpr std::array<std::string_view, 7> kPosNames = {"noun", "verb", "adj", "adv",
                                                              "det",  "prep", "other"};

constexpr std::string_view to_string(Pos p) { return kPosNames[static_cast<std::size_t>(p)]; }

inline std::optional<Pos> parse_pos(std::string_view s) {
  for (std::size_t i = 0; i < kPosNames.size(); ++i)
    if (kPosNames[i] == s) return static_cast<Pos>(i);
  return std::nullopt;
}

constexpr bool is_content(Pos p) {
  return p == Pos::kNoun || p == Pos::kVerb || p == Pos::kAdj || p == Pos::kAdv;
}

enum class Polarity : std::uint8_t { kUp, kDown, kFlat };

constexpr std::string_view to_string(Polarity p) {
  return p == Polarity::kUp ? "up" : p == Polarity::kDown ? "down" : "flat";
}

inline std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "up") return Polarity::kUp;
  if (s == "down") return Polarity::kDown;
  if (s == "flat") return Polarity::kFlat;
  return std::nullopt;
}

/// Composes the effect of an enclosing operator onto a token's polarity:
/// downward operators flip, flat is absorbing.
constexpr Polarity compose(Polarity outer, Polarity inner) {
  if (outer == Polarity::kFlat || inner == Polarity::kFlat) return Polarity::kFlat;
  return outer == inner ? Polarity::kUp : Polarity::kDown;
}

using ProjectionList = std::array<Relation, kNumRelations>;

struct AnnotatedToken {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::kOther;
  Polarity polarity = Polarity::kUp;
  /// Sentence-level relation produced by each canonical local relation at
  /// this position: projection[i] = rho(L_B[i]).
  ProjectionList projection = kCanonicalRelations;

  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;
};

struct Constituent {
  std::string label;  // "NP", "VP" or "PP"
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  friend bool operator==(const Constituent&, const Constituent&) = default;
};

struct AnnotatedSentence {
  std::vector<AnnotatedToken> tokens;
  std::vector<Constituent> constituents;
  bool low_confidence = false;

  std::string text() const {
    std::vector<std::string> words;
    words.reserve(tokens.size());
    for (const auto& t : tokens) words.push_back(t.surface);
    return text::detokenize(words);
  }

  std::vector<std::string> surfaces() const {
    std::vector<std::string> out;
    for (const auto& t : tokens) out.push_back(t.surface);
    return out;
  }

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

/// Throws InputError if spans are out of bounds or cross each other.
inline void validate_constituents(const AnnotatedSentence& s) {
  for (const auto& c : s.constituents) {
    if (c.label != "NP" && c.label != "VP" && c.label != "PP")
      throw InputError("constituent label must be NP, VP or PP, got \"" + c.label + "\"");
    if (c.start >= c.end || c.end > s.tokens.size())
      throw InputError("constituent " + c.label + " span [" + std::to_string(c.start) + ", " +
                       std::to_string(c.end) + ") is out of bounds");
  }
  for (std::size_t a = 0; a < s.constituents.size(); ++a)
    for (std::size_t b = a + 1; b < s.constituents.size(); ++b) {
      const auto& x = s.constituents[a];
      const auto& y = s.constituents[b];
      const bool disjoint = x.end <= y.start || y.end <= x.start;
      const bool nested = (x.start <= y.start && y.end <= x.end) ||
                          (y.start <= x.start && x.end <= y.end);
      if (!disjoint && !nested)
        throw InputError("constituents " + x.label + "[" + std::to_string(x.start) + "," +
                         std::to_string(x.end) + ") and " + y.label + "[" +
                         std::to_string(y.start) + "," + std::to_string(y.end) +
                         ") are not well-nested");
    }
}

/// Inverse of projection at one token:
/// every canonical local relation whose projection at this token equals the
/// target sentence-level relation. Empty means the target is unreachable by
/// editing this token.
inline RelationSet reverse_project(const AnnotatedToken& token, Relation target) {
  RelationSet out;
  for (std::size_t i = 0; i < kNumRelations; ++i)
    if (token.projection[i] == target) out.insert(kCanonicalRelations[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Projectivity
// ---------------------------------------------------------------------------

/// How downward and flat contexts map local relations to sentence relations.
/// Upward contexts are always the identity. Missing entries project to #.
class ProjectivityTable {
 public:
  using Row = std::array<std::optional<Relation>, kNumRelations>;

  static ProjectivityTable defaults() {
    ProjectivityTable t;
    t.down_[index_of(Relation::kEquivalence)] = Relation::kEquivalence;
    t.down_[index_of(Relation::kForward)] = Relation::kReverse;
    t.down_[index_of(Relation::kReverse)] = Relation::kForward;
    t.down_[index_of(Relation::kIndependence)] = Relation::kIndependence;
    t.flat_[index_of(Relation::kEquivalence)] = Relation::kEquivalence;
    t.flat_[index_of(Relation::kIndependence)] = Relation::kIndependence;
    return t;
  }

  /// Format: {"down": {"equiv": "equiv", "fwd": "rev", ...}, "flat": {...}}.
  static ProjectivityTable from_json(const nlohmann::json& j) {
    ProjectivityTable t;
    if (!j.is_object()) throw InputError("projectivity table must be a JSON object");
    for (const auto& [key, row] : j.items()) {
      Row* target = key == "down" ? &t.down_ : key == "flat" ? &t.flat_ : nullptr;
      if (!target) throw InputError("projectivity table: unknown context \"" + key + "\"");
      if (!row.is_object()) throw InputError("projectivity table: \"" + key + "\" must be an object");
      for (const auto& [from, to] : row.items()) {
        auto f = parse_relation(from);
        auto r = to.is_string() ? parse_relation(to.get<std::string>()) : std::nullopt;
        if (!f || !r)
          throw InputError("projectivity table: bad entry \"" + from + "\" in \"" + key + "\"");
        (*target)[index_of(*f)] = *r;
      }
    }
    return t;
  }

  static ProjectivityTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open projectivity table " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ": " + e.what());
    }
  }

  Relation project(Polarity context, Relation local) const {
    if (context == Polarity::kUp) return local;
    const Row& row = context == Polarity::kDown ? down_ : flat_;
    return row[index_of(local)].value_or(Relation::kIndependence);
  }

  ProjectionList projection_list(Polarity context) const {
    ProjectionList out{};
    for (std::size_t i = 0; i < kNumRelations; ++i) out[i] = project(context, kCanonicalRelations[i]);
    return out;
  }

 private:
  Row down_{};
  Row flat_{};
};

inline Relation project(Polarity context, Relation local, const ProjectivityTable& table) {
  return table.project(context, local);
}

// ---------------------------------------------------------------------------
// Polarity lexicon
// ---------------------------------------------------------------------------

struct QuantifierSignature {
  Polarity restrictor = Polarity::kUp;
  Polarity body = Polarity::kUp;
  /// Pronoun quantifiers ("nobody") carry their restrictor internally.
  bool pronoun = false;
};

struct PolarityLexicon {
  std::map<std::string, QuantifierSignature> quantifiers;
  std::set<std::string> negators;
  /// Lowercased token sequences of sentence-initial negating prefixes.
  std::vector<std::vector<std::string>> assertion_prefixes;
  std::set<std::string> clause_markers;

  static PolarityLexicon defaults() {
    PolarityLexicon lex;
    const auto up = Polarity::kUp, down = Polarity::kDown, flat = Polarity::kFlat;
    for (auto w : {"all", "every", "each"}) lex.quantifiers[w] = {down, up, false};
    for (auto w : {"some", "a", "an", "many", "several", "two", "three", "four", "five"})
      lex.quantifiers[w] = {up, up, false};
    lex.quantifiers["no"] = {down, down, false};
    lex.quantifiers["few"] = {down, down, false};
    lex.quantifiers["most"] = {flat, up, false};
    for (auto w : {"nobody", "nothing", "noone", "none"}) lex.quantifiers[w] = {down, down, true};
    for (auto w : {"everyone", "everybody", "everything"}) lex.quantifiers[w] = {down, up, true};
    for (auto w : {"someone", "somebody", "something"}) lex.quantifiers[w] = {up, up, true};
    lex.negators = {"not", "n't", "never"};
    lex.assertion_prefixes = {{"it", "is", "not", "true", "that"}, {"it", "is", "false", "that"}};
    lex.clause_markers = {"who",  "which", "whom",  "whose", "because", "although",
                          "if",   "when",  "while", "whether", "that", "unless"};
    return lex;
  }

  /// Format:
  /// {"quantifiers": {"all": {"restrictor": "down", "body": "up"},
  ///                  "nobody": {"restrictor": "down", "body": "down", "pronoun": true}},
  ///  "negators": ["not", "n't", "never"],
  ///  "assertion_prefixes": ["it is not true that", "it is false that"],
  ///  "clause_markers": ["who", ...]}
  /// Keys that are absent keep their defaults.
  static PolarityLexicon from_json(const nlohmann::json& j) {
    auto lex = defaults();
    if (!j.is_object()) throw InputError("polarity lexicon must be a JSON object");
    auto pol = [](const nlohmann::json& v, const std::string& where) {
      auto p = v.is_string() ? parse_polarity(v.get<std::string>()) : std::nullopt;
      if (!p) throw InputError("polarity lexicon: bad polarity at " + where);
      return *p;
    };
    if (j.contains("quantifiers")) {
      lex.quantifiers.clear();
      for (const auto& [word, sig] : j.at("quantifiers").items()) {
        QuantifierSignature q;
        q.restrictor = pol(sig.value("restrictor", nlohmann::json("up")), word + ".restrictor");
        q.body = pol(sig.value("body", nlohmann::json("up")), word + ".body");
        q.pronoun = sig.value("pronoun", false);
        lex.quantifiers[text::lower(word)] = q;
      }
    }
    if (j.contains("negators")) {
      lex.negators.clear();
      for (const auto& w : j.at("negators")) lex.negators.insert(text::lower(w.get<std::string>()));
    }
    if (j.contains("assertion_prefixes")) {
      lex.assertion_prefixes.clear();
      for (const auto& p : j.at("assertion_prefixes"))
        lex.assertion_prefixes.push_back(text::tokenize(text::lower(p.get<std::string>())));
    }
    if (j.contains("clause_markers")) {
      lex.clause_markers.clear();
      for (const auto& w : j.at("clause_markers")) lex.clause_markers.insert(text::lower(w.get<std::string>()));
    }
    return lex;
  }

  static PolarityLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open polarity lexicon " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ": " + e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// Built-in annotator
// ---------------------------------------------------------------------------

struct TaggedToken {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::kOther;
};

namespace detail {

inline bool is_aux_lemma(std::string_view w) {
  static const std::set<std::string, std::less<>> aux = {
      "is", "are", "was", "were", "be", "been", "am", "do", "does", "did", "can", "ca",
      "could", "will", "wo", "would", "should", "may", "might", "must", "has", "have", "had", "'s"};
  return aux.contains(w);
}

inline std::size_t match_prefix(const std::vector<TaggedToken>& toks, std::size_t at,
                                const PolarityLexicon& lex) {
  for (const auto& p : lex.assertion_prefixes) {
    if (p.empty() || at + p.size() > toks.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < p.size() && ok; ++k) ok = text::lower(toks[at + k].surface) == p[k];
    if (ok) return p.size();
  }
  return 0;
}

inline bool np_token(const TaggedToken& t) {
  return t.pos == Pos::kDet || t.pos == Pos::kAdj || t.pos == Pos::kNoun || t.surface == "'s";
}

/// NP, PP and VP spans over an already-validated single clause.
inline std::vector<Constituent> chunk(const std::vector<TaggedToken>& toks, std::size_t clause_start,
                                      std::optional<std::size_t> verb) {
  std::vector<Constituent> out;
  std::vector<Constituent> nps;
  const std::size_t n = toks.size();
  for (std::size_t i = clause_start; i < n;) {
    if (!np_token(toks[i])) { ++i; continue; }
    std::size_t j = i;
    bool has_noun = false;
    while (j < n && np_token(toks[j])) has_noun |= toks[j++].pos == Pos::kNoun;
    if (has_noun) nps.push_back({"NP", i, j});
    i = j;
  }
  std::size_t clause_end = n;
  while (clause_end > clause_start && text::is_punct_token(toks[clause_end - 1].surface)) --clause_end;
  if (verb && *verb < clause_end) out.push_back({"VP", *verb, clause_end});
  for (const auto& np : nps) {
    if (np.start > clause_start && toks[np.start - 1].pos == Pos::kPrep)
      out.push_back({"PP", np.start - 1, np.end});
    out.push_back(np);
  }
  return out;
}

}  // namespace detail

/// Marks token polarities from quantifier and negation scopes and fills each
/// token's projection list. Handles single-clause declaratives (optionally
/// wrapped in sentence-level negating prefixes); anything else yields the
/// low-confidence annotation: every token flat, projections all # except ≡.
inline AnnotatedSentence annotate(const std::vector<TaggedToken>& toks, const PolarityLexicon& lex,
                                  const ProjectivityTable& table) {
  if (toks.empty()) throw InputError("annotate: empty sentence");
  const std::size_t n = toks.size();
  AnnotatedSentence out;
  out.tokens.reserve(n);
  for (const auto& t : toks) out.tokens.push_back({t.surface, t.lemma, t.pos, Polarity::kUp, {}});

  std::vector<Polarity> pol(n, Polarity::kUp);
  auto apply = [&](std::size_t b, std::size_t e, Polarity effect) {
    for (std::size_t k = b; k < e && k < n; ++k) pol[k] = compose(effect, pol[k]);
  };
  auto low_confidence = [&]() {
    for (auto& t : out.tokens) {
      t.polarity = Polarity::kFlat;
      t.projection.fill(Relation::kIndependence);
      t.projection[0] = Relation::kEquivalence;
    }
    out.constituents.clear();
    out.low_confidence = true;
    return out;
  };

  std::size_t start = 0;
  while (std::size_t len = detail::match_prefix(toks, start, lex)) {
    for (std::size_t k = start; k < start + len; ++k) out.tokens[k].pos = Pos::kOther;
    apply(start + len, n, Polarity::kDown);
    start += len;
  }
  if (start >= n) return low_confidence();

  std::optional<std::size_t> verb;
  for (std::size_t k = start; k < n; ++k)
    if (toks[k].pos == Pos::kVerb) { verb = k; break; }
  if (!verb) return low_confidence();

  for (std::size_t k = start; k < n; ++k) {
    const auto w = text::lower(toks[k].lemma);
    if (lex.clause_markers.contains(w)) return low_confidence();
    if (w == "and" || w == "or" || w == "but") {
      bool before = false, after = false;
      for (std::size_t a = start; a < k; ++a) before |= toks[a].pos == Pos::kVerb;
      for (std::size_t a = k + 1; a < n; ++a) after |= toks[a].pos == Pos::kVerb;
      if (before && after) return low_confidence();
    }
  }

  // Subject quantifier: restrictor covers the rest of the subject, body
  // covers the predicate.
  std::optional<std::size_t> subj_q;
  for (std::size_t k = start; k < *verb; ++k) {
    if (!lex.quantifiers.contains(text::lower(toks[k].lemma))) continue;
    if (subj_q) return low_confidence();
    subj_q = k;
  }
  if (subj_q) {
    const auto& sig = lex.quantifiers.at(text::lower(toks[*subj_q].lemma));
    if (!sig.pronoun) apply(*subj_q + 1, *verb, sig.restrictor);
    apply(*verb, n, sig.body);
  }

  // Object quantifiers: restrictor covers the following noun phrase.
  std::size_t obj_quantifiers = 0;
  for (std::size_t k = *verb + 1; k < n; ++k) {
    auto it = lex.quantifiers.find(text::lower(toks[k].lemma));
    if (it == lex.quantifiers.end()) continue;
    if (++obj_quantifiers > 1) return low_confidence();
    std::size_t e = k + 1;
    while (e < n && detail::np_token(toks[e])) ++e;
    if (!it->second.pronoun) apply(k + 1, e, it->second.restrictor);
  }

  for (std::size_t k = start; k < n; ++k)
    if (lex.negators.contains(text::lower(toks[k].lemma))) apply(k + 1, n, Polarity::kDown);

  for (std::size_t k = 0; k < n; ++k) {
    out.tokens[k].polarity = pol[k];
    out.tokens[k].projection = table.projection_list(pol[k]);
  }
  out.constituents = detail::chunk(toks, start, verb);
  validate_constituents(out);
  return out;
}

// ---------------------------------------------------------------------------
// Annotation file format (JSON lines)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const AnnotatedSentence& s) {
  nlohmann::ordered_json toks = nlohmann::ordered_json::array();
  for (const auto& t : s.tokens) {
    nlohmann::ordered_json proj = nlohmann::ordered_json::array();
    for (auto r : t.projection) proj.push_back(std::string(to_string(r)));
    toks.push_back({{"surface", t.surface},
                    {"lemma", t.lemma},
                    {"pos", std::string(to_string(t.pos))},
                    {"polarity", std::string(to_string(t.polarity))},
                    {"projection", proj}});
  }
  nlohmann::ordered_json cons = nlohmann::ordered_json::array();
  for (const auto& c : s.constituents)
    cons.push_back({{"label", c.label}, {"start", c.start}, {"end", c.end}});
  nlohmann::ordered_json j = {{"tokens", toks}, {"constituents", cons}};
  if (s.low_confidence) j["low_confidence"] = true;
  return j;
}

/// Parses one annotation record. `where` prefixes error messages (e.g. "line 3").
inline AnnotatedSentence annotation_from_json(const nlohmann::json& j, const std::string& where) {
  auto fail = [&](const std::string& what) -> void { throw InputError(where + ": " + what); };
  if (!j.is_object() || !j.contains("tokens") || !j.at("tokens").is_array())
    fail("field \"tokens\" must be an array");
  AnnotatedSentence s;
  std::size_t idx = 0;
  for (const auto& t : j.at("tokens")) {
    const std::string at = "tokens[" + std::to_string(idx++) + "]";
    if (!t.is_object()) fail(at + " must be an object");
    auto str = [&](const char* key) {
      if (!t.contains(key) || !t.at(key).is_string()) fail(at + ".\"" + key + "\" must be a string");
      return t.at(key).get<std::string>();
    };
    AnnotatedToken tok;
    tok.surface = str("surface");
    tok.lemma = t.contains("lemma") ? str("lemma") : text::lower(tok.surface);
    auto pos = parse_pos(str("pos"));
    if (!pos) fail(at + ".pos: unknown tag \"" + str("pos") + "\"");
    tok.pos = *pos;
    auto pol = parse_polarity(str("polarity"));
    if (!pol) fail(at + ".polarity: unknown value \"" + str("polarity") + "\"");
    tok.polarity = *pol;
    if (!t.contains("projection") || !t.at("projection").is_array())
      fail(at + ".projection must be an array");
    const auto& proj = t.at("projection");
    if (proj.size() != kNumRelations) fail(at + ".projection: projection_list must have 7 entries");
    for (std::size_t k = 0; k < kNumRelations; ++k) {
      auto r = proj[k].is_string() ? parse_relation(proj[k].get<std::string>()) : std::nullopt;
      if (!r) fail(at + ".projection[" + std::to_string(k) + "]: unknown relation " + proj[k].dump());
      tok.projection[k] = *r;
    }
    s.tokens.push_back(std::move(tok));
  }
  if (s.tokens.empty()) fail("sentence has no tokens");
  if (j.contains("constituents")) {
    if (!j.at("constituents").is_array()) fail("field \"constituents\" must be an array");
    for (const auto& c : j.at("constituents")) {
      if (!c.is_object() || !c.contains("label") || !c.contains("start") || !c.contains("end") ||
          !c.at("start").is_number_unsigned() || !c.at("end").is_number_unsigned())
        fail("constituents entries need label, start, end");
      s.constituents.push_back({c.at("label").get<std::string>(), c.at("start").get<std::size_t>(),
                                c.at("end").get<std::size_t>()});
    }
  }
  s.low_confidence = j.value("low_confidence", false);
  try {
    validate_constituents(s);
  } catch (const InputError& e) {
    fail(e.what());
  }
  return s;
}

inline std::vector<AnnotatedSentence> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open annotation file " + path);
  std::vector<AnnotatedSentence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": invalid JSON: " + e.what());
    }
    out.push_back(annotation_from_json(j, where));
  }
  return out;
}

}  // namespace natlog
