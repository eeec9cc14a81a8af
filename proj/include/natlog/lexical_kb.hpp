#pragma once

// Lexical knowledge base: substitution candidates per natural-logic relation,
// plus negation phrases and insertion inventories.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "natlog/annotation.hpp"
#include "natlog/error.hpp"
#include "natlog/relation.hpp"
#include "natlog/text.hpp"

namespace natlog {

struct WeightedWord {
  std::string word;
  int distance = 1;
  friend bool operator==(const WeightedWord&, const WeightedWord&) = default;
};

struct KbEntry {
  std::string lemma;
  Pos pos = Pos::kNoun;
  std::vector<std::string> synonyms;
  std::vector<WeightedWord> hypernyms;
  std::vector<WeightedWord> hyponyms;
  std::vector<std::string> antonyms;
  std::vector<std::string> cohyponyms;
};

enum class Attachment { kAdjective, kAdverb, kNounPP, kVerbPP };

struct InsertionItem {
  std::string text;
  Attachment attachment;
};

enum class NegationKind { kVerbNegator, kAssertionPrefix };

struct NegationPhrase {
  std::string phrase;
  NegationKind kind;
};

inline constexpr int kDefaultMaxDistance = 2;

class LexicalKB {
 public:
  LexicalKB() : negation_phrases_(default_negation_phrases()) {}

  static std::vector<NegationPhrase> default_negation_phrases() {
    return {{"not", NegationKind::kVerbNegator},
            {"n't", NegationKind::kVerbNegator},
            {"never", NegationKind::kVerbNegator},
            {"It is false that", NegationKind::kAssertionPrefix},
            {"It is not true that", NegationKind::kAssertionPrefix}};
  }

  /// Adds or merges an entry, then restores the symmetric closure of the
  /// synonym/antonym/hypernym/hyponym links among present entries.
  void add(KbEntry e, bool close = true) {
    validate(e);
    auto key = std::make_pair(e.lemma, e.pos);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      order_.push_back(key);
      entries_.emplace(key, std::move(e));
    } else {
      merge_into(it->second, e);
    }
    if (close) close_symmetric();
  }

  /// Completes symmetric links after a batch of add(e, false).
  void close() { close_symmetric(); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const KbEntry* find(std::string_view lemma, Pos pos) const {
    auto it = entries_.find(std::make_pair(std::string(lemma), pos));
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Tags under which a lemma is present, in canonical Pos order.
  std::vector<Pos> tags_of(std::string_view lemma) const {
    std::vector<Pos> out;
    for (std::size_t p = 0; p < kPosNames.size(); ++p)
      if (find(lemma, static_cast<Pos>(p))) out.push_back(static_cast<Pos>(p));
    return out;
  }

  /// Substitution words standing in `relation` to (lemma, pos):
  /// ≡ synonyms, ⊏ hypernyms, ⊐ hyponyms (both within max_distance),
  /// | cohyponyms followed by antonyms. Negation is served by negation
  /// phrases; cover and independence are never generated.
  std::vector<std::string> lookup(std::string_view lemma, Pos pos, Relation relation,
                                  int max_distance = kDefaultMaxDistance) const {
    switch (relation) {
      case Relation::kEquivalence:
      case Relation::kForward:
      case Relation::kReverse:
      case Relation::kAlternation:
        break;
      default:
        throw ConstraintError("lookup: relation " + std::string(to_string(relation)) +
                              " is not served by the lexical KB");
    }
    return with_plural_fallback(lemma, pos, [&](const KbEntry& e) {
      switch (relation) {
        case Relation::kEquivalence: return e.synonyms;
        case Relation::kForward: return within(e.hypernyms, max_distance);
        case Relation::kReverse: return within(e.hyponyms, max_distance);
        default: {
          auto out = cohyponyms_of(e);
          for (const auto& a : e.antonyms) push_unique(out, a);
          return out;
        }
      }
    });
  }

  /// Words sharing a direct (distance-1) hypernym with the entry, plus any
  /// listed explicitly.
  std::vector<std::string> cohyponyms(std::string_view lemma, Pos pos) const {
    return with_plural_fallback(lemma, pos, [&](const KbEntry& e) { return cohyponyms_of(e); });
  }

  std::vector<std::string> antonyms(std::string_view lemma, Pos pos) const {
    return with_plural_fallback(lemma, pos, [](const KbEntry& e) { return e.antonyms; });
  }

  // Negation phrases and insertion inventories.

  const std::vector<NegationPhrase>& negation_phrases() const { return negation_phrases_; }
  void set_negation_phrases(std::vector<NegationPhrase> p) { negation_phrases_ = std::move(p); }

  std::vector<std::string> negation_phrases(NegationKind kind) const {
    std::vector<std::string> out;
    for (const auto& p : negation_phrases_)
      if (p.kind == kind) out.push_back(p.phrase);
    return out;
  }

  void add_insertion(InsertionItem item) { inventory_.push_back(std::move(item)); }
  const std::vector<InsertionItem>& inventory() const { return inventory_; }

  std::vector<std::string> insertions(Attachment a) const {
    std::vector<std::string> out;
    for (const auto& i : inventory_)
      if (i.attachment == a) out.push_back(i.text);
    return out;
  }

  bool in_inventory(std::string_view word, Attachment a) const {
    return std::any_of(inventory_.begin(), inventory_.end(),
                       [&](const InsertionItem& i) { return i.attachment == a && i.text == word; });
  }

  const std::vector<std::pair<std::string, Pos>>& keys() const { return order_; }

 private:
  static void validate(const KbEntry& e) {
    if (e.lemma.empty()) throw InputError("KB entry with empty lemma");
    for (const auto* list : {&e.hypernyms, &e.hyponyms})
      for (const auto& w : *list)
        if (w.distance < 1)
          throw InputError("KB entry \"" + e.lemma + "\": distance of \"" + w.word +
                           "\" must be >= 1, got " + std::to_string(w.distance));
    for (const auto& s : e.synonyms)
      if (s == e.lemma) throw InputError("KB entry \"" + e.lemma + "\" lists itself as a synonym");
    for (const auto& a : e.antonyms)
      if (a == e.lemma) throw InputError("KB entry \"" + e.lemma + "\" lists itself as an antonym");
  }

  static void push_unique(std::vector<std::string>& v, const std::string& w) {
    if (std::find(v.begin(), v.end(), w) == v.end()) v.push_back(w);
  }

  static void push_weighted(std::vector<WeightedWord>& v, const WeightedWord& w) {
    auto it = std::find_if(v.begin(), v.end(), [&](const WeightedWord& x) { return x.word == w.word; });
    if (it == v.end()) v.push_back(w);
    else it->distance = std::min(it->distance, w.distance);
  }

  static void merge_into(KbEntry& dst, const KbEntry& src) {
    for (const auto& s : src.synonyms) push_unique(dst.synonyms, s);
    for (const auto& a : src.antonyms) push_unique(dst.antonyms, a);
    for (const auto& c : src.cohyponyms) push_unique(dst.cohyponyms, c);
    for (const auto& h : src.hypernyms) push_weighted(dst.hypernyms, h);
    for (const auto& h : src.hyponyms) push_weighted(dst.hyponyms, h);
  }

  void close_symmetric() {
    for (const auto& key : order_) {
      const KbEntry& e = entries_.at(key);
      const Pos pos = e.pos;
      const std::string lemma = e.lemma;
      // Copy: inserting into other entries must not invalidate iteration.
      const auto syn = e.synonyms, ant = e.antonyms;
      const auto hyper = e.hypernyms, hypo = e.hyponyms;
      auto other = [&](const std::string& w) -> KbEntry* {
        auto it = entries_.find(std::make_pair(w, pos));
        return it == entries_.end() || w == lemma ? nullptr : &it->second;
      };
      for (const auto& s : syn)
        if (auto* o = other(s)) push_unique(o->synonyms, lemma);
      for (const auto& a : ant)
        if (auto* o = other(a)) push_unique(o->antonyms, lemma);
      for (const auto& h : hyper)
        if (auto* o = other(h.word)) push_weighted(o->hyponyms, {lemma, h.distance});
      for (const auto& h : hypo)
        if (auto* o = other(h.word)) push_weighted(o->hypernyms, {lemma, h.distance});
    }
  }

  static std::vector<std::string> within(const std::vector<WeightedWord>& v, int max_distance) {
    std::vector<std::string> out;
    for (const auto& w : v)
      if (w.distance <= max_distance) push_unique(out, w.word);
    return out;
  }

  std::vector<std::string> cohyponyms_of(const KbEntry& e) const {
    std::vector<std::string> out = e.cohyponyms;
    std::vector<std::string> parents;
    for (const auto& h : e.hypernyms)
      if (h.distance == 1) parents.push_back(h.word);
    auto related = [&](const std::string& w) {
      if (w == e.lemma) return true;
      if (std::find(e.synonyms.begin(), e.synonyms.end(), w) != e.synonyms.end()) return true;
      for (const auto* l : {&e.hypernyms, &e.hyponyms})
        for (const auto& x : *l)
          if (x.word == w) return true;
      return false;
    };
    for (const auto& p : parents) {
      if (const auto* pe = find(p, e.pos))
        for (const auto& h : pe->hyponyms)
          if (h.distance == 1 && !related(h.word)) push_unique(out, h.word);
      for (const auto& key : order_) {
        const auto& other = entries_.at(key);
        if (other.pos != e.pos || related(other.lemma)) continue;
        for (const auto& h : other.hypernyms)
          if (h.distance == 1 && h.word == p) push_unique(out, other.lemma);
      }
    }
    return out;
  }

  template <typename F>
  std::vector<std::string> with_plural_fallback(std::string_view lemma, Pos pos, F&& f) const {
    if (const auto* e = find(lemma, pos)) return f(*e);
    if (pos == Pos::kNoun) {
      const auto sg = text::singularize(lemma);
      if (sg != lemma)
        if (const auto* e = find(sg, pos)) {
          auto words = f(*e);
          for (auto& w : words) w = text::pluralize(w);
          return words;
        }
    }
    return {};
  }

  std::map<std::pair<std::string, Pos>, KbEntry> entries_;
  std::vector<std::pair<std::string, Pos>> order_;
  std::vector<NegationPhrase> negation_phrases_;
  std::vector<InsertionItem> inventory_;
};

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* key,
                                            const std::string& where) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw InputError(where + ": field \"" + key + "\" must be an array");
  for (const auto& v : j.at(key)) {
    if (!v.is_string()) throw InputError(where + ": field \"" + key + "\" must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

inline std::vector<WeightedWord> weighted_list(const nlohmann::json& j, const char* key,
                                               const std::string& where) {
  std::vector<WeightedWord> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw InputError(where + ": field \"" + key + "\" must be an array");
  for (const auto& v : j.at(key)) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_number_integer())
      throw InputError(where + ": field \"" + key + "\" entries must be [word, distance]");
    const int d = v[1].get<int>();
    if (d < 1)
      throw InputError(where + ": field \"" + key + "\": distance must be >= 1, got " +
                       std::to_string(d));
    out.push_back({v[0].get<std::string>(), d});
  }
  return out;
}

}  // namespace detail

/// Parses one KB record; `where` locates errors.
inline KbEntry kb_entry_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": record must be a JSON object");
  if (!j.contains("lemma") || !j.at("lemma").is_string())
    throw InputError(where + ": field \"lemma\" must be a string");
  if (!j.contains("pos") || !j.at("pos").is_string())
    throw InputError(where + ": field \"pos\" must be a string");
  KbEntry e;
  e.lemma = j.at("lemma").get<std::string>();
  auto pos = parse_pos(j.at("pos").get<std::string>());
  if (!pos) throw InputError(where + ": field \"pos\": unknown tag " + j.at("pos").dump());
  e.pos = *pos;
  e.synonyms = detail::string_list(j, "syn", where);
  e.hypernyms = detail::weighted_list(j, "hyper", where);
  e.hyponyms = detail::weighted_list(j, "hypo", where);
  e.antonyms = detail::string_list(j, "anto", where);
  e.cohyponyms = detail::string_list(j, "cohypo", where);
  return e;
}

/// Loads a JSON-lines KB export. Duplicate (lemma, pos) records are merged.
inline LexicalKB load_kb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open KB file " + path);
  LexicalKB kb;
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
    try {
      kb.add(kb_entry_from_json(j, where), false);
    } catch (const InputError& e) {
      const std::string msg = e.what();
      throw InputError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
    }
  }
  kb.close();
  return kb;
}

/// Loads an inventory file: one `kind<TAB>text` entry per line, kind one of
/// adj, adv, pp-noun, pp-verb, verb-negator, assertion-prefix. Lines starting
/// with '#' are comments. Negation kinds present in the file replace the
/// defaults of that kind.
inline void load_inventory(LexicalKB& kb, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open inventory file " + path);
  std::vector<NegationPhrase> verb_neg, prefixes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab + 1 >= line.size())
      throw InputError(path + ":" + std::to_string(lineno) + ": expected <kind>\\t<text>");
    const auto kind = line.substr(0, tab);
    auto entry = line.substr(tab + 1);
    if (kind == "adj") kb.add_insertion({entry, Attachment::kAdjective});
    else if (kind == "adv") kb.add_insertion({entry, Attachment::kAdverb});
    else if (kind == "pp-noun") kb.add_insertion({entry, Attachment::kNounPP});
    else if (kind == "pp-verb") kb.add_insertion({entry, Attachment::kVerbPP});
    else if (kind == "verb-negator") verb_neg.push_back({entry, NegationKind::kVerbNegator});
    else if (kind == "assertion-prefix") prefixes.push_back({entry, NegationKind::kAssertionPrefix});
    else
      throw InputError(path + ":" + std::to_string(lineno) + ": unknown attachment kind \"" + kind + "\"");
  }
  if (!verb_neg.empty() || !prefixes.empty()) {
    std::vector<NegationPhrase> merged;
    const auto& current = kb.negation_phrases();
    for (const auto& p : verb_neg.empty() ? current : verb_neg)
      if (p.kind == NegationKind::kVerbNegator) merged.push_back(p);
    for (const auto& p : prefixes.empty() ? current : prefixes)
      if (p.kind == NegationKind::kAssertionPrefix) merged.push_back(p);
    kb.set_negation_phrases(std::move(merged));
  }
}

}  // namespace natlog
