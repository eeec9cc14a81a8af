#pragma once

// Heuristic lemma/POS tagger for raw sentences: closed-class word lists, the
// lexical KB and inventories for content words, suffix and position rules
// for the rest. Good enough to feed the built-in annotator on short
// declaratives; real parser output can bypass it via annotation files.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "natlog/annotation.hpp"
#include "natlog/lexical_kb.hpp"
#include "natlog/text.hpp"

namespace natlog {

namespace detail {

inline const std::set<std::string, std::less<>>& determiners() {
  static const std::set<std::string, std::less<>> s = {
      "a",    "an",   "the",  "all",   "every", "each",  "some",  "no",    "many",
      "few",  "several", "any", "most", "both", "this",  "these", "those", "two",
      "three", "four", "five", "his",  "her",  "my",    "their", "its",   "our", "your"};
  return s;
}

inline const std::set<std::string, std::less<>>& prepositions() {
  static const std::set<std::string, std::less<>> s = {
      "in",   "on",     "at",      "with",   "without", "across", "before", "after",
      "of",   "to",     "from",    "by",     "for",     "into",   "under",  "over",
      "near", "behind", "through", "during", "about",   "around", "along",  "inside"};
  return s;
}

inline const std::set<std::string, std::less<>>& function_words() {
  static const std::set<std::string, std::less<>> s = {
      "he",   "she",    "it",     "they",  "i",       "we",      "you",    "him",
      "them", "me",     "us",     "not",   "n't",     "never",   "nobody", "nothing",
      "none", "noone",  "everyone", "everybody", "everything", "someone", "somebody",
      "something", "and", "or",   "but",   "that",    "who",     "which",  "whom",
      "whose", "because", "although", "if", "when",   "while",   "whether", "unless",
      "there", "true",  "false",  "'s"};
  return s;
}

}  // namespace detail

/// Tags one tokenized sentence. `kb` supplies content-word lemmas and tags.
inline std::vector<TaggedToken> tag_tokens(const std::vector<std::string>& words, const LexicalKB& kb) {
  std::vector<TaggedToken> out;
  out.reserve(words.size());
  bool seen_verb = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& surface = words[i];
    const std::string w = text::lower(surface);
    TaggedToken t{surface, w, Pos::kOther};
    const Pos prev = out.empty() ? Pos::kOther : out.back().pos;
    const bool prev_nominal = !out.empty() && (prev == Pos::kNoun ||
                                               detail::function_words().contains(out.back().lemma));

    if (text::is_punct_token(surface)) {
      // stays other
    } else if (w == "'s") {
      // Possessive after a noun, copula after a pronoun.
      if (!out.empty() && prev != Pos::kNoun && !seen_verb) { t.pos = Pos::kVerb; t.lemma = "be"; seen_verb = true; }
    } else if (detail::is_aux_lemma(w) && w != "'s") {
      t.pos = Pos::kVerb;
      seen_verb = true;
    } else if (detail::function_words().contains(w)) {
      // other
    } else if (detail::determiners().contains(w)) {
      t.pos = Pos::kDet;
    } else if (detail::prepositions().contains(w)) {
      t.pos = Pos::kPrep;
    } else {
      auto known = [&](const std::string& lemma) { return !kb.tags_of(lemma).empty(); };
      std::vector<std::pair<std::string, Pos>> options;
      for (auto p : kb.tags_of(w)) options.emplace_back(w, p);
      const auto sg = text::singularize(w);
      if (sg != w && kb.find(sg, Pos::kNoun)) options.emplace_back(sg, Pos::kNoun);
      const auto vl = text::verb_lemma(w, known);
      if (vl != w && kb.find(vl, Pos::kVerb)) options.emplace_back(vl, Pos::kVerb);
      if (kb.in_inventory(w, Attachment::kAdjective)) options.emplace_back(w, Pos::kAdj);
      if (kb.in_inventory(w, Attachment::kAdverb)) options.emplace_back(w, Pos::kAdv);

      // After a determiner/adjective/preposition expect nominal material;
      // after the subject, before any verb, expect the verb.
      std::vector<Pos> pref;
      const bool next_nominal_slot = prev == Pos::kDet || prev == Pos::kAdj || prev == Pos::kPrep;
      if (next_nominal_slot) pref = {Pos::kAdj, Pos::kNoun, Pos::kVerb, Pos::kAdv};
      else if (prev_nominal && !seen_verb) pref = {Pos::kVerb, Pos::kNoun, Pos::kAdj, Pos::kAdv};
      else pref = {Pos::kNoun, Pos::kVerb, Pos::kAdj, Pos::kAdv};
      if (next_nominal_slot && i + 1 < words.size()) {
        // "a water bird": a noun/adj followed by a noun is a modifier; a lone
        // one before a verb or the end is the head noun.
        const auto nl = text::lower(words[i + 1]);
        const bool next_is_head = !kb.tags_of(nl).empty() || kb.find(text::singularize(nl), Pos::kNoun);
        if (!next_is_head) pref = {Pos::kNoun, Pos::kAdj, Pos::kVerb, Pos::kAdv};
      }
      bool chosen = false;
      for (auto p : pref) {
        for (const auto& [lemma, tag] : options)
          if (tag == p) { t.lemma = lemma; t.pos = tag; chosen = true; break; }
        if (chosen) break;
      }
      if (!chosen) {
        if (w.size() > 3 && w.ends_with("ly") && !next_nominal_slot) t.pos = Pos::kAdv;
        else if (w.size() > 4 && w.ends_with("ing") && !out.empty() && detail::is_aux_lemma(out.back().lemma)) {
          t.pos = Pos::kVerb;
          t.lemma = text::verb_lemma(w, known);
        }
        else if (text::is_capitalized(surface) && i > 0) { t.pos = Pos::kNoun; }
        else if (prev_nominal && !seen_verb && !next_nominal_slot) {
          t.pos = Pos::kVerb;
          t.lemma = text::verb_lemma(w, known);
        } else {
          t.pos = Pos::kNoun;
          t.lemma = text::is_capitalized(surface) ? w : sg;
        }
      }
      if (t.pos == Pos::kVerb) seen_verb = true;
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<TaggedToken> tag_text(std::string_view sentence, const LexicalKB& kb) {
  return tag_tokens(text::tokenize(sentence), kb);
}

/// Convenience: tokenize, tag, and annotate a raw sentence.
inline AnnotatedSentence annotate_text(std::string_view sentence, const LexicalKB& kb,
                                       const PolarityLexicon& lex, const ProjectivityTable& table) {
  return annotate(tag_text(sentence, kb), lex, table);
}

}  // namespace natlog
