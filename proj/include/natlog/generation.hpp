#pragma once

// Candidate generation: substitution, insertion, deletion and negation edits
// chosen per token by reverse projection of the target relations.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "natlog/adapters.hpp"
#include "natlog/annotation.hpp"
#include "natlog/error.hpp"
#include "natlog/lexical_kb.hpp"
#include "natlog/relation.hpp"
#include "natlog/tagger.hpp"
#include "natlog/text.hpp"

namespace natlog {

/// The ten edit functions, in dispatch order.
enum class EditKind : std::uint8_t {
  kSyno,
  kDoubleNeg,
  kHyper,
  kDelete,
  kHypo,
  kInsert,
  kCoHyper,
  kAnto,
  kAltLm,
  kAddNeg,
};

inline constexpr std::array<std::string_view, 10> kEditKindNames = {
    "syno", "double_neg", "hyper", "delete", "hypo", "insert", "cohyper", "anto", "alt_lm", "add_neg"};

constexpr std::string_view to_string(EditKind k) { return kEditKindNames[static_cast<std::size_t>(k)]; }

inline std::optional<EditKind> parse_edit_kind(std::string_view s) {
  for (std::size_t i = 0; i < kEditKindNames.size(); ++i)
    if (kEditKindNames[i] == s) return static_cast<EditKind>(i);
  return std::nullopt;
}

/// Alternation edits: their positions may not be edited again.
constexpr bool is_alternation_edit(EditKind k) {
  return k == EditKind::kCoHyper || k == EditKind::kAnto || k == EditKind::kAltLm;
}

struct EditOp {
  EditKind kind = EditKind::kSyno;
  /// Token whose projection licensed the edit. Root edits (sentence
  /// prefixes) use position 0 and an upward identity context.
  std::size_t position = 0;
  bool root = false;
  /// Source tokens [span_start, span_end) are replaced by new_length tokens.
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::size_t new_length = 0;
  std::string replacement;
  Relation local_relation = Relation::kEquivalence;
  Relation claimed_relation = Relation::kEquivalence;
  Polarity context = Polarity::kUp;

  /// Where a source token index lands after the edit; nullopt if removed.
  std::optional<std::size_t> map_position(std::size_t i) const {
    if (i < span_start) return i;
    if (i >= span_end) return i - (span_end - span_start) + new_length;
    return std::nullopt;
  }
};

inline nlohmann::ordered_json to_json(const EditOp& e) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(e.kind);
  j["position"] = e.position;
  j["root"] = e.root;
  j["span"] = {e.span_start, e.span_end};
  j["new_length"] = e.new_length;
  j["replacement"] = e.replacement;
  j["local"] = to_string(e.local_relation);
  j["claimed"] = to_string(e.claimed_relation);
  j["polarity"] = to_string(e.context);
  return j;
}

struct CandidateHypothesis {
  AnnotatedSentence sentence;
  EditOp edit;
  int round = 1;

  std::string text() const { return sentence.text(); }
};

struct GenerationConfig {
  std::size_t per_op_cap = 50;
  int max_distance = kDefaultMaxDistance;
  int lm_k = 10;
  /// Edit kinds to keep; empty keeps all.
  std::vector<EditKind> edit_kinds;

  bool allows(EditKind k) const {
    return edit_kinds.empty() || std::find(edit_kinds.begin(), edit_kinds.end(), k) != edit_kinds.end();
  }
};

/// Read-only resources for generation. `lm` may be null, which disables the
/// language-model backed edits.
struct GenerationContext {
  const LexicalKB& kb;
  const PolarityLexicon& lexicon;
  const ProjectivityTable& table;
  LmAdapter* lm = nullptr;
  GenerationConfig config{};
};

namespace detail {

inline bool editable_content(const AnnotatedToken& t) {
  return is_content(t.pos) && !is_aux_lemma(text::lower(t.surface));
}

inline std::vector<TaggedToken> tagged(const AnnotatedSentence& s) {
  std::vector<TaggedToken> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back({t.surface, t.lemma, t.pos});
  return out;
}

/// Tokens for an inserted or substituted phrase. Closed-class words keep
/// their class, everything else takes `head_pos`.
inline std::vector<TaggedToken> phrase_tokens(std::string_view phrase, std::string_view lemma, Pos head_pos) {
  auto words = text::tokenize(phrase);
  std::vector<TaggedToken> out;
  for (const auto& w : words) {
    const auto l = text::lower(w);
    Pos p = head_pos;
    if (determiners().contains(l)) p = Pos::kDet;
    else if (prepositions().contains(l)) p = Pos::kPrep;
    else if (function_words().contains(l) || text::is_punct_token(w)) p = Pos::kOther;
    out.push_back({w, words.size() == 1 ? std::string(lemma) : l, p});
  }
  return out;
}

/// Nouns keep their capital when displaced from the front unless plural.
inline bool keeps_capital(const TaggedToken& t) {
  return t.pos == Pos::kNoun && text::detect_noun_form(t.surface, t.lemma) != text::Form::kPlural &&
         text::lower(t.surface) != text::pluralize(t.lemma);
}

inline std::size_t clause_end(const AnnotatedSentence& s) {
  std::size_t e = s.tokens.size();
  while (e > 0 && text::is_punct_token(s.tokens[e - 1].surface)) --e;
  return e;
}

inline std::optional<std::size_t> main_verb(const AnnotatedSentence& s) {
  for (const auto& c : s.constituents)
    if (c.label == "VP") return c.start;
  for (std::size_t i = 0; i < s.tokens.size(); ++i)
    if (s.tokens[i].pos == Pos::kVerb) return i;
  return std::nullopt;
}

}  // namespace detail

/// Applies one splice to h1 and re-annotates the result. Sentence-initial
/// capitalization follows the new first token and a/an agreement is
/// repaired.
inline AnnotatedSentence realize(const AnnotatedSentence& h1, std::size_t span_start, std::size_t span_end,
                                 std::vector<TaggedToken> replacement, const GenerationContext& ctx) {
  auto src = detail::tagged(h1);
  const bool initial_cap = !src.empty() && text::is_capitalized(src.front().surface);
  if (span_start == 0 && initial_cap && span_end == 0 && !replacement.empty() &&
      !detail::keeps_capital(src.front()))
    src.front().surface = text::decapitalize(src.front().surface);
  std::vector<TaggedToken> toks(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(span_start));
  toks.insert(toks.end(), replacement.begin(), replacement.end());
  toks.insert(toks.end(), src.begin() + static_cast<std::ptrdiff_t>(span_end), src.end());
  if (toks.empty()) throw InvariantError("realize: edit removed every token");
  if (initial_cap && span_start == 0) toks.front().surface = text::capitalize(toks.front().surface);

  std::vector<std::string> surfaces;
  for (const auto& t : toks) surfaces.push_back(t.surface);
  text::fix_articles(surfaces);
  for (std::size_t i = 0; i < toks.size(); ++i) toks[i].surface = surfaces[i];
  return annotate(toks, ctx.lexicon, ctx.table);
}

namespace detail {

/// Accumulates candidates from one source sentence.
class Emitter {
 public:
  Emitter(const AnnotatedSentence& h1, const GenerationContext& ctx) : h1_(h1), ctx_(ctx) {}

  void emit(EditOp op, std::size_t span_start, std::size_t span_end, std::vector<TaggedToken> repl) {
    op.span_start = span_start;
    op.span_end = span_end;
    op.new_length = repl.size();
    if (op.replacement.empty()) {
      std::vector<std::string> s;
      for (const auto& t : repl) s.push_back(t.surface);
      op.replacement = text::detokenize(s);
    }
    out_.push_back({realize(h1_, span_start, span_end, std::move(repl), ctx_), op, 1});
  }

  std::vector<CandidateHypothesis> take() { return std::move(out_); }

 private:
  const AnnotatedSentence& h1_;
  const GenerationContext& ctx_;
  std::vector<CandidateHypothesis> out_;
};

inline EditOp make_op(EditKind kind, const AnnotatedSentence& h1, std::size_t i, Relation local) {
  EditOp op;
  op.kind = kind;
  op.position = i;
  op.local_relation = local;
  op.context = h1.tokens[i].polarity;
  op.claimed_relation = h1.tokens[i].projection[index_of(local)];
  return op;
}

inline EditOp root_op(EditKind kind, Relation local) {
  EditOp op;
  op.kind = kind;
  op.root = true;
  op.local_relation = local;
  op.claimed_relation = local;
  return op;
}

/// Surface form of `word` matching the inflection and casing of token i.
inline std::string match_form(const AnnotatedSentence& h1, std::size_t i, const std::string& word) {
  const auto& t = h1.tokens[i];
  std::string out = word;
  if (t.pos == Pos::kNoun && text::detect_noun_form(t.surface, t.lemma) == text::Form::kPlural)
    out = text::pluralize(word);
  else if (t.pos == Pos::kVerb)
    out = text::inflect(word, text::detect_verb_form(t.surface, t.lemma));
  if (i == 0 && text::is_capitalized(t.surface)) out = text::capitalize(out);
  return out;
}

}  // namespace detail

/// One candidate per word replacing token i; words are lemmas from the KB.
inline std::vector<CandidateHypothesis> perturb_substitution(const AnnotatedSentence& h1, std::size_t i,
                                                             const std::vector<std::string>& words,
                                                             EditKind kind, Relation local,
                                                             const GenerationContext& ctx) {
  detail::Emitter em(h1, ctx);
  std::size_t n = 0;
  for (const auto& w : words) {
    if (n++ >= ctx.config.per_op_cap) break;
    const auto surface = detail::match_form(h1, i, w);
    if (text::lower(surface) == text::lower(h1.tokens[i].surface)) continue;
    em.emit(detail::make_op(kind, h1, i, local), i, i + 1,
            detail::phrase_tokens(surface, w, h1.tokens[i].pos));
  }
  return em.take();
}

/// Masks token i and keeps language-model fillers with the same POS and a
/// different lemma, as alternations.
inline std::vector<CandidateHypothesis> alt_lm(const AnnotatedSentence& h1, std::size_t i,
                                               const GenerationContext& ctx) {
  if (!ctx.lm || ctx.config.lm_k <= 0) return {};
  auto surfaces = h1.surfaces();
  surfaces[i] = std::string(kMask);
  MlmResponse resp;
  try {
    resp = ctx.lm->fill(text::detokenize(surfaces), ctx.config.lm_k);
  } catch (const Error& e) {
    warn(std::string("alt_lm: language model unavailable, skipping: ") + e.what());
    return {};
  }
  const auto& t = h1.tokens[i];
  std::vector<std::string> words;
  for (const auto& f : resp.fillers) {
    const auto w = text::lower(f.word);
    if (f.pos != t.pos || w == t.lemma || w == text::lower(t.surface)) continue;
    if (text::is_punct_token(w) || count_masks(w) > 0) continue;
    words.push_back(f.word);
  }
  detail::Emitter em(h1, ctx);
  std::size_t n = 0;
  for (const auto& w : words) {
    if (n++ >= ctx.config.per_op_cap) break;
    std::string surface = (i == 0 && text::is_capitalized(t.surface)) ? text::capitalize(w) : w;
    em.emit(detail::make_op(EditKind::kAltLm, h1, i, Relation::kAlternation), i, i + 1,
            {{surface, text::lower(w), t.pos}});
  }
  return em.take();
}

namespace detail {

/// Inventory words plus masked-LM fillers of the wanted POS for a gap at
/// token index `at`.
inline std::vector<std::string> gap_words(const AnnotatedSentence& h1, std::size_t at, Attachment a, Pos pos,
                                          const GenerationContext& ctx) {
  std::vector<std::string> words = ctx.kb.insertions(a);
  if (ctx.lm && ctx.config.lm_k > 0) {
    auto surfaces = h1.surfaces();
    surfaces.insert(surfaces.begin() + static_cast<std::ptrdiff_t>(at), std::string(kMask));
    try {
      for (const auto& f : ctx.lm->fill(text::detokenize(surfaces), ctx.config.lm_k).fillers)
        if (f.pos == pos && std::find(words.begin(), words.end(), text::lower(f.word)) == words.end())
          words.push_back(text::lower(f.word));
    } catch (const Error& e) {
      warn(std::string("insertion: language model unavailable, inventory only: ") + e.what());
    }
  }
  auto near = [&](std::size_t k, const std::string& w) {
    return k < h1.tokens.size() && text::lower(h1.tokens[k].surface) == w;
  };
  std::erase_if(words, [&](const std::string& w) { return near(at, w) || (at > 0 && near(at - 1, w)); });
  return words;
}

}  // namespace detail

/// Inserts a restrictive modifier licensed by token i: adjectives before a
/// head noun, adverbs after a main verb, noun PPs after a noun phrase, verb
/// PPs at the end of the clause headed by i.
inline std::vector<CandidateHypothesis> insertion(const AnnotatedSentence& h1, std::size_t i,
                                                  const GenerationContext& ctx) {
  detail::Emitter em(h1, ctx);
  const auto& t = h1.tokens[i];
  const std::size_t n = h1.tokens.size();
  const auto op = detail::make_op(EditKind::kInsert, h1, i, Relation::kReverse);
  auto emit_all = [&](const std::vector<std::string>& items, std::size_t at, Pos pos) {
    std::size_t count = 0;
    for (const auto& item : items) {
      if (count++ >= ctx.config.per_op_cap) break;
      std::vector<TaggedToken> toks;
      if (pos == Pos::kPrep) toks = tag_text(item, ctx.kb);
      else toks = detail::phrase_tokens(item, item, pos);
      em.emit(op, at, at, std::move(toks));
    }
  };

  const bool head_noun = t.pos == Pos::kNoun && (i + 1 >= n || h1.tokens[i + 1].pos != Pos::kNoun);
  if (head_noun) {
    std::size_t at = i;
    while (at > 0 && (h1.tokens[at - 1].pos == Pos::kNoun || h1.tokens[at - 1].pos == Pos::kAdj)) --at;
    emit_all(detail::gap_words(h1, at, Attachment::kAdjective, Pos::kAdj, ctx), at, Pos::kAdj);
    const bool np_final = std::any_of(h1.constituents.begin(), h1.constituents.end(), [&](const Constituent& c) {
      return c.label == "NP" && c.end == i + 1;
    });
    if (np_final) emit_all(ctx.kb.insertions(Attachment::kNounPP), i + 1, Pos::kPrep);
  }
  if (detail::editable_content(t) && t.pos == Pos::kVerb) {
    const std::size_t end = detail::clause_end(h1);
    const bool bare = i + 1 >= end || h1.tokens[i + 1].pos == Pos::kPrep;
    const std::size_t at = bare ? i + 1 : end;
    emit_all(detail::gap_words(h1, at, Attachment::kAdverb, Pos::kAdv, ctx), at, Pos::kAdv);
  }
  if (detail::main_verb(h1) == i) emit_all(ctx.kb.insertions(Attachment::kVerbPP), detail::clause_end(h1), Pos::kPrep);
  return em.take();
}

/// Deletes the restrictive modifier at token i: an adjective or noun
/// modifying a following noun, an adverb, or the PP starting at i.
inline std::vector<CandidateHypothesis> deletion(const AnnotatedSentence& h1, std::size_t i,
                                                 const GenerationContext& ctx) {
  detail::Emitter em(h1, ctx);
  const auto& toks = h1.tokens;
  const std::size_t n = toks.size();
  const auto op = detail::make_op(EditKind::kDelete, h1, i, Relation::kForward);
  const bool before_noun = i + 1 < n && (toks[i + 1].pos == Pos::kNoun || toks[i + 1].pos == Pos::kAdj);
  if ((toks[i].pos == Pos::kAdj || toks[i].pos == Pos::kNoun) && before_noun) {
    auto e = op;
    e.replacement = toks[i].surface;
    em.emit(e, i, i + 1, {});
  } else if (toks[i].pos == Pos::kAdv) {
    auto e = op;
    e.replacement = toks[i].surface;
    em.emit(e, i, i + 1, {});
  } else if (toks[i].pos == Pos::kPrep) {
    for (const auto& c : h1.constituents) {
      if (c.label != "PP" || c.start != i || c.end - c.start >= n) continue;
      std::vector<std::string> s;
      for (std::size_t k = c.start; k < c.end; ++k) s.push_back(toks[k].surface);
      auto e = op;
      e.replacement = text::detokenize(s);
      em.emit(e, c.start, c.end, {});
      break;
    }
  }
  return em.take();
}

namespace detail {

struct VerbNegation {
  std::size_t span_start, span_end;
  std::vector<TaggedToken> tokens;
};

inline bool takes_nt(std::string_view aux) {
  static const std::set<std::string, std::less<>> s = {"is", "are", "was", "were", "do", "does", "did",
                                                       "has", "have", "had", "could", "would", "should"};
  return s.contains(aux);
}

/// Negations of the main verb at index v, one per verb negator.
inline std::vector<VerbNegation> verb_negations(const AnnotatedSentence& h1, std::size_t v,
                                                const GenerationContext& ctx) {
  std::vector<VerbNegation> out;
  const auto& toks = h1.tokens;
  const auto& t = toks[v];
  const auto w = text::lower(t.surface);
  const bool aux = is_aux_lemma(w);
  const auto known = [&](const std::string& l) { return !ctx.kb.tags_of(l).empty(); };
  const bool negated_already =
      v + 1 < toks.size() && ctx.lexicon.negators.contains(text::lower(toks[v + 1].surface));
  if (aux && negated_already) {
    // Removing the negation is itself a negation edit.
    out.push_back({v + 1, v + 2, {}});
    return out;
  }
  for (const auto& neg : ctx.kb.negation_phrases(NegationKind::kVerbNegator)) {
    const auto neg_tok = phrase_tokens(neg, text::lower(neg), Pos::kOther);
    if (aux) {
      if (neg == "n't" && !takes_nt(w)) continue;
      out.push_back({v + 1, v + 1, neg_tok});
      continue;
    }
    const auto lemma = t.lemma.empty() ? text::verb_lemma(w, known) : t.lemma;
    const auto form = text::detect_verb_form(t.surface, lemma);
    if (form == text::Form::kGerund) continue;
    if (neg == "never") {
      out.push_back({v, v, neg_tok});
      continue;
    }
    std::string do_form = form == text::Form::kPast ? "did" : form == text::Form::kThirdPerson ? "does" : "do";
    if (v == 0 && text::is_capitalized(t.surface)) do_form = text::capitalize(do_form);
    std::vector<TaggedToken> repl = {{do_form, do_form, Pos::kVerb}};
    repl.insert(repl.end(), neg_tok.begin(), neg_tok.end());
    repl.push_back({lemma, lemma, Pos::kVerb});
    out.push_back({v, v + 1, std::move(repl)});
  }
  return out;
}

inline std::vector<TaggedToken> prefix_tokens(const std::string& prefix) {
  std::vector<TaggedToken> out;
  for (const auto& w : text::tokenize(prefix)) out.push_back({w, text::lower(w), Pos::kOther});
  return out;
}

}  // namespace detail

/// Sentence negation. With `verb_position` set, negates that main verb;
/// otherwise (or when the verb cannot be negated) wraps the sentence in each
/// assertion prefix.
inline std::vector<CandidateHypothesis> add_neg(const AnnotatedSentence& h1, std::optional<std::size_t> verb_position,
                                                const GenerationContext& ctx) {
  detail::Emitter em(h1, ctx);
  std::vector<detail::VerbNegation> forms;
  if (verb_position) forms = detail::verb_negations(h1, *verb_position, ctx);
  for (auto& f : forms) {
    auto op = detail::make_op(EditKind::kAddNeg, h1, *verb_position, Relation::kNegation);
    em.emit(op, f.span_start, f.span_end, std::move(f.tokens));
  }
  if (!verb_position || forms.empty()) {
    for (const auto& p : ctx.kb.negation_phrases(NegationKind::kAssertionPrefix))
      em.emit(detail::root_op(EditKind::kAddNeg, Relation::kNegation), 0, 0, detail::prefix_tokens(p));
  }
  return em.take();
}

/// Wraps every assertion prefix around h1 (a root-level negation of the
/// whole sentence).
inline std::vector<CandidateHypothesis> wrap_in_prefixes(const AnnotatedSentence& h1, const GenerationContext& ctx) {
  return add_neg(h1, std::nullopt, ctx);
}

/// Negates twice: an assertion prefix over each verb negation of h1, or
/// over another prefix when the verb cannot be negated or a quantifier
/// precedes it (verb negation then does not invert the whole clause).
/// Claimed ≡.
inline std::vector<CandidateHypothesis> double_negation(const AnnotatedSentence& h1, const GenerationContext& ctx) {
  std::vector<CandidateHypothesis> inner;
  auto quantified_before = [&](std::size_t v) {
    for (std::size_t i = 0; i < v; ++i)
      if (ctx.lexicon.quantifiers.contains(text::lower(h1.tokens[i].surface))) return true;
    return false;
  };
  if (auto v = detail::main_verb(h1); v && !h1.low_confidence && !quantified_before(*v)) {
    for (auto& c : add_neg(h1, v, ctx))
      if (!c.edit.root) inner.push_back(std::move(c));
  }
  if (inner.empty()) inner = wrap_in_prefixes(h1, ctx);
  std::vector<CandidateHypothesis> out;
  for (const auto& c : inner) {
    for (auto outer : wrap_in_prefixes(c.sentence, ctx)) {
      // One splice covering the prefix and the inner edit.
      EditOp op = detail::root_op(EditKind::kDoubleNeg, Relation::kEquivalence);
      op.span_end = c.edit.span_end;
      op.new_length = outer.edit.new_length + c.edit.span_start + c.edit.new_length;
      op.replacement = outer.edit.replacement + " + " + c.edit.replacement;
      out.push_back({std::move(outer.sentence), op, 1});
    }
  }
  return out;
}

/// Dispatches edits over every token and target relation. Targets
/// must be among ≡ ⊏ ⊐ ∧ |. Results are ordered by edit kind, then token,
/// then generation order, and de-duplicated by surface string.
inline std::vector<CandidateHypothesis> generate_candidates(const AnnotatedSentence& h1, RelationSet targets,
                                                            const GenerationContext& ctx,
                                                            const std::set<std::size_t>& forbidden = {}) {
  targets.for_each([](Relation r) {
    if (r == Relation::kCover || r == Relation::kIndependence)
      throw ConstraintError("generate_candidates: target relation " + std::string(to_string(r)) +
                            " cannot be generated; use equiv, fwd, rev, neg or alt");
  });
  if (h1.tokens.empty()) throw InputError("generate_candidates: empty sentence");

  std::vector<CandidateHypothesis> all;
  auto take = [&](std::vector<CandidateHypothesis> v) {
    for (auto& c : v) all.push_back(std::move(c));
  };
  const auto verb = detail::main_verb(h1);
  const int d = ctx.config.max_distance;
  bool root_double_neg = false, root_prefix = false;

  targets.for_each([&](Relation target) {
    // Root context is upward: sentence-level negation edits apply as-is.
    if (target == Relation::kEquivalence && !root_double_neg) {
      root_double_neg = true;
      take(double_negation(h1, ctx));
    }
    if (target == Relation::kNegation && !root_prefix) {
      root_prefix = true;
      take(wrap_in_prefixes(h1, ctx));
    }
    for (std::size_t i = 0; i < h1.tokens.size(); ++i) {
      if (forbidden.contains(i)) continue;
      const auto& t = h1.tokens[i];
      const auto local = reverse_project(t, target);
      const bool content = detail::editable_content(t);
      const auto lemma = t.lemma.empty() ? text::lower(t.surface) : t.lemma;
      if (local.contains(Relation::kEquivalence) && content)
        take(perturb_substitution(h1, i, ctx.kb.lookup(lemma, t.pos, Relation::kEquivalence, d), EditKind::kSyno,
                                  Relation::kEquivalence, ctx));
      if (local.contains(Relation::kForward)) {
        if (content)
          take(perturb_substitution(h1, i, ctx.kb.lookup(lemma, t.pos, Relation::kForward, d), EditKind::kHyper,
                                    Relation::kForward, ctx));
        take(deletion(h1, i, ctx));
      }
      if (local.contains(Relation::kReverse)) {
        if (content)
          take(perturb_substitution(h1, i, ctx.kb.lookup(lemma, t.pos, Relation::kReverse, d), EditKind::kHypo,
                                    Relation::kReverse, ctx));
        take(insertion(h1, i, ctx));
      }
      if (local.contains(Relation::kAlternation) && content) {
        take(perturb_substitution(h1, i, ctx.kb.cohyponyms(lemma, t.pos), EditKind::kCoHyper,
                                  Relation::kAlternation, ctx));
        take(perturb_substitution(h1, i, ctx.kb.antonyms(lemma, t.pos), EditKind::kAnto, Relation::kAlternation,
                                  ctx));
        take(alt_lm(h1, i, ctx));
      }
      if (local.contains(Relation::kNegation) && verb == i && !h1.low_confidence) {
        for (auto& c : add_neg(h1, i, ctx))
          if (!c.edit.root) all.push_back(std::move(c));
      }
    }
  });

  std::stable_sort(all.begin(), all.end(), [](const CandidateHypothesis& a, const CandidateHypothesis& b) {
    return std::tuple(a.edit.kind, !a.edit.root, a.edit.position) <
           std::tuple(b.edit.kind, !b.edit.root, b.edit.position);
  });
  std::unordered_set<std::string> seen = {h1.text()};
  std::vector<CandidateHypothesis> out;
  for (auto& c : all) {
    const auto s = c.text();
    if (targets.contains(c.edit.claimed_relation) && ctx.config.allows(c.edit.kind) && seen.insert(s).second)
      out.push_back(std::move(c));
  }
  return out;
}

}  // namespace natlog
