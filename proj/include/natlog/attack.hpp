#pragma once

// Attack strategies, the query-budgeted attack loop and its trace.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "natlog/adapters.hpp"
#include "natlog/annotation.hpp"
#include "natlog/error.hpp"
#include "natlog/generation.hpp"
#include "natlog/lexical_kb.hpp"
#include "natlog/quality.hpp"
#include "natlog/relation.hpp"

namespace natlog {

enum class AttackMode : std::uint8_t { kLabelPreserving, kLabelFlipping };

constexpr std::string_view to_string(AttackMode m) {
  return m == AttackMode::kLabelPreserving ? "label-preserving" : "label-flipping";
}

struct AttackStrategy {
  NliLabel source_label = NliLabel::kEntailment;
  NliLabel target_label = NliLabel::kEntailment;
  RelationSet target_relations;
  AttackMode mode = AttackMode::kLabelPreserving;
  /// Candidates are generated toward target_relations and then negated.
  bool via_negated_hypothesis = false;
};

/// Target relations between the original hypothesis H and the generated H*
/// for an attack that turns gold label y_g into y_target.
inline AttackStrategy strategy_for(NliLabel y_g, NliLabel y_target) {
  using R = Relation;
  using L = NliLabel;
  AttackStrategy s;
  s.source_label = y_g;
  s.target_label = y_target;
  s.mode = y_g == y_target ? AttackMode::kLabelPreserving : AttackMode::kLabelFlipping;
  auto name = [&] {
    return std::string(to_string(y_g)) + " -> " + std::string(to_string(y_target));
  };
  if (y_g == L::kEntailment && y_target == L::kEntailment) s.target_relations = {R::kEquivalence, R::kForward};
  else if (y_g == L::kContradiction && y_target == L::kContradiction)
    s.target_relations = {R::kEquivalence, R::kReverse};
  else if (y_g == L::kNeutral && y_target == L::kNeutral) s.target_relations = {R::kEquivalence, R::kReverse};
  else if (y_g == L::kEntailment && y_target == L::kContradiction)
    s.target_relations = {R::kNegation, R::kAlternation};
  else if (y_g == L::kEntailment && y_target == L::kNeutral) s.target_relations = {R::kReverse};
  else if (y_g == L::kContradiction && y_target == L::kEntailment) {
    s.target_relations = {R::kEquivalence, R::kReverse};
    s.via_negated_hypothesis = true;
  } else if (y_g == L::kContradiction) {
    throw ConstraintError("attack " + name() +
                          " is not permitted: a hypothesis derived from a contradictory one cannot be "
                          "guaranteed to be neutral");
  } else {
    throw ConstraintError("attack " + name() +
                          " is not permitted: from a neutral pair the target label cannot be reliably "
                          "derived by natural logic");
  }
  return s;
}

/// Relation between H and the hypothesis actually shown to the victim.
inline Relation final_relation(Relation chain, bool negated) {
  return negated ? join(chain, Relation::kNegation) : chain;
}

/// True when every premise-hypothesis relation carrying the source label,
/// composed with `h_to_hstar`, carries the target label.
inline bool symbolically_valid(const AttackStrategy& s, Relation h_to_hstar) {
  for (auto r0 : kCanonicalRelations) {
    if (to_nli_label(r0) != s.source_label) continue;
    if (to_nli_label(join(r0, h_to_hstar)) != s.target_label) return false;
  }
  return true;
}

/// Relations a further edit may claim so that its composition with the
/// current chain stays within the strategy's target relations.
inline RelationSet retarget(const AttackStrategy& s, Relation chain) {
  RelationSet out;
  for (auto r : kGenerativeRelations)
    if (s.target_relations.contains(join(chain, r))) out.insert(r);
  return out;
}

/// Index of the smallest probability, earliest on ties.
inline std::size_t select_next_seed(const std::vector<double>& target_probs) {
  if (target_probs.empty()) throw InputError("select_next_seed: no attempts");
  std::size_t best = 0;
  for (std::size_t j = 1; j < target_probs.size(); ++j)
    if (target_probs[j] < target_probs[best]) best = j;
  return best;
}

struct AttackConfig {
  int max_total_attacks = 500;
  std::size_t candidate_cap = kDefaultCandidateCap;
  int hypernym_depth = kDefaultMaxDistance;
  std::uint64_t random_seed = 0;
  std::size_t per_op_cap = 50;
  int lm_k = 10;
  /// Restricts generated edits to these kinds; empty allows all.
  std::vector<EditKind> edit_kinds;

  void validate() const {
    if (max_total_attacks < 1) throw InputError("max_total_attacks must be at least 1");
    if (candidate_cap < 1) throw InputError("candidate_cap must be at least 1");
    if (hypernym_depth < 1) throw InputError("hypernym_depth must be at least 1");
    if (lm_k < 0) throw InputError("lm_k must be non-negative");
  }
};

struct TraceRecord {
  int round = 1;
  int query = 0;
  std::string hypothesis;
  EditOp edit;
  bool negated = false;
  Relation relation = Relation::kEquivalence;
  bool valid = false;
  double pppl = 0;
  VictimPrediction prediction;
  bool success = false;
};

inline nlohmann::ordered_json to_json(const TraceRecord& t) {
  nlohmann::ordered_json j;
  j["round"] = t.round;
  j["query"] = t.query;
  j["hypothesis"] = t.hypothesis;
  j["edit"] = to_json(t.edit);
  j["negated"] = t.negated;
  j["relation"] = to_string(t.relation);
  j["valid"] = t.valid;
  j["pppl"] = t.pppl;
  j["label"] = to_string(t.prediction.label);
  j["probs"] = to_json(t.prediction)["probs"];
  j["success"] = t.success;
  return j;
}

struct AttackResult {
  bool success = false;
  bool skipped = false;
  std::string reason;
  std::optional<std::string> adversarial_hypothesis;
  std::optional<NliLabel> predicted_label;
  int query_count = 0;
  int rounds = 0;
  VictimPrediction original;
  std::vector<TraceRecord> trace;

  /// The successful attempt, if any.
  const TraceRecord* winner() const { return success && !trace.empty() ? &trace.back() : nullptr; }
};

inline nlohmann::ordered_json to_json(const AttackResult& r) {
  nlohmann::ordered_json j;
  j["success"] = r.success;
  j["skipped"] = r.skipped;
  j["reason"] = r.reason;
  j["adversarial_hypothesis"] = r.adversarial_hypothesis ? nlohmann::ordered_json(*r.adversarial_hypothesis)
                                                         : nlohmann::ordered_json(nullptr);
  j["predicted_label"] = r.predicted_label ? nlohmann::ordered_json(to_string(*r.predicted_label))
                                           : nlohmann::ordered_json(nullptr);
  j["query_count"] = r.query_count;
  j["rounds"] = r.rounds;
  j["original_prediction"] = to_json(r.original);
  if (const auto* w = r.winner()) {
    j["edit"] = to_json(w->edit);
    j["relation"] = to_string(w->relation);
    j["symbolically_valid"] = w->valid;
    j["pppl"] = w->pppl;
  }
  return j;
}

/// Read-only linguistic resources shared by attack sessions.
struct AttackResources {
  const LexicalKB& kb;
  const PolarityLexicon& lexicon;
  const ProjectivityTable& table;
};

namespace detail {

struct Attempt {
  std::string text;
  AnnotatedSentence base;
  EditOp edit;
  /// Chain relation from H to `base`.
  Relation chain = Relation::kEquivalence;
  bool negated = false;
  /// The attempt is the seed itself under negation; base carries no edit.
  bool wrap_only = false;
};

}  // namespace detail

/// Attacks one premise-hypothesis pair. The screening query on the original
/// pair is not counted; every candidate query is, up to max_total_attacks.
/// A round queries its ranked candidates in order; if none succeeds, the
/// candidate giving the target label the lowest probability seeds the next
/// round.
inline AttackResult run_attack(std::string_view premise, const AnnotatedSentence& hypothesis, NliLabel y_g,
                               NliLabel y_target, const AttackConfig& cfg, VictimAdapter& victim, LmAdapter& lm,
                               const AttackResources& res) {
  cfg.validate();
  const auto strategy = strategy_for(y_g, y_target);
  AttackResult result;
  result.original = victim.predict(premise, hypothesis.text());
  validate(result.original);
  if (result.original.label != y_g) {
    result.skipped = true;
    result.reason = "victim misclassified the original pair";
    return result;
  }

  GenerationContext gctx{res.kb, res.lexicon, res.table, &lm,
                         GenerationConfig{cfg.per_op_cap, cfg.hypernym_depth, cfg.lm_k, cfg.edit_kinds}};
  AnnotatedSentence seed = hypothesis;
  Relation seed_chain = Relation::kEquivalence;
  std::set<std::size_t> forbidden;
  std::unordered_set<std::string> queried = {hypothesis.text()};

  for (int round = 1;; ++round) {
    result.rounds = round;
    const auto targets = retarget(strategy, seed_chain);
    auto cands = targets.empty() ? std::vector<CandidateHypothesis>{}
                                 : generate_candidates(seed, targets, gctx, forbidden);

    std::vector<detail::Attempt> attempts;
    std::unordered_set<std::string> in_round;
    auto add = [&](detail::Attempt a) {
      if (queried.contains(a.text) || !in_round.insert(a.text).second) return;
      attempts.push_back(std::move(a));
    };
    if (strategy.via_negated_hypothesis) {
      for (auto& w : wrap_in_prefixes(seed, gctx))
        add({w.text(), seed, w.edit, seed_chain, true, true});
      for (const auto& c : cands)
        for (auto& w : wrap_in_prefixes(c.sentence, gctx))
          add({w.text(), c.sentence, c.edit, join(seed_chain, c.edit.claimed_relation), true, false});
    } else {
      for (auto& c : cands) {
        auto t = c.text();
        add({std::move(t), std::move(c.sentence), c.edit, join(seed_chain, c.edit.claimed_relation), false, false});
      }
    }

    std::vector<Scored<detail::Attempt>> scored;
    scored.reserve(attempts.size());
    for (auto& a : attempts) {
      const double p = pseudo_perplexity(a.text, lm);
      scored.push_back({std::move(a), p});
    }
    auto ranked = rank_and_filter(std::move(scored), cfg.candidate_cap);
    if (ranked.empty()) {
      result.reason = round == 1 ? "no candidates" : "candidates exhausted";
      return result;
    }

    // Identity wraps re-seed nothing new, so they are not seed candidates.
    std::vector<double> target_probs;
    std::vector<std::size_t> seed_index;
    for (std::size_t idx = 0; idx < ranked.size(); ++idx) {
      const auto& [a, pppl] = ranked[idx];
      if (result.query_count >= cfg.max_total_attacks) {
        result.reason = "query budget exhausted";
        return result;
      }
      const auto pred = victim.predict(premise, a.text);
      validate(pred);
      queried.insert(a.text);
      TraceRecord rec;
      rec.round = round;
      rec.query = ++result.query_count;
      rec.hypothesis = a.text;
      rec.edit = a.edit;
      rec.negated = a.negated;
      rec.relation = final_relation(a.chain, a.negated);
      rec.valid = symbolically_valid(strategy, rec.relation);
      if (!rec.valid)
        throw InvariantError("candidate \"" + a.text + "\" claims " + std::string(to_string(rec.relation)) +
                             ", which does not yield the target label");
      rec.pppl = pppl;
      rec.prediction = pred;
      rec.success = pred.label != y_target;
      result.trace.push_back(rec);
      if (rec.success) {
        result.success = true;
        result.adversarial_hypothesis = a.text;
        result.predicted_label = pred.label;
        result.reason = "victim fooled";
        return result;
      }
      if (!a.wrap_only) {
        target_probs.push_back(pred.prob(y_target));
        seed_index.push_back(idx);
      }
    }
    if (result.query_count >= cfg.max_total_attacks) {
      result.reason = "query budget exhausted";
      return result;
    }

    if (seed_index.empty()) {
      result.reason = "candidates exhausted";
      return result;
    }
    auto& next = ranked[seed_index[select_next_seed(target_probs)]].item;
    std::set<std::size_t> moved;
    for (auto i : forbidden)
      if (auto j = next.edit.map_position(i)) moved.insert(*j);
    if (is_alternation_edit(next.edit.kind))
      for (std::size_t k = 0; k < next.edit.new_length; ++k) moved.insert(next.edit.span_start + k);
    forbidden = std::move(moved);
    seed = std::move(next.base);
    seed_chain = next.chain;
  }
}

/// One JSON line per attempt.
inline std::string trace_jsonl(const AttackResult& r) {
  std::string out;
  for (const auto& t : r.trace) out += to_json(t).dump() + "\n";
  return out;
}

}  // namespace natlog
