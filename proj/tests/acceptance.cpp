// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Runs entirely on the built-in mock
// victim and stub language models.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"

#ifndef NATLOG_GOLDEN_DIR
#define NATLOG_GOLDEN_DIR "tests/golden"
#endif

using namespace natlog;
using natlog::testing::ToyResources;
using natlog::testing::data_path;
using R = Relation;
using L = NliLabel;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const std::vector<std::string> kSetups = {"E2E", "E2C", "E2N", "C2C", "C2E", "N2N"};

std::vector<Setup> all_setups() {
  std::vector<Setup> out;
  for (const auto& s : kSetups) out.push_back(parse_setup(s));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CampaignReport toy_campaign(int parallel, std::optional<fs::path> out = std::nullopt,
                            const std::vector<Setup>& setups = all_setups(), const AttackConfig& cfg = {}) {
  const auto& res = ToyResources::get();
  MockVictim victim(0);
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  return run_campaign(load_dataset(data_path("toy_dataset.jsonl")), setups, cfg, victim, lm, res.attack(),
                      {parallel, std::move(out)});
}

// 1
Outcome join_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = check_join_soundness(3, 5);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << report.triples_checked << " triples over |U| = 3..5, " << report.violations.size() << " violations, "
    << secs << " s";
  return {report.violations.empty() && report.triples_checked > 0 && secs < 60.0, d.str()};
}

// 2
Outcome worked_example() {
  const auto& res = ToyResources::get();
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  GenerationContext ctx{res.kb, res.lexicon, res.table, &lm, {}};
  const auto h = res.annotate("All the kids run");
  auto find = [](const std::vector<CandidateHypothesis>& v, std::string_view t) -> const CandidateHypothesis* {
    for (const auto& c : v)
      if (c.text() == t) return &c;
    return nullptr;
  };
  const auto s1 = generate_candidates(h, {R::kForward}, ctx, {});
  const auto* boys = find(s1, "All the boys run");
  if (!boys) return {false, "no \"All the boys run\" candidate"};
  const auto s2 = generate_candidates(boys->sentence, {R::kAlternation}, ctx, {});
  const auto* sleep = find(s2, "All the boys sleep");
  if (!sleep) return {false, "no \"All the boys sleep\" candidate"};
  const auto total = compose_sequence({boys->edit.claimed_relation, sleep->edit.claimed_relation});
  std::ostringstream d;
  d << "kids->boys local " << to_string(boys->edit.local_relation) << " projected "
    << to_string(boys->edit.claimed_relation) << "; run->sleep local " << to_string(sleep->edit.local_relation)
    << "; composed " << to_string(total) << " -> " << to_string(to_nli_label(total));
  return {boys->edit.local_relation == R::kReverse && boys->edit.claimed_relation == R::kForward &&
              sleep->edit.local_relation == R::kAlternation && total == R::kAlternation &&
              to_nli_label(total) == L::kContradiction,
          d.str()};
}

// 3
Outcome reverse_projection_golden() {
  AnnotatedToken t;
  t.projection = {R::kEquivalence, R::kReverse, R::kForward, R::kNegation, R::kAlternation, R::kCover,
                  R::kIndependence};
  const auto got = reverse_project(t, R::kForward);
  return {got == RelationSet{R::kReverse}, "target fwd -> " + to_string(got)};
}

// 4
Outcome strategy_table() {
  struct Row {
    L from, to;
    RelationSet expected;
  };
  const std::vector<Row> rows = {{L::kEntailment, L::kEntailment, {R::kEquivalence, R::kForward}},
                                 {L::kContradiction, L::kContradiction, {R::kEquivalence, R::kReverse}},
                                 {L::kNeutral, L::kNeutral, {R::kEquivalence, R::kReverse}},
                                 {L::kEntailment, L::kContradiction, {R::kNegation, R::kAlternation}},
                                 {L::kEntailment, L::kNeutral, {R::kReverse}},
                                 {L::kContradiction, L::kEntailment, {R::kEquivalence, R::kReverse}}};
  int ok = 0;
  for (const auto& r : rows) {
    const auto s = strategy_for(r.from, r.to);
    if (s.target_relations == r.expected && !s.target_relations.contains(R::kCover)) ++ok;
  }
  for (auto [from, to] : {std::pair{L::kContradiction, L::kNeutral}, std::pair{L::kNeutral, L::kContradiction},
                          std::pair{L::kNeutral, L::kEntailment}}) {
    try {
      strategy_for(from, to);
    } catch (const ConstraintError& e) {
      if (std::string(e.what()).find("not permitted") != std::string::npos) ++ok;
    }
  }
  return {ok == 9, std::to_string(ok) + "/9 cases"};
}

// 5
Outcome symbolic_validity() {
  const auto& res = ToyResources::get();
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  GenerationContext ctx{res.kb, res.lexicon, res.table, &lm, {}};
  const auto data = load_dataset(data_path("toy_dataset.jsonl"));
  long checked = 0, failures = 0;
  for (const auto& setup : all_setups()) {
    const auto strategy = strategy_for(setup.source, setup.target);
    for (const auto& rec : data) {
      if (rec.gold_label != setup.source) continue;
      const auto h = rec.annotation ? *rec.annotation : res.annotate(rec.hypothesis);
      for (const auto& c : generate_candidates(h, strategy.target_relations, ctx, {})) {
        ++checked;
        if (!symbolically_valid(strategy, final_relation(c.edit.claimed_relation, strategy.via_negated_hypothesis)))
          ++failures;
      }
    }
  }
  // Multi-round attempts, as recorded in the campaign traces.
  long traced = 0;
  for (const auto& p : toy_campaign(1).pairs)
    for (const auto& t : p.result.trace) {
      ++traced;
      if (!t.valid) ++failures;
    }
  std::ostringstream d;
  d << data.size() << " pairs, " << checked << " first-round candidates and " << traced
    << " queried attempts checked, " << failures << " failures";
  return {failures == 0 && checked > 0 && data.size() >= 50, d.str()};
}

// 6
Outcome quality_contract() {
  std::mt19937_64 rng(6);
  const std::vector<std::string> words = {"A", "dog", "runs", "in", "the", "park", "not", ",", "boy's", "."};
  double worst = 0;
  for (std::size_t v : {3u, 50u, 30522u}) {
    std::vector<UniformLm::Word> vocab;
    for (std::size_t i = 0; i < v; ++i) vocab.push_back({"w" + std::to_string(i), Pos::kNoun});
    UniformLm lm(vocab);
    for (int trial = 0; trial < 100; ++trial) {
      std::string s;
      const auto n = 1 + rng() % 12;
      for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
      worst = std::max(worst, std::abs(pseudo_perplexity(s, lm) / static_cast<double>(v) - 1.0));
    }
  }
  int bad_trials = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Scored<int>> items;
    const int n = static_cast<int>(rng() % 300);
    for (int i = 0; i < n; ++i) items.push_back({i, 1.0 + static_cast<double>(rng() % 20)});
    const auto out = rank_and_filter(items);
    bool ok = out.size() == std::min<std::size_t>(items.size(), 100);
    for (std::size_t i = 1; i < out.size(); ++i) {
      ok &= out[i - 1].pppl <= out[i].pppl;
      if (out[i - 1].pppl == out[i].pppl) ok &= out[i - 1].item < out[i].item;
    }
    if (!ok) ++bad_trials;
  }
  std::ostringstream d;
  d << "max relative PPPL error " << worst << ", rank_and_filter " << (trials - bad_trials) << "/" << trials
    << " trials ok";
  return {worst <= 1e-9 && bad_trials == 0, d.str()};
}

double overall_asr(const nlohmann::json& report) {
  double succ = 0, eligible = 0;
  for (const auto& s : report.at("setups")) {
    succ += s.at("succeeded").get<double>();
    eligible += s.at("attempted").get<double>() - s.at("skipped").get<double>();
  }
  return eligible > 0 ? succ / eligible : 0;
}

// Equal up to floating-point noise in numeric fields.
bool same_report(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number_float() || b.is_number_float()) {
    if (!a.is_number() || !b.is_number()) return false;
    const double x = a.get<double>(), y = b.get<double>();
    return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)});
  }
  if (a.type() != b.type()) return false;
  if (a.is_object()) {
    if (a.size() != b.size()) return false;
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!b.contains(it.key()) || !same_report(it.value(), b.at(it.key()))) return false;
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!same_report(a[i], b[i])) return false;
    return true;
  }
  return a == b;
}

// 7
Outcome determinism_and_budget(const fs::path& work) {
  const auto out1 = work / "run1", out2 = work / "run2", out3 = work / "run4threads";
  const auto r1 = toy_campaign(1, out1);
  toy_campaign(1, out2);
  toy_campaign(4, out3);
  const auto a = slurp(out1 / "report.json"), b = slurp(out2 / "report.json"), c = slurp(out3 / "report.json");
  const bool identical = !a.empty() && a == b && a == c;
  int max_q = 0;
  for (const auto& p : r1.pairs) max_q = std::max(max_q, p.result.query_count);
  const auto report = nlohmann::json::parse(a);
  const double asr = overall_asr(report);

  const auto golden_path = fs::path(NATLOG_GOLDEN_DIR) / "report.json";
  bool golden_ok = false;
  double golden_asr = 0;
  if (fs::exists(golden_path)) {
    const auto golden = nlohmann::json::parse(slurp(golden_path));
    golden_asr = overall_asr(golden);
    golden_ok = same_report(report, golden);
  }
  std::ostringstream d;
  d << "reports " << (identical ? "byte-identical" : "DIFFER") << " across 3 runs, max query_count " << max_q
    << ", ASR " << 100 * asr << "% (golden " << 100 * golden_asr << "%, " << (golden_ok ? "matches" : "MISMATCH")
    << ")";
  return {identical && max_q <= 500 && asr >= 0.6 && golden_ok, d.str()};
}

std::vector<nlohmann::json> read_trace(const fs::path& p) {
  std::vector<nlohmann::json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

// 8
// E2C is run a second time with generation limited to add_neg; E2E comes
// from the full campaign of criterion 7.
Outcome add_neg_cheapness(const fs::path& work) {
  AttackConfig only_neg;
  only_neg.edit_kinds = {EditKind::kAddNeg};
  toy_campaign(1, work / "add_neg", {parse_setup("E2C")}, only_neg);
  auto winning_qn = [&](const fs::path& traces, const std::string& setup,
                        const std::function<bool(const nlohmann::json&)>& keep) {
    std::vector<double> qn;
    if (!fs::exists(traces / setup)) return qn;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(traces / setup)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const auto lines = read_trace(f);
      if (!lines.empty() && lines.back().at("success").get<bool>() && keep(lines.back()))
        qn.push_back(lines.back().at("query").get<double>());
    }
    return qn;
  };
  const auto add_neg = winning_qn(work / "add_neg" / "traces", "E2C",
                                  [](const auto& t) { return t.at("edit").at("kind") == "add_neg"; });
  const auto e2e = winning_qn(work / "run1" / "traces", "E2E", [](const auto&) { return true; });
  if (add_neg.empty() || e2e.empty()) return {false, "no successful attacks to compare"};
  const double m1 = median(add_neg), m2 = median(e2e);
  std::ostringstream d;
  d << "median QN E2C via add_neg " << m1 << " (" << add_neg.size() << " pairs) vs E2E " << m2 << " ("
    << e2e.size() << " pairs)";
  return {m1 <= m2, d.str()};
}

// 9
Outcome assertion_prefix_forms() {
  const auto& res = ToyResources::get();
  class NeverFooled final : public VictimAdapter {
   public:
    explicit NeverFooled(std::string original) : original_(std::move(original)) {}
    VictimPrediction predict(std::string_view, std::string_view h) override {
      return h == original_ ? prediction_from_probs({0.1, 0.8, 0.1}) : prediction_from_probs({0.8, 0.1, 0.1});
    }
    bool concurrent_safe() const override { return true; }

   private:
    std::string original_;
  };
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  int checked = 0, with_prefix = 0;
  std::string example;
  for (const auto& rec : load_dataset(data_path("toy_dataset.jsonl"))) {
    if (rec.gold_label != L::kContradiction) continue;
    const auto lower = text::lower(rec.hypothesis);
    if (lower.rfind("nobody", 0) != 0 && lower.rfind("nothing", 0) != 0) continue;
    ++checked;
    NeverFooled v(rec.hypothesis);
    AttackConfig cfg;
    cfg.max_total_attacks = 20;
    const auto r = run_attack(rec.premise, res.annotate(rec.hypothesis), L::kContradiction, L::kEntailment, cfg, v,
                              lm, res.attack());
    bool found = false;
    for (const auto& t : r.trace)
      if (t.hypothesis.rfind("It is not true that", 0) == 0 || t.hypothesis.rfind("It is false that", 0) == 0) {
        found = true;
        if (example.empty()) example = t.hypothesis;
      }
    with_prefix += found ? 1 : 0;
  }
  return {checked > 0 && with_prefix == checked,
          std::to_string(with_prefix) + "/" + std::to_string(checked) + " hypotheses, e.g. \"" + example + "\""};
}

}  // namespace

// Usage: acceptance [--known-failure N]...
// Exit status is 0 when the set of failing criteria equals the known set.
int main(int argc, char** argv) {
  std::set<std::size_t> known;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--known-failure" && i + 1 < argc) {
      known.insert(std::stoul(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--known-failure N]...\n";
      return 2;
    }
  }
  set_warning_sink([](const std::string&) {});
  const auto work = fs::temp_directory_path() / "natlog_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"join table sound on finite sets", join_oracle},
      {"two-edit worked example composes to contradiction", worked_example},
      {"reverse projection golden case", reverse_projection_golden},
      {"strategy table", strategy_table},
      {"symbolic validity of all candidates", symbolic_validity},
      {"quality-control contract", quality_contract},
      {"campaign determinism, budget and ASR", [&] { return determinism_and_budget(work); }},
      {"add_neg label flips are cheap", [&] { return add_neg_cheapness(work); }},
      {"assertion-prefix surface forms", assertion_prefix_forms},
  };
  int failed = 0;
  std::set<std::size_t> failing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    if (!o.pass) failing.insert(i + 1);
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << " -- " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  if (!known.empty()) {
    std::cout << "known failures:";
    for (auto k : known) std::cout << ' ' << k << (failing.count(k) ? "" : " (now passing)");
    std::cout << std::endl;
  }
  return failing == known ? 0 : 1;
}
