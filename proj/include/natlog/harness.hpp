#pragma once

// Datasets, attack campaigns and their reports.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "natlog/adapters.hpp"
#include "natlog/annotation.hpp"
#include "natlog/attack.hpp"
#include "natlog/error.hpp"
#include "natlog/tagger.hpp"

namespace natlog {

struct DatasetRecord {
  std::string id;
  std::string premise;
  std::string hypothesis;
  NliLabel gold_label = NliLabel::kEntailment;
  std::optional<AnnotatedSentence> annotation;
};

/// JSON lines {"id","premise","hypothesis","label"[,"annotation"]}; the
/// optional annotation uses the annotation file record format.
inline std::vector<DatasetRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path);
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    auto fail = [&](const std::string& msg) { throw InputError(where + ": " + msg); };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("record must be a JSON object");
    DatasetRecord r;
    for (auto [key, dst] : {std::pair{"id", &r.id}, std::pair{"premise", &r.premise},
                            std::pair{"hypothesis", &r.hypothesis}}) {
      if (!j.contains(key) || !j.at(key).is_string()) fail(std::string("field \"") + key + "\" missing or not a string");
      *dst = j.at(key).get<std::string>();
    }
    if (r.premise.empty() || r.hypothesis.empty()) fail("premise and hypothesis must be non-empty");
    if (!j.contains("label") || !j.at("label").is_string()) fail("field \"label\" missing or not a string");
    auto label = parse_label(j.at("label").get<std::string>());
    if (!label) fail("field \"label\": unknown label \"" + j.at("label").get<std::string>() + "\"");
    r.gold_label = *label;
    if (j.contains("annotation")) r.annotation = annotation_from_json(j.at("annotation"), where);
    out.push_back(std::move(r));
  }
  if (out.empty()) warn("dataset " + path + " is empty");
  return out;
}

struct Setup {
  std::string name;
  NliLabel source;
  NliLabel target;
};

/// E2E, E2C, E2N, C2C, C2E, N2N (and the rejected C2N, N2C, N2E, which
/// fail in strategy_for).
inline Setup parse_setup(std::string_view name) {
  auto letter = [&](char c) -> std::optional<NliLabel> {
    switch (c) {
      case 'E': return NliLabel::kEntailment;
      case 'C': return NliLabel::kContradiction;
      case 'N': return NliLabel::kNeutral;
      default: return std::nullopt;
    }
  };
  if (name.size() != 3 || name[1] != '2' || !letter(name[0]) || !letter(name[2]))
    throw InputError("unknown setup \"" + std::string(name) + "\"; expected e.g. E2E, E2C, C2E");
  Setup s{std::string(name), *letter(name[0]), *letter(name[2])};
  strategy_for(s.source, s.target);
  return s;
}

struct SetupReport {
  std::string setup;
  int attempted = 0;
  int skipped = 0;
  int succeeded = 0;
  int symbolically_valid = 0;
  int adapter_failures = 0;
  double asr = 0;
  double symbolic_asr = 0;
  double qn_mean = 0;
  double qn_median = 0;
  double ppl_mean = 0;
};

struct PairOutcome {
  std::string id;
  std::string setup;
  AttackResult result;
  bool adapter_failure = false;
};

struct CampaignReport {
  AttackConfig config;
  std::vector<SetupReport> rows;
  std::vector<PairOutcome> pairs;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

/// Aggregates pair outcomes of one setup. Rates are 0 when nothing was
/// eligible; QN and PPL statistics cover successes only.
inline SetupReport summarize(const std::string& setup, const std::vector<const PairOutcome*>& pairs) {
  SetupReport r;
  r.setup = setup;
  std::vector<double> qn;
  double ppl = 0;
  for (const auto* p : pairs) {
    ++r.attempted;
    if (p->result.skipped) ++r.skipped;
    if (p->adapter_failure) ++r.adapter_failures;
    if (const auto* w = p->result.winner()) {
      ++r.succeeded;
      if (w->valid) ++r.symbolically_valid;
      qn.push_back(p->result.query_count);
      ppl += w->pppl;
    }
  }
  const int eligible = r.attempted - r.skipped;
  if (eligible > 0) {
    r.asr = static_cast<double>(r.succeeded) / eligible;
    r.symbolic_asr = static_cast<double>(r.symbolically_valid) / eligible;
  }
  if (!qn.empty()) {
    double s = 0;
    for (double q : qn) s += q;
    r.qn_mean = s / static_cast<double>(qn.size());
    r.qn_median = median(qn);
    r.ppl_mean = ppl / static_cast<double>(qn.size());
  }
  return r;
}

inline nlohmann::ordered_json to_json(const SetupReport& r) {
  return {{"setup", r.setup},
          {"attempted", r.attempted},
          {"skipped", r.skipped},
          {"succeeded", r.succeeded},
          {"symbolically_valid", r.symbolically_valid},
          {"adapter_failures", r.adapter_failures},
          {"asr", r.asr},
          {"symbolic_asr", r.symbolic_asr},
          {"qn_mean", r.qn_mean},
          {"qn_median", r.qn_median},
          {"ppl_mean", r.ppl_mean}};
}

inline nlohmann::ordered_json to_json(const CampaignReport& c) {
  nlohmann::ordered_json j;
  j["config"] = {{"max_total_attacks", c.config.max_total_attacks},
                 {"candidate_cap", c.config.candidate_cap},
                 {"hypernym_depth", c.config.hypernym_depth},
                 {"per_op_cap", c.config.per_op_cap},
                 {"lm_k", c.config.lm_k},
                 {"seed", c.config.random_seed}};
  if (!c.config.edit_kinds.empty()) {
    auto& kinds = j["config"]["edit_kinds"] = nlohmann::ordered_json::array();
    for (auto k : c.config.edit_kinds) kinds.push_back(to_string(k));
  }
  j["setups"] = nlohmann::ordered_json::array();
  for (const auto& r : c.rows) j["setups"].push_back(to_json(r));
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : c.pairs) {
    nlohmann::ordered_json pj;
    pj["id"] = p.id;
    pj["setup"] = p.setup;
    pj["success"] = p.result.success;
    pj["skipped"] = p.result.skipped;
    pj["reason"] = p.result.reason;
    pj["query_count"] = p.result.query_count;
    pj["rounds"] = p.result.rounds;
    pj["adversarial_hypothesis"] = p.result.adversarial_hypothesis
                                       ? nlohmann::ordered_json(*p.result.adversarial_hypothesis)
                                       : nlohmann::ordered_json(nullptr);
    if (const auto* w = p.result.winner()) pj["edit"] = to_string(w->edit.kind);
    j["pairs"].push_back(pj);
  }
  return j;
}

inline std::string format_table(const CampaignReport& c) {
  std::ostringstream os;
  auto fixed = [](double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
  };
  os << std::left << std::setw(6) << "setup" << std::right << std::setw(10) << "attempted" << std::setw(9)
     << "skipped" << std::setw(11) << "succeeded" << std::setw(8) << "ASR" << std::setw(10) << "sym-ASR"
     << std::setw(9) << "QN-mean" << std::setw(8) << "QN-med" << std::setw(10) << "PPL-mean" << "\n";
  for (const auto& r : c.rows) {
    os << std::left << std::setw(6) << r.setup << std::right << std::setw(10) << r.attempted << std::setw(9)
       << r.skipped << std::setw(11) << r.succeeded << std::setw(8) << fixed(100 * r.asr, 1) << std::setw(10)
       << fixed(100 * r.symbolic_asr, 1) << std::setw(9) << fixed(r.qn_mean, 2) << std::setw(8)
       << fixed(r.qn_median, 1) << std::setw(10) << fixed(r.ppl_mean, 2) << "\n";
  }
  return os.str();
}

struct CampaignOptions {
  int parallel = 1;
  /// When set, report.json, report.txt and traces/<setup>/<id>.jsonl are
  /// written below this directory.
  std::optional<std::filesystem::path> out_dir;
};

/// Attacks every record whose gold label is the setup's source label.
/// Adapter failures are recorded per pair; invariant violations abort.
inline CampaignReport run_campaign(const std::vector<DatasetRecord>& dataset, const std::vector<Setup>& setups,
                                   const AttackConfig& cfg, VictimAdapter& victim, LmAdapter& lm,
                                   const AttackResources& res, const CampaignOptions& opts = {}) {
  cfg.validate();
  for (const auto& s : setups) strategy_for(s.source, s.target);
  if (opts.parallel < 1) throw InputError("parallel must be at least 1");

  struct Job {
    const DatasetRecord* rec;
    const Setup* setup;
  };
  std::vector<Job> jobs;
  for (const auto& s : setups)
    for (const auto& r : dataset)
      if (r.gold_label == s.source) jobs.push_back({&r, &s});

  std::unique_ptr<SerializedVictim> sv;
  std::unique_ptr<SerializedLm> sl;
  VictimAdapter* v = &victim;
  LmAdapter* l = &lm;
  if (opts.parallel > 1 && !victim.concurrent_safe()) v = (sv = std::make_unique<SerializedVictim>(victim)).get();
  if (opts.parallel > 1 && !lm.concurrent_safe()) l = (sl = std::make_unique<SerializedLm>(lm)).get();

  std::vector<PairOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      const auto& job = jobs[k];
      auto& out = outcomes[k];
      out.id = job.rec->id;
      out.setup = job.setup->name;
      try {
        const auto h = job.rec->annotation ? *job.rec->annotation
                                           : annotate_text(job.rec->hypothesis, res.kb, res.lexicon, res.table);
        out.result = run_attack(job.rec->premise, h, job.setup->source, job.setup->target, cfg, *v, *l, res);
      } catch (const AdapterError& e) {
        out.adapter_failure = true;
        out.result = {};
        out.result.reason = std::string("adapter error: ") + e.what();
        warn("pair " + out.id + " (" + out.setup + "): " + out.result.reason);
      } catch (...) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        next = jobs.size();
      }
    }
  };
  if (opts.parallel == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < opts.parallel; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  CampaignReport report;
  report.config = cfg;
  for (const auto& s : setups) {
    std::vector<const PairOutcome*> mine;
    for (const auto& o : outcomes)
      if (o.setup == s.name) mine.push_back(&o);
    report.rows.push_back(summarize(s.name, mine));
  }
  report.pairs = std::move(outcomes);

  if (opts.out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(*opts.out_dir);
    std::ofstream(*opts.out_dir / "report.json") << to_json(report).dump(2) << "\n";
    std::ofstream(*opts.out_dir / "report.txt") << format_table(report);
    for (const auto& p : report.pairs) {
      const auto dir = *opts.out_dir / "traces" / p.setup;
      fs::create_directories(dir);
      std::ofstream(dir / (p.id + ".jsonl")) << trace_jsonl(p.result);
    }
  }
  return report;
}

}  // namespace natlog
