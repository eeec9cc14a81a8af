// natlogattack: command-line front end.
//
//   natlogattack attack --premise P --hypothesis H --setup E2C --mock-victim --stub-lm
//   natlogattack campaign --dataset data/toy_dataset.jsonl --out run1 --mock-victim --stub-lm
//   natlogattack validate-kb --kb data/toy_kb.jsonl
//   natlogattack annotate --text "All the kids run"
//   natlogattack oracle-check
//
// Exit codes: 0 ok, 1 usage or input error, 2 adapter failure, 3 invariant
// violation.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "natlog.hpp"
#include "natlog/http_adapters.hpp"

#ifndef NATLOG_DATA_DIR
#define NATLOG_DATA_DIR "data"
#endif

namespace {

using namespace natlog;

struct Options {
  std::string data_dir = NATLOG_DATA_DIR;
  std::string kb, inventory, lexicon, projectivity, corpus;
  std::string config_file, victim_url, lm_url;
  bool mock_victim = false;
  bool stub_lm = false;
  std::vector<std::string> edit_names;
  AttackConfig attack;
};

struct Resources {
  LexicalKB kb;
  PolarityLexicon lexicon;
  ProjectivityTable table;
};

std::string or_default(const std::string& v, const Options& o, const char* file) {
  return v.empty() ? o.data_dir + "/" + file : v;
}

Resources load_resources(const Options& o) {
  Resources r{load_kb(or_default(o.kb, o, "toy_kb.jsonl")), PolarityLexicon::defaults(),
              ProjectivityTable::defaults()};
  const auto inv = or_default(o.inventory, o, "inventory.tsv");
  if (!o.inventory.empty() || std::ifstream(inv)) load_inventory(r.kb, inv);
  if (!o.lexicon.empty()) r.lexicon = PolarityLexicon::load(o.lexicon);
  if (!o.projectivity.empty()) r.table = ProjectivityTable::load(o.projectivity);
  return r;
}

AdapterConfig adapter_config(const Options& o) {
  AdapterConfig c;
  if (!o.config_file.empty()) c.merge_file(o.config_file);
  c.merge_env();
  if (!o.victim_url.empty()) c.victim_url = o.victim_url;
  if (!o.lm_url.empty()) c.lm_url = o.lm_url;
  return c;
}

std::unique_ptr<VictimAdapter> make_victim(const Options& o, const AdapterConfig& c) {
  if (o.mock_victim) return std::make_unique<MockVictim>(o.attack.random_seed);
  if (c.victim_url.empty()) throw InputError("no victim: pass --mock-victim, --victim-url or set NLA_VICTIM_URL");
  return std::make_unique<HttpVictim>(c.victim_url, c.http);
}

std::unique_ptr<LmAdapter> make_lm(const Options& o, const AdapterConfig& c) {
  if (o.stub_lm) return std::make_unique<BigramLm>(BigramLm::from_file(or_default(o.corpus, o, "toy_corpus.txt")));
  if (c.lm_url.empty()) throw InputError("no language model: pass --stub-lm, --lm-url or set NLA_LM_URL");
  return std::make_unique<HttpLm>(c.lm_url, c.http);
}

void add_resource_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--data-dir", o.data_dir, "Directory holding the default data files");
  cmd->add_option("--kb", o.kb, "Lexical KB (JSON lines)");
  cmd->add_option("--inventory", o.inventory, "Insertion and negation inventory (TSV)");
  cmd->add_option("--polarity-lexicon", o.lexicon, "Polarity lexicon (JSON)");
  cmd->add_option("--projectivity", o.projectivity, "Projectivity table (JSON)");
}

void add_attack_flags(CLI::App* cmd, Options& o) {
  add_resource_flags(cmd, o);
  cmd->add_option("--config", o.config_file, "Adapter config (JSON)");
  cmd->add_option("--victim-url", o.victim_url, "Victim service base URL");
  cmd->add_option("--lm-url", o.lm_url, "Masked-LM service base URL");
  cmd->add_flag("--mock-victim", o.mock_victim, "Use the built-in rule-based victim");
  cmd->add_flag("--stub-lm", o.stub_lm, "Use the built-in bigram LM");
  cmd->add_option("--corpus", o.corpus, "Training corpus for --stub-lm");
  cmd->add_option("--seed", o.attack.random_seed, "Seed for the mock victim");
  cmd->add_option("--max-attacks", o.attack.max_total_attacks, "Query budget per pair")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--candidate-cap", o.attack.candidate_cap, "Candidates kept per round")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--hypernym-depth", o.attack.hypernym_depth, "Maximum hypernym/hyponym distance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--per-op-cap", o.attack.per_op_cap, "Candidates per edit function and token");
  cmd->add_option("--lm-k", o.attack.lm_k, "Masked-LM fillers requested per gap");
  cmd->add_option("--edits", o.edit_names, "Restrict edits to these kinds (syno, hyper, add_neg, ...)")
      ->delimiter(',');
}

int run(int argc, char** argv) {
  CLI::App app{"Natural-logic adversarial attacks on NLI models"};
  app.require_subcommand(1);
  Options o;

  auto* attack = app.add_subcommand("attack", "Attack a single premise-hypothesis pair");
  add_attack_flags(attack, o);
  std::string premise, hypothesis, setup_name, trace_path, annotation_path;
  attack->add_option("--premise", premise, "Premise")->required();
  attack->add_option("--hypothesis", hypothesis, "Hypothesis");
  attack->add_option("--annotation", annotation_path, "Annotation file; its first record is the hypothesis");
  attack->add_option("--setup", setup_name, "E2E, E2C, E2N, C2C, C2E or N2N")->required();
  attack->add_option("--trace", trace_path, "Write the attempt trace (JSON lines) here");

  auto* campaign = app.add_subcommand("campaign", "Attack every eligible pair of a dataset");
  add_attack_flags(campaign, o);
  std::string dataset_path, out_dir;
  std::vector<std::string> setups = {"E2E", "E2C", "E2N", "C2C", "C2E", "N2N"};
  int parallel = 1;
  campaign->add_option("--dataset", dataset_path, "Dataset (JSON lines)")->required();
  campaign->add_option("--setup", setups, "Setups to run (repeatable)");
  campaign->add_option("--out", out_dir, "Directory for report.json, report.txt and traces/");
  campaign->add_option("--parallel", parallel, "Concurrent attack sessions")->check(CLI::PositiveNumber);

  auto* validate_kb = app.add_subcommand("validate-kb", "Load and check a KB and inventory");
  add_resource_flags(validate_kb, o);

  auto* annotate_cmd = app.add_subcommand("annotate", "Tag and polarity-annotate sentences");
  add_resource_flags(annotate_cmd, o);
  std::vector<std::string> texts;
  std::string text_file, format = "json";
  annotate_cmd->add_option("--text", texts, "Sentence (repeatable)");
  annotate_cmd->add_option("--file", text_file, "One sentence per line");
  annotate_cmd->add_option("--format", format, "json (annotation records) or tagged (word/pos)")
      ->check(CLI::IsMember({"json", "tagged"}));

  auto* oracle = app.add_subcommand("oracle-check", "Check the join table against set semantics");
  unsigned min_size = 3, max_size = 5;
  oracle->add_option("--min-size", min_size, "Smallest universe")->check(CLI::Range(2u, 8u));
  oracle->add_option("--max-size", max_size, "Largest universe")->check(CLI::Range(2u, 8u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  for (const auto& name : o.edit_names) {
    auto k = parse_edit_kind(name);
    if (!k) throw InputError("unknown edit kind \"" + name + "\"");
    o.attack.edit_kinds.push_back(*k);
  }

  if (*attack) {
    const auto res = load_resources(o);
    const auto acfg = adapter_config(o);
    auto victim = make_victim(o, acfg);
    auto lm = make_lm(o, acfg);
    const auto setup = parse_setup(setup_name);
    AnnotatedSentence h;
    if (!annotation_path.empty()) {
      auto all = load_annotations(annotation_path);
      if (all.empty()) throw InputError(annotation_path + ": no annotation records");
      h = all.front();
    } else if (!hypothesis.empty()) {
      h = annotate_text(hypothesis, res.kb, res.lexicon, res.table);
    } else {
      throw InputError("attack needs --hypothesis or --annotation");
    }
    const auto result = run_attack(premise, h, setup.source, setup.target, o.attack, *victim, *lm,
                                   {res.kb, res.lexicon, res.table});
    if (!trace_path.empty()) std::ofstream(trace_path) << trace_jsonl(result);
    std::cout << to_json(result).dump(2) << "\n";
    return 0;
  }

  if (*campaign) {
    const auto res = load_resources(o);
    const auto acfg = adapter_config(o);
    auto victim = make_victim(o, acfg);
    auto lm = make_lm(o, acfg);
    std::vector<Setup> parsed;
    for (const auto& s : setups) parsed.push_back(parse_setup(s));
    const auto data = load_dataset(dataset_path);
    CampaignOptions copts;
    copts.parallel = parallel;
    if (!out_dir.empty()) copts.out_dir = out_dir;
    const auto report = run_campaign(data, parsed, o.attack, *victim, *lm, {res.kb, res.lexicon, res.table}, copts);
    std::cout << format_table(report);
    return 0;
  }

  if (*validate_kb) {
    const auto res = load_resources(o);
    std::cout << res.kb.size() << " entries, " << res.kb.inventory().size() << " insertion items, "
              << res.kb.negation_phrases().size() << " negation phrases\n";
    return 0;
  }

  if (*annotate_cmd) {
    const auto res = load_resources(o);
    if (!text_file.empty()) {
      std::ifstream in(text_file);
      if (!in) throw InputError("cannot open " + text_file);
      for (std::string line; std::getline(in, line);)
        if (line.find_first_not_of(" \t\r") != std::string::npos && line.front() != '#') texts.push_back(line);
    }
    if (texts.empty()) throw InputError("annotate needs --text or --file");
    for (const auto& t : texts) {
      const auto a = annotate_text(t, res.kb, res.lexicon, res.table);
      if (format == "tagged") {
        std::string line;
        for (const auto& tok : a.tokens)
          line += (line.empty() ? "" : " ") + tok.surface + "/" + std::string(to_string(tok.pos));
        std::cout << line << "\n";
      } else {
        std::cout << to_json(a).dump() << "\n";
      }
    }
    return 0;
  }

  if (*oracle) {
    if (min_size > max_size) throw InputError("--min-size must not exceed --max-size");
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = check_join_soundness(min_size, max_size);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << report.triples_checked << " triples checked, " << report.violations.size() << " violations ("
              << secs << " s)\n";
    for (const auto& v : report.violations)
      std::cout << "  |U|=" << v.universe_size << " join(" << v.xy << ", " << v.yz << ") = " << v.joined
                << " but x-z is " << v.xz << "\n";
    return report.violations.empty() ? 0 : static_cast<int>(ExitCode::kInvariant);
  }
  return static_cast<int>(ExitCode::kUsage);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const natlog::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return static_cast<int>(natlog::ExitCode::kInvariant);
  } catch (const natlog::AdapterError& e) {
    std::cerr << "adapter error: " << e.what() << "\n";
    return static_cast<int>(natlog::ExitCode::kAdapter);
  } catch (const natlog::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(natlog::ExitCode::kUsage);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(natlog::ExitCode::kInvariant);
  }
}
