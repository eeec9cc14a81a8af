#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

using namespace natlog;
using natlog::testing::ToyResources;
using natlog::testing::data_path;
using L = NliLabel;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto p = fs::temp_directory_path() / ("natlog_harness_" + name);
  std::ofstream(p) << content;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<DatasetRecord> small_dataset() {
  auto all = load_dataset(data_path("toy_dataset.jsonl"));
  std::vector<DatasetRecord> out;
  int e = 0, c = 0, n = 0;
  for (auto& r : all) {
    int& k = r.gold_label == L::kEntailment ? e : r.gold_label == L::kContradiction ? c : n;
    if (k++ < 3) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Dataset, ToyDatasetShape) {
  const auto d = load_dataset(data_path("toy_dataset.jsonl"));
  EXPECT_GE(d.size(), 50u);
  std::set<std::string> ids;
  std::map<L, int> by_label;
  for (const auto& r : d) {
    EXPECT_TRUE(ids.insert(r.id).second) << r.id;
    ++by_label[r.gold_label];
  }
  EXPECT_GT(by_label[L::kEntailment], 0);
  EXPECT_GT(by_label[L::kContradiction], 0);
  EXPECT_GT(by_label[L::kNeutral], 0);
}

TEST(Dataset, ErrorsNameTheLine) {
  const auto p = write_temp("bad.jsonl",
                            "{\"id\":\"a\",\"premise\":\"x\",\"hypothesis\":\"y\",\"label\":\"entailment\"}\n"
                            "{\"id\":\"b\",\"premise\":\"x\",\"hypothesis\":\"y\",\"label\":\"maybe\"}\n");
  try {
    load_dataset(p);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_dataset(write_temp("noprem.jsonl", "{\"id\":\"a\",\"hypothesis\":\"y\",\"label\":\"neutral\"}\n")),
               InputError);
  EXPECT_THROW(load_dataset(write_temp("notjson.jsonl", "{oops\n")), InputError);
  EXPECT_THROW(load_dataset("/nonexistent/data.jsonl"), InputError);
}

TEST(Dataset, EmptyFileWarns) {
  int warnings = 0;
  auto prev = set_warning_sink([&](const std::string&) { ++warnings; });
  const auto d = load_dataset(write_temp("empty.jsonl", "\n\n"));
  set_warning_sink(prev);
  EXPECT_TRUE(d.empty());
  EXPECT_EQ(warnings, 1);
}

TEST(Dataset, AnnotationOverridesTagger) {
  const auto h = ToyResources::get().annotate("A dog barks");
  nlohmann::json rec = {{"id", "x"}, {"premise", "A dog barks loudly"}, {"hypothesis", "A dog barks"},
                        {"label", "entailment"}, {"annotation", to_json(h)}};
  const auto d = load_dataset(write_temp("ann.jsonl", rec.dump() + "\n"));
  ASSERT_EQ(d.size(), 1u);
  ASSERT_TRUE(d[0].annotation.has_value());
  EXPECT_EQ(*d[0].annotation, h);
}

TEST(Setup, Parsing) {
  const auto s = parse_setup("C2E");
  EXPECT_EQ(s.source, L::kContradiction);
  EXPECT_EQ(s.target, L::kEntailment);
  EXPECT_THROW(parse_setup("E2X"), InputError);
  EXPECT_THROW(parse_setup("EE"), InputError);
  EXPECT_THROW(parse_setup("N2C"), ConstraintError);
  EXPECT_THROW(parse_setup("C2N"), ConstraintError);
  EXPECT_THROW(parse_setup("N2E"), ConstraintError);
}

TEST(Summary, MedianAndRates) {
  EXPECT_EQ(median({}), 0);
  EXPECT_EQ(median({3, 1, 2}), 2);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);

  std::vector<PairOutcome> outs(4);
  outs[0].result.skipped = true;
  for (int k = 1; k <= 2; ++k) {
    auto& r = outs[k].result;
    r.success = true;
    r.query_count = k * 2;
    TraceRecord t;
    t.valid = true;
    t.pppl = 10.0 * k;
    r.trace.push_back(t);
  }
  outs[3].result.query_count = 500;
  std::vector<const PairOutcome*> ptrs;
  for (auto& o : outs) ptrs.push_back(&o);
  const auto s = summarize("E2E", ptrs);
  EXPECT_EQ(s.attempted, 4);
  EXPECT_EQ(s.skipped, 1);
  EXPECT_EQ(s.succeeded, 2);
  EXPECT_DOUBLE_EQ(s.asr, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.symbolic_asr, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.qn_mean, 3.0);
  EXPECT_DOUBLE_EQ(s.qn_median, 3.0);
  EXPECT_DOUBLE_EQ(s.ppl_mean, 15.0);

  const auto none = summarize("E2E", {});
  EXPECT_EQ(none.asr, 0);
}

TEST(Campaign, DeterministicAcrossThreadCounts) {
  const auto& res = ToyResources::get();
  const auto data = small_dataset();
  const std::vector<natlog::Setup> setups = {parse_setup("E2E"), parse_setup("E2C"), parse_setup("C2E"), parse_setup("N2N")};
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  MockVictim v1(0), v4(0);
  const auto a = run_campaign(data, setups, {}, v1, lm, res.attack(), {1, std::nullopt});
  const auto b = run_campaign(data, setups, {}, v4, lm, res.attack(), {4, std::nullopt});
  EXPECT_EQ(to_json(a).dump(2), to_json(b).dump(2));
  EXPECT_EQ(format_table(a), format_table(b));
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.rows[0].attempted, 3);
  EXPECT_EQ(a.rows[2].attempted, 3);
}

TEST(Campaign, WritesReportAndTraces) {
  const auto& res = ToyResources::get();
  const auto data = small_dataset();
  const auto out = fs::temp_directory_path() / "natlog_campaign_out";
  fs::remove_all(out);
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  MockVictim v;
  const auto report = run_campaign(data, {parse_setup("E2C")}, {}, v, lm, res.attack(), {1, out});
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_EQ(slurp(out / "report.txt"), format_table(report));
  const auto j = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(j.at("setups").size(), 1u);
  EXPECT_EQ(j.at("config").at("max_total_attacks"), 500);
  for (const auto& p : report.pairs) {
    const auto trace = out / "traces" / "E2C" / (p.id + ".jsonl");
    ASSERT_TRUE(fs::exists(trace)) << trace;
    EXPECT_EQ(slurp(trace), trace_jsonl(p.result));
  }
}

TEST(Campaign, AdapterFailuresAreRecordedPerPair) {
  const auto& res = ToyResources::get();
  class Flaky final : public VictimAdapter {
   public:
    VictimPrediction predict(std::string_view p, std::string_view h) override {
      if (p.find("goose") != std::string_view::npos) throw AdapterError("timeout");
      return inner.predict(p, h);
    }
    bool concurrent_safe() const override { return false; }
    MockVictim inner;
  } v;
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  auto data = small_dataset();
  int warnings = 0;
  auto prev = set_warning_sink([&](const std::string&) { ++warnings; });
  const auto report = run_campaign(data, {parse_setup("E2E")}, {}, v, lm, res.attack(), {2, std::nullopt});
  set_warning_sink(prev);
  EXPECT_EQ(report.rows[0].adapter_failures, 1);
  EXPECT_GE(warnings, 1);
  for (const auto& p : report.pairs)
    if (p.adapter_failure) EXPECT_NE(p.result.reason.find("timeout"), std::string::npos);
}

TEST(Campaign, InvalidOptions) {
  const auto& res = ToyResources::get();
  auto lm = BigramLm::from_file(data_path("toy_corpus.txt"));
  MockVictim v;
  EXPECT_THROW(run_campaign({}, {parse_setup("E2E")}, {}, v, lm, res.attack(), {0, std::nullopt}), InputError);
  AttackConfig bad;
  bad.max_total_attacks = 0;
  EXPECT_THROW(run_campaign({}, {parse_setup("E2E")}, bad, v, lm, res.attack()), InputError);
}
