#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace natlog;

namespace {

UniformLm uniform(std::size_t v) {
  std::vector<UniformLm::Word> vocab;
  for (std::size_t i = 0; i < v; ++i) vocab.push_back({"w" + std::to_string(i), Pos::kNoun});
  return UniformLm(std::move(vocab));
}

std::string random_sentence(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {"a", "dog", "runs", "in", "the", "park", "It", "is", "not",
                                                 "true", "that", "boy's", "bike", ",", "blue", "."};
  std::uniform_int_distribution<std::size_t> len(1, 14), pick(0, words.size() - 1);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) s += (i ? " " : "") + words[pick(rng)];
  return s;
}

}  // namespace

TEST(Pppl, UniformLmScoresVocabularySize) {
  std::mt19937_64 rng(7);
  for (std::size_t v : {1u, 2u, 17u, 1000u, 30522u}) {
    auto lm = uniform(v);
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = random_sentence(rng);
      const double p = pseudo_perplexity(s, lm);
      EXPECT_NEAR(p / static_cast<double>(v), 1.0, 1e-9) << s;
    }
  }
}

TEST(Pppl, EmptySentenceRejected) {
  auto lm = uniform(5);
  EXPECT_THROW(pseudo_perplexity("", lm), InputError);
  EXPECT_THROW(pseudo_perplexity("   ", lm), InputError);
}

TEST(Pppl, FloorsZeroProbabilityWithWarning) {
  struct ZeroLm final : LmAdapter {
    MlmResponse fill(std::string_view, int) override { return {}; }
    double token_logprob(std::string_view, std::size_t) override { return -INFINITY; }
    bool concurrent_safe() const override { return true; }
  } lm;
  int warnings = 0;
  auto prev = set_warning_sink([&](const std::string&) { ++warnings; });
  const double p = pseudo_perplexity("a b", lm);
  set_warning_sink(prev);
  EXPECT_NEAR(p, 1.0 / kProbabilityFloor, 1e-6 / kProbabilityFloor);
  EXPECT_EQ(warnings, 2);
}

TEST(Pppl, RejectsPositiveLogProbability) {
  struct BadLm final : LmAdapter {
    MlmResponse fill(std::string_view, int) override { return {}; }
    double token_logprob(std::string_view, std::size_t) override { return 0.5; }
    bool concurrent_safe() const override { return true; }
  } lm;
  EXPECT_THROW(pseudo_perplexity("a", lm), ProtocolError);
}

TEST(Pppl, BigramPrefersCorpusSentences) {
  auto lm = BigramLm::from_file(natlog::testing::data_path("toy_corpus.txt"));
  const double fluent = pseudo_perplexity("A dog barks", lm);
  const double scrambled = pseudo_perplexity("barks A dog", lm);
  EXPECT_LT(fluent, scrambled);
}

TEST(RankAndFilter, PropertyRandomMultisets) {
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<std::size_t> size(0, 250);
    std::uniform_int_distribution<int> value(1, 12);  // few distinct values forces ties
    std::uniform_int_distribution<std::size_t> cap_pick(1, 150);
    const std::size_t n = size(rng);
    const std::size_t cap = trial % 3 == 0 ? kDefaultCandidateCap : cap_pick(rng);
    std::vector<Scored<std::size_t>> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back({i, value(rng) * 0.5});

    const auto out = rank_and_filter(items, cap);
    ASSERT_EQ(out.size(), std::min(n, cap));
    for (std::size_t i = 1; i < out.size(); ++i) {
      ASSERT_LE(out[i - 1].pppl, out[i].pppl);
      if (out[i - 1].pppl == out[i].pppl) ASSERT_LT(out[i - 1].item, out[i].item) << "unstable tie";
    }
    // The kept items are exactly the `cap` best, ties broken by input order.
    auto ref = items;
    std::stable_sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) { return a.pppl < b.pppl; });
    for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i].item, ref[i].item);
  }
}

TEST(RankAndFilter, DefaultCapIsOneHundred) {
  std::vector<Scored<int>> items;
  for (int i = 0; i < 300; ++i) items.push_back({i, 300.0 - i});
  const auto out = rank_and_filter(items);
  ASSERT_EQ(out.size(), 100u);
  EXPECT_EQ(out.front().item, 299);
}

TEST(RankAndFilter, RejectsBadInput) {
  EXPECT_THROW(rank_and_filter(std::vector<Scored<int>>{{1, 1.0}}, 0), InputError);
  EXPECT_THROW(rank_and_filter(std::vector<Scored<int>>{{1, 0.0}}), InvariantError);
  EXPECT_THROW(rank_and_filter(std::vector<Scored<int>>{{1, NAN}}), InvariantError);
  EXPECT_THROW(rank_and_filter(std::vector<Scored<int>>{{1, INFINITY}}), InvariantError);
  EXPECT_TRUE(rank_and_filter(std::vector<Scored<int>>{}).empty());
}
