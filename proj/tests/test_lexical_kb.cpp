#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"

using namespace natlog;
using natlog::testing::ToyResources;
using R = Relation;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("natlog_kb_" + name);
  std::ofstream(p) << content;
  return p.string();
}

}  // namespace

TEST(LexicalKB, ToyLookups) {
  const auto& kb = ToyResources::get().kb;
  EXPECT_EQ(kb.lookup("goose", Pos::kNoun, R::kForward, 1), (std::vector<std::string>{"bird"}));
  const auto hypers = kb.lookup("goose", Pos::kNoun, R::kForward, 2);
  EXPECT_NE(std::find(hypers.begin(), hypers.end(), "chordate"), hypers.end());
  const auto hypos = kb.lookup("kid", Pos::kNoun, R::kReverse);
  EXPECT_NE(std::find(hypos.begin(), hypos.end(), "boy"), hypos.end());
  const auto syn = kb.lookup("kid", Pos::kNoun, R::kEquivalence);
  EXPECT_NE(std::find(syn.begin(), syn.end(), "child"), syn.end());
  const auto alt = kb.lookup("run", Pos::kVerb, R::kAlternation);
  EXPECT_NE(std::find(alt.begin(), alt.end(), "sleep"), alt.end());
}

TEST(LexicalKB, RejectsUnservedRelations) {
  const auto& kb = ToyResources::get().kb;
  EXPECT_THROW(kb.lookup("run", Pos::kVerb, R::kNegation), ConstraintError);
  EXPECT_THROW(kb.lookup("run", Pos::kVerb, R::kCover), ConstraintError);
  EXPECT_THROW(kb.lookup("run", Pos::kVerb, R::kIndependence), ConstraintError);
}

TEST(LexicalKB, SymmetricClosure) {
  LexicalKB kb;
  kb.add({"dog", Pos::kNoun, {"hound"}, {{"animal", 1}}, {}, {"cat"}, {}});
  kb.add({"animal", Pos::kNoun, {}, {}, {}, {}, {}});
  kb.add({"hound", Pos::kNoun, {}, {}, {}, {}, {}});
  kb.add({"cat", Pos::kNoun, {}, {}, {}, {}, {}});
  EXPECT_EQ(kb.lookup("animal", Pos::kNoun, R::kReverse), (std::vector<std::string>{"dog"}));
  EXPECT_EQ(kb.lookup("hound", Pos::kNoun, R::kEquivalence), (std::vector<std::string>{"dog"}));
  EXPECT_EQ(kb.antonyms("cat", Pos::kNoun), (std::vector<std::string>{"dog"}));
}

TEST(LexicalKB, CohyponymsShareADirectHypernym) {
  LexicalKB kb;
  kb.add({"duck", Pos::kNoun, {}, {{"bird", 1}}, {}, {}, {}});
  kb.add({"goose", Pos::kNoun, {}, {{"bird", 1}}, {}, {}, {}});
  kb.add({"bird", Pos::kNoun, {}, {}, {}, {}, {}});
  EXPECT_EQ(kb.cohyponyms("duck", Pos::kNoun), (std::vector<std::string>{"goose"}));
  EXPECT_EQ(kb.lookup("goose", Pos::kNoun, R::kAlternation), (std::vector<std::string>{"duck"}));
}

TEST(LexicalKB, DistanceLimit) {
  LexicalKB kb;
  kb.add({"goose", Pos::kNoun, {}, {{"bird", 1}, {"animal", 3}}, {}, {}, {}});
  EXPECT_EQ(kb.lookup("goose", Pos::kNoun, R::kForward, 2), (std::vector<std::string>{"bird"}));
  EXPECT_EQ(kb.lookup("goose", Pos::kNoun, R::kForward, 3).size(), 2u);
}

TEST(LexicalKB, ValidationErrors) {
  LexicalKB kb;
  EXPECT_THROW(kb.add({"", Pos::kNoun, {}, {}, {}, {}, {}}), InputError);
  EXPECT_THROW(kb.add({"x", Pos::kNoun, {}, {{"y", 0}}, {}, {}, {}}), InputError);
}

TEST(LexicalKB, LoaderReportsLineNumbers) {
  const auto path = write_temp("bad.jsonl", "{\"lemma\":\"dog\",\"pos\":\"noun\"}\n{not json}\n");
  try {
    load_kb(path);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_kb("/nonexistent/kb.jsonl"), InputError);
  const auto bad_pos = write_temp("badpos.jsonl", "{\"lemma\":\"dog\",\"pos\":\"pronoun\"}\n");
  EXPECT_THROW(load_kb(bad_pos), InputError);
}

TEST(LexicalKB, InventoryLoading) {
  const auto& kb = ToyResources::get().kb;
  EXPECT_TRUE(kb.in_inventory("water", Attachment::kAdjective));
  EXPECT_TRUE(kb.in_inventory("loudly", Attachment::kAdverb));
  EXPECT_FALSE(kb.insertions(Attachment::kVerbPP).empty());
  const auto prefixes = kb.negation_phrases(NegationKind::kAssertionPrefix);
  EXPECT_NE(std::find(prefixes.begin(), prefixes.end(), "It is not true that"), prefixes.end());
  EXPECT_NE(std::find(prefixes.begin(), prefixes.end(), "It is false that"), prefixes.end());

  LexicalKB fresh;
  const auto bad = write_temp("inv.tsv", "adj\n");
  EXPECT_THROW(load_inventory(fresh, bad), InputError);
  const auto unknown = write_temp("inv2.tsv", "frobnicate\tfoo\n");
  EXPECT_THROW(load_inventory(fresh, unknown), InputError);
}

TEST(LexicalKB, PluralFallback) {
  const auto& kb = ToyResources::get().kb;
  const auto a = kb.lookup("kids", Pos::kNoun, R::kReverse);
  auto b = kb.lookup("kid", Pos::kNoun, R::kReverse);
  for (auto& w : b) w = text::pluralize(w);
  EXPECT_EQ(a, b);
  EXPECT_NE(std::find(a.begin(), a.end(), "boys"), a.end());
}
