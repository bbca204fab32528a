#include "cdisp/targets.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "testutil.hpp"

namespace cdisp::targets {
namespace {

std::vector<GoldItem> load(const std::string& text) {
  std::istringstream in(text);
  return load_goldset(in);
}

corpus::Sentence sentence_of(const std::vector<std::string>& surfaces) {
  corpus::Sentence s;
  for (const auto& w : surfaces) s.tokens.push_back({w, w, "XX"});
  return s;
}

// ---------------------------------------------------------------------------
// load_goldset
// ---------------------------------------------------------------------------

TEST(LoadGoldsetTest, SingleTokenForm) {
  const auto items = load("trotz\t2\n");
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].form, (std::vector<std::string>{"trotz"}));
  EXPECT_EQ(items[0].degree, 2);
  EXPECT_EQ(items[0].id, "trotz");
}

TEST(LoadGoldsetTest, MultiTokenFormSplitsOnSpaces) {
  const auto items = load("am Rande\t1\n");
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].form, (std::vector<std::string>{"am", "Rande"}));
  EXPECT_EQ(items[0].id, "am Rande");
}

TEST(LoadGoldsetTest, DegreeOutOfRangeThrows) {
  EXPECT_THROW(load("x\t7\n"), BadDegree);
  EXPECT_THROW(load("x\t0\n"), BadDegree);
  EXPECT_THROW(load("x\t-1\n"), BadDegree);
  EXPECT_THROW(load("x\tzwei\n"), BadDegree);
}

TEST(LoadGoldsetTest, DuplicateFormThrows) {
  EXPECT_THROW(load("trotz\t2\ntrotz\t3\n"), DuplicateForm);
}

TEST(LoadGoldsetTest, MalformedLineThrows) {
  EXPECT_THROW(load("nur-eine-spalte\n"), MalformedLine);
  EXPECT_THROW(load("a\t1\textra\n"), MalformedLine);
  EXPECT_THROW(load("\t2\n"), MalformedLine);
}

TEST(LoadGoldsetTest, CommentsAndBlankLinesIgnored) {
  const auto items = load("# header\n\ntrotz\t2\n# tail\n");
  EXPECT_EQ(items.size(), 1u);
}

TEST(LoadGoldsetTest, ToyGoldSetLoads) {
  std::istringstream in(testutil::read_file(CDISP_TEST_DATA_DIR "/toy_gold.tsv"));
  const auto items = load_goldset(in);
  EXPECT_EQ(items.size(), 8u);
  for (const auto& item : items) {
    EXPECT_GE(item.degree, 1);
    EXPECT_LE(item.degree, 4);
  }
}

// ---------------------------------------------------------------------------
// TargetLexicon::match
// ---------------------------------------------------------------------------

TEST(MatchTargetsTest, MultiTokenSpan) {
  const TargetLexicon lexicon(load("am Rande\t1\n"));
  const auto matches = lexicon.match(sentence_of({"am", "Rande", "des", "Waldes"}));
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_EQ(matches[0].first, 0u);
  EXPECT_EQ(matches[0].last, 1u);
  EXPECT_EQ(lexicon.items()[matches[0].item_index].id, "am Rande");
}

TEST(MatchTargetsTest, LongestMatchWins) {
  const TargetLexicon lexicon(load("trotz\t2\ntrotz Sturm\t1\n"), MatchField::surface, true,
                              /*longest_match=*/true);
  const auto matches = lexicon.match(sentence_of({"trotz", "Sturm"}));
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_EQ(lexicon.items()[matches[0].item_index].id, "trotz Sturm");
  EXPECT_EQ(matches[0].first, 0u);
  EXPECT_EQ(matches[0].last, 1u);
}

TEST(MatchTargetsTest, ShortestMatchWhenLongestDisabled) {
  const TargetLexicon lexicon(load("trotz\t2\ntrotz Sturm\t1\n"), MatchField::surface, true,
                              /*longest_match=*/false);
  const auto matches = lexicon.match(sentence_of({"trotz", "Sturm"}));
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_EQ(lexicon.items()[matches[0].item_index].id, "trotz");
}

TEST(MatchTargetsTest, EmptyLexiconMatchesNothing) {
  const TargetLexicon lexicon(std::vector<GoldItem>{});
  EXPECT_TRUE(lexicon.match(sentence_of({"am", "Rande"})).empty());
}

TEST(MatchTargetsTest, CaseFoldedSurfaceComparison) {
  const TargetLexicon lexicon(load("am Rande\t1\nwährend\t3\n"));
  const auto m1 = lexicon.match(sentence_of({"Am", "Rande", "der", "Stadt"}));
  ASSERT_EQ(m1.size(), 1u);
  const auto m2 = lexicon.match(sentence_of({"WÄHREND", "der", "Nacht"}));
  ASSERT_EQ(m2.size(), 1u);
}

TEST(MatchTargetsTest, CaseSensitiveWhenFoldingDisabled) {
  const TargetLexicon lexicon(load("am Rande\t1\n"), MatchField::surface, /*case_fold=*/false);
  EXPECT_TRUE(lexicon.match(sentence_of({"Am", "Rande"})).empty());
  EXPECT_EQ(lexicon.match(sentence_of({"am", "Rande"})).size(), 1u);
}

TEST(MatchTargetsTest, LemmaFieldMatching) {
  const TargetLexicon lexicon(load("laufen\t2\n"), MatchField::lemma);
  corpus::Sentence s;
  s.tokens.push_back({"lief", "laufen", "VVFIN"});
  const auto matches = lexicon.match(s);
  ASSERT_EQ(matches.size(), 1u);
}

TEST(MatchTargetsTest, MatchesDoNotOverlap) {
  const TargetLexicon lexicon(load("a a\t1\n"));
  const auto matches = lexicon.match(sentence_of({"a", "a", "a", "a", "a"}));
  // greedy left-to-right: [0,1], [2,3]; the final lone "a" cannot match
  ASSERT_EQ(matches.size(), 2u);
  EXPECT_EQ(matches[0].first, 0u);
  EXPECT_EQ(matches[0].last, 1u);
  EXPECT_EQ(matches[1].first, 2u);
  EXPECT_EQ(matches[1].last, 3u);
}

TEST(MatchTargetsTest, SingleTokenLexiconCountsEveryOccurrence) {
  const TargetLexicon lexicon(load("mit\t4\n"));
  const auto s = sentence_of({"mit", "dem", "mit", "mit", "Rad"});
  EXPECT_EQ(lexicon.match(s).size(), 3u);
}

TEST(MatchTargetsTest, SpansStayInBounds) {
  const TargetLexicon lexicon(load("am Rande\t1\nvor\t4\n"));
  for (const auto& words : {std::vector<std::string>{"am"},
                            std::vector<std::string>{"Rande", "am"},
                            std::vector<std::string>{"vor", "am", "Rande"}}) {
    const auto s = sentence_of(words);
    for (const auto& m : lexicon.match(s)) {
      EXPECT_LE(m.first, m.last);
      EXPECT_LT(m.last, s.tokens.size());
    }
  }
}

TEST(MatchTargetsTest, Deterministic) {
  const TargetLexicon lexicon(load("a b\t1\nb c\t2\nc\t3\n"));
  const auto s = sentence_of({"a", "b", "c", "b", "c", "a"});
  const auto m1 = lexicon.match(s);
  const auto m2 = lexicon.match(s);
  ASSERT_EQ(m1.size(), m2.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    EXPECT_EQ(m1[i].item_index, m2[i].item_index);
    EXPECT_EQ(m1[i].first, m2[i].first);
  }
}

TEST(MatchTargetsTest, IsTargetKeyCoversAllFormTokens) {
  const TargetLexicon lexicon(load("am Rande\t1\nvor\t4\n"));
  EXPECT_TRUE(lexicon.is_target_key({"Am", "an", "APPRART"}));
  EXPECT_TRUE(lexicon.is_target_key({"RANDE", "Rand", "NN"}));
  EXPECT_TRUE(lexicon.is_target_key({"vor", "vor", "APPR"}));
  EXPECT_FALSE(lexicon.is_target_key({"Haus", "Haus", "NN"}));
}

TEST(TargetLexiconTest, RejectsInvalidItems) {
  EXPECT_THROW(TargetLexicon({GoldItem{{"a"}, 5, "a"}}), BadDegree);
  EXPECT_THROW(TargetLexicon({GoldItem{{"a"}, 1, "a"}, GoldItem{{"a"}, 2, "a"}}), DuplicateForm);
  EXPECT_THROW(TargetLexicon({GoldItem{{}, 1, "x"}}), DomainError);
}

}  // namespace
}  // namespace cdisp::targets
