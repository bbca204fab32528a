#include "cdisp/cooc.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "cdisp/corpus.hpp"
#include "cdisp/targets.hpp"
#include "testutil.hpp"

namespace cdisp::cooc {
namespace {

using corpus::Sentence;
using targets::GoldItem;
using targets::TargetLexicon;

Sentence sentence_of(const std::vector<std::string>& words) {
  Sentence s;
  for (const auto& w : words) s.tokens.push_back({w, w, "XX"});
  return s;
}

TargetLexicon lexicon_of(const std::vector<std::string>& forms) {
  std::vector<GoldItem> items;
  int degree = 1;
  for (const auto& f : forms) {
    GoldItem item;
    std::istringstream parts(f);
    std::string word;
    while (parts >> word) item.form.push_back(word);
    item.degree = degree;
    degree = degree % 4 + 1;
    item.id = f;
    items.push_back(std::move(item));
  }
  return TargetLexicon(std::move(items));
}

std::uint64_t ctx(const CoocTable& t, const std::string& id, const std::string& key) {
  const auto it = t.contexts.find(id);
  if (it == t.contexts.end()) return 0;
  const auto jt = it->second.find(key);
  return jt == it->second.end() ? 0 : jt->second;
}

// ---------------------------------------------------------------------------
// count_cooccurrences
// ---------------------------------------------------------------------------

TEST(CountTest, MidSentenceTargetWindowTwo) {
  const auto lexicon = lexicon_of({"T"});
  const std::vector<Sentence> corpus{sentence_of({"a", "b", "T", "c", "d"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  EXPECT_EQ(table.occurrences.at("T"), 1u);
  EXPECT_EQ(ctx(table, "T", "a:XX"), 1u);
  EXPECT_EQ(ctx(table, "T", "b:XX"), 1u);
  EXPECT_EQ(ctx(table, "T", "c:XX"), 1u);
  EXPECT_EQ(ctx(table, "T", "d:XX"), 1u);
  EXPECT_EQ(table.contexts.at("T").size(), 4u);
}

TEST(CountTest, WindowClippedAtSentenceStart) {
  const auto lexicon = lexicon_of({"T"});
  const std::vector<Sentence> corpus{sentence_of({"T", "c"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  EXPECT_EQ(table.contexts.at("T").size(), 1u);
  EXPECT_EQ(ctx(table, "T", "c:XX"), 1u);
}

TEST(CountTest, SpanTokensExcludedFromContexts) {
  const auto lexicon = lexicon_of({"T1 T2"});
  const std::vector<Sentence> corpus{sentence_of({"a", "T1", "T2", "b"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  EXPECT_EQ(table.occurrences.at("T1 T2"), 1u);
  EXPECT_EQ(ctx(table, "T1 T2", "a:XX"), 1u);
  EXPECT_EQ(ctx(table, "T1 T2", "b:XX"), 1u);
  EXPECT_EQ(table.contexts.at("T1 T2").size(), 2u);
}

TEST(CountTest, WindowsNeverCrossSentenceBoundaries) {
  const auto lexicon = lexicon_of({"T"});
  const std::vector<Sentence> corpus{sentence_of({"a", "b"}), sentence_of({"T"}),
                                     sentence_of({"c", "d"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  EXPECT_EQ(table.occurrences.at("T"), 1u);
  EXPECT_TRUE(table.contexts.find("T") == table.contexts.end() ||
              table.contexts.at("T").empty());
}

TEST(CountTest, OtherTargetsCountAsOrdinaryContexts) {
  const auto lexicon = lexicon_of({"T", "U"});
  const std::vector<Sentence> corpus{sentence_of({"T", "U", "x"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  EXPECT_EQ(ctx(table, "T", "u:XX"), 1u);  // context keys are case-folded
  EXPECT_EQ(ctx(table, "U", "t:XX"), 1u);
}

TEST(CountTest, NeverMatchedTargetHasZeroOccurrences) {
  const auto lexicon = lexicon_of({"T", "missing"});
  const std::vector<Sentence> corpus{sentence_of({"T"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  EXPECT_EQ(table.occurrences.at("missing"), 0u);
}

TEST(CountTest, InteriorTargetsSaturateTheWindowBound) {
  // No deletions, no boundary targets: sum of contexts = occurrences * 2w.
  const auto lexicon = lexicon_of({"T"});
  const std::vector<Sentence> corpus{sentence_of({"a", "b", "T", "c", "d"}),
                                     sentence_of({"x", "y", "T", "y", "x"})};
  for (const std::uint32_t w : {1u, 2u}) {
    const auto table = count_cooccurrences(corpus, lexicon, w);
    std::uint64_t sum = 0;
    for (const auto& [key, n] : table.contexts.at("T")) sum += n;
    EXPECT_EQ(sum, table.occurrences.at("T") * 2 * w);
  }
}

TEST(CountTest, ContextMassBoundHolds) {
  const auto text = testutil::read_file(CDISP_TEST_DATA_DIR "/toy_corpus.vrt");
  std::istringstream in(text);
  const auto sentences = corpus::parse_vertical(in);
  std::istringstream gold_in(testutil::read_file(CDISP_TEST_DATA_DIR "/toy_gold.tsv"));
  const TargetLexicon lexicon(targets::load_goldset(gold_in));
  const auto table = count_cooccurrences(sentences, lexicon, 2);
  for (const auto& [id, contexts] : table.contexts) {
    std::uint64_t sum = 0;
    for (const auto& [key, n] : contexts) {
      EXPECT_GE(n, 1u);
      sum += n;
    }
    EXPECT_LE(sum, table.occurrences.at(id) * 2 * table.meta.window);
    if (!contexts.empty()) {
      EXPECT_GE(table.occurrences.at(id), 1u);
    }
  }
}

TEST(CountTest, MatchesNaiveRecountOnToyCorpus) {
  const auto text = testutil::read_file(CDISP_TEST_DATA_DIR "/toy_corpus.vrt");
  std::istringstream in(text);
  const auto sentences = corpus::parse_vertical(in);
  std::istringstream gold_in(testutil::read_file(CDISP_TEST_DATA_DIR "/toy_gold.tsv"));
  const TargetLexicon lexicon(targets::load_goldset(gold_in));

  for (const std::uint32_t w : {1u, 2u, 3u}) {
    const auto table = count_cooccurrences(sentences, lexicon, w);
    const auto naive = testutil::naive_window_count(sentences, lexicon, w, true);
    EXPECT_EQ(table.occurrences.size(), naive.occurrences.size());
    for (const auto& [id, n] : naive.occurrences) EXPECT_EQ(table.occurrences.at(id), n);
    for (const auto& [id, contexts] : naive.contexts) {
      ASSERT_TRUE(table.contexts.contains(id));
      EXPECT_EQ(table.contexts.at(id).size(), contexts.size());
      for (const auto& [key, n] : contexts) EXPECT_EQ(ctx(table, id, key), n);
    }
  }
}

TEST(CountTest, WindowMustBePositive) {
  const auto lexicon = lexicon_of({"T"});
  EXPECT_THROW(count_cooccurrences({}, lexicon, 0), DomainError);
}

// ---------------------------------------------------------------------------
// merge_counts
// ---------------------------------------------------------------------------

TEST(MergeTest, IdentityElement) {
  const auto lexicon = lexicon_of({"T"});
  const std::vector<Sentence> corpus{sentence_of({"a", "T", "b"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  const auto empty = make_empty_table(lexicon, table.meta);
  const auto merged = merge_counts(table, empty);
  EXPECT_EQ(merged.occurrences, table.occurrences);
  EXPECT_EQ(merged.contexts, table.contexts);
}

TEST(MergeTest, CommutativeAndAssociative) {
  const auto lexicon = lexicon_of({"T"});
  const std::vector<Sentence> c1{sentence_of({"a", "T"})};
  const std::vector<Sentence> c2{sentence_of({"T", "b"})};
  const std::vector<Sentence> c3{sentence_of({"x", "T", "y"})};
  const auto t1 = count_cooccurrences(c1, lexicon, 2);
  const auto t2 = count_cooccurrences(c2, lexicon, 2);
  const auto t3 = count_cooccurrences(c3, lexicon, 2);

  const auto ab = merge_counts(t1, t2);
  const auto ba = merge_counts(t2, t1);
  EXPECT_EQ(ab.contexts, ba.contexts);
  EXPECT_EQ(ab.occurrences, ba.occurrences);

  const auto left = merge_counts(merge_counts(t1, t2), t3);
  const auto right = merge_counts(t1, merge_counts(t2, t3));
  EXPECT_EQ(left.contexts, right.contexts);
  EXPECT_EQ(left.occurrences, right.occurrences);
}

TEST(MergeTest, ShardsEqualConcatenation) {
  const auto text = testutil::read_file(CDISP_TEST_DATA_DIR "/toy_corpus.vrt");
  std::istringstream in(text);
  const auto sentences = corpus::parse_vertical(in);
  std::istringstream gold_in(testutil::read_file(CDISP_TEST_DATA_DIR "/toy_gold.tsv"));
  const TargetLexicon lexicon(targets::load_goldset(gold_in));

  const auto whole = count_cooccurrences(sentences, lexicon, 2);
  const std::size_t cut = sentences.size() / 3;
  const auto shard1 =
      count_cooccurrences(std::span(sentences).subspan(0, cut), lexicon, 2);
  const auto shard2 = count_cooccurrences(std::span(sentences).subspan(cut), lexicon, 2);
  const auto merged = merge_counts(shard1, shard2);
  EXPECT_EQ(merged.contexts, whole.contexts);
  EXPECT_EQ(merged.occurrences, whole.occurrences);
}

TEST(MergeTest, MetaMismatchThrows) {
  const auto lexicon = lexicon_of({"T"});
  const std::vector<Sentence> c{sentence_of({"a", "T"})};
  const auto t1 = count_cooccurrences(c, lexicon, 1);
  const auto t2 = count_cooccurrences(c, lexicon, 2);
  EXPECT_THROW(merge_counts(t1, t2), FingerprintMismatch);

  TableMeta meta;
  meta.window = 1;
  meta.config_fingerprint = 42;
  const auto t3 = count_cooccurrences(c, lexicon, 1, true, meta);
  EXPECT_THROW(merge_counts(t1, t3), FingerprintMismatch);
}

// ---------------------------------------------------------------------------
// parallel counting
// ---------------------------------------------------------------------------

TEST(ParallelCountTest, ThreadCountDoesNotChangeTheTable) {
  const auto text = testutil::read_file(CDISP_TEST_DATA_DIR "/toy_corpus.vrt");
  std::istringstream in(text);
  const auto sentences = corpus::parse_vertical(in);
  std::istringstream gold_in(testutil::read_file(CDISP_TEST_DATA_DIR "/toy_gold.tsv"));
  const TargetLexicon lexicon(targets::load_goldset(gold_in));

  const auto serial = count_cooccurrences(sentences, lexicon, 2);
  for (const unsigned threads : {1u, 2u, 3u, 8u}) {
    const auto parallel =
        count_cooccurrences_parallel(sentences, lexicon, 2, true, threads);
    EXPECT_EQ(parallel.contexts, serial.contexts) << threads << " threads";
    EXPECT_EQ(parallel.occurrences, serial.occurrences) << threads << " threads";
  }
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

TEST(SerializeTest, RowsSortedAndPositive) {
  const auto lexicon = lexicon_of({"T", "U"});
  const std::vector<Sentence> corpus{sentence_of({"b", "T", "a", "U", "c"}),
                                     sentence_of({"a", "T", "a"})};
  const auto table = count_cooccurrences(corpus, lexicon, 2);
  std::ostringstream out;
  write_counts_tsv(out, table);
  const auto text = out.str();

  std::istringstream lines(text);
  std::string line;
  std::string prev;
  while (std::getline(lines, line)) {
    EXPECT_LT(prev, line);  // strict lexicographic order of target\tcontext
    prev = line;
    const auto tab2 = line.rfind('\t');
    EXPECT_GE(std::stoull(line.substr(tab2 + 1)), 1u);
  }
}

}  // namespace
}  // namespace cdisp::cooc
