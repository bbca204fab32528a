#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "cdisp/corpus.hpp"
#include "cdisp/errors.hpp"
#include "cdisp/targets.hpp"

namespace cdisp::cooc {

// Identity of the run that produced a table; tables merge only when equal.
struct TableMeta {
  std::uint32_t window = 2;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t corpus_digest = 0;

  bool operator==(const TableMeta&) const = default;
};

using ContextCounts = std::unordered_map<std::string, std::uint64_t>;

struct CoocTable {
  // target id -> context key -> count (only counts >= 1 are stored)
  std::unordered_map<std::string, ContextCounts> contexts;
  // target id -> number of occurrences; holds every lexicon id, so a
  // never-matched target is distinguishable from an unknown one
  std::unordered_map<std::string, std::uint64_t> occurrences;
  TableMeta meta;
};

// Counts window contexts for every target match in one sentence.
// For a match spanning [first, last], the tokens at [first-window, first-1]
// and [last+1, last+window], clipped to the sentence, each contribute one.
inline void count_sentence(const corpus::Sentence& sentence,
                           const targets::TargetLexicon& lexicon, std::uint32_t window,
                           bool case_fold, CoocTable& table) {
  const auto matches = lexicon.match(sentence);
  if (matches.empty()) return;
  std::vector<std::string> keys;
  keys.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) keys.push_back(corpus::normalize(t, case_fold));

  for (const auto& m : matches) {
    const std::string& id = lexicon.items()[m.item_index].id;
    ++table.occurrences[id];
    auto& ctx = table.contexts[id];
    const std::size_t lo = m.first >= window ? m.first - window : 0;
    for (std::size_t p = lo; p < m.first; ++p) ++ctx[keys[p]];
    const std::size_t hi = std::min(keys.size(), m.last + 1 + window);
    for (std::size_t p = m.last + 1; p < hi; ++p) ++ctx[keys[p]];
  }
}

inline void merge_into(CoocTable& into, const CoocTable& from) {
  if (!(into.meta == from.meta)) {
    throw FingerprintMismatch("cannot merge co-occurrence tables with different provenance");
  }
  for (const auto& [id, n] : from.occurrences) into.occurrences[id] += n;
  for (const auto& [id, ctx] : from.contexts) {
    auto& dst = into.contexts[id];
    for (const auto& [key, n] : ctx) dst[key] += n;
  }
}

inline CoocTable merge_counts(CoocTable a, const CoocTable& b) {
  merge_into(a, b);
  return a;
}

inline CoocTable make_empty_table(const targets::TargetLexicon& lexicon, TableMeta meta) {
  CoocTable table;
  table.meta = meta;
  for (const auto& item : lexicon.items()) table.occurrences.emplace(item.id, 0);
  return table;
}

// Single-shard counting pass over filtered sentences.
inline CoocTable count_cooccurrences(std::span<const corpus::Sentence> sentences,
                                     const targets::TargetLexicon& lexicon,
                                     std::uint32_t window, bool case_fold = true,
                                     TableMeta meta = {}) {
  if (window < 1) throw DomainError("window must be >= 1");
  meta.window = window;
  CoocTable table = make_empty_table(lexicon, meta);
  for (const auto& s : sentences) count_sentence(s, lexicon, window, case_fold, table);
  return table;
}

// Shard-parallel counting. Integer merges are order-independent, so the
// resulting table is identical for every thread count.
inline CoocTable count_cooccurrences_parallel(std::span<const corpus::Sentence> sentences,
                                              const targets::TargetLexicon& lexicon,
                                              std::uint32_t window, bool case_fold,
                                              unsigned threads, TableMeta meta = {}) {
  if (window < 1) throw DomainError("window must be >= 1");
  meta.window = window;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, sentences.size())));
  if (threads <= 1) return count_cooccurrences(sentences, lexicon, window, case_fold, meta);

  std::vector<CoocTable> shards(threads);
  std::vector<std::thread> workers;
  const std::size_t chunk = (sentences.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(sentences.size(), static_cast<std::size_t>(t) * chunk);
    const std::size_t end = std::min(sentences.size(), begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      shards[t] = count_cooccurrences(sentences.subspan(begin, end - begin), lexicon, window,
                                      case_fold, meta);
    });
  }
  for (auto& w : workers) w.join();
  CoocTable table = std::move(shards.front());
  for (unsigned t = 1; t < threads; ++t) merge_into(table, shards[t]);
  return table;
}

// Serialized counts: sorted "target<TAB>context<TAB>count" rows; rows carry
// only positive counts. Header lines are the caller's business.
inline void write_counts_tsv(std::ostream& out, const CoocTable& table) {
  std::map<std::string, const ContextCounts*> by_target;
  for (const auto& [id, ctx] : table.contexts) by_target.emplace(id, &ctx);
  for (const auto& [id, ctx] : by_target) {
    std::map<std::string, std::uint64_t> sorted(ctx->begin(), ctx->end());
    for (const auto& [key, n] : sorted) {
      out << id << '\t' << key << '\t' << n << '\n';
    }
  }
}

}  // namespace cdisp::cooc
