#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cdisp/cooc.hpp"
#include "cdisp/errors.hpp"
#include "cdisp/textutil.hpp"

namespace cdisp::measures {

// Shannon entropy of a count distribution, H = log(N) - sum(c*log c)/N,
// rescaled from bits when log_base != 2. The single-type case is exactly 0.
inline double entropy_of_counts(std::span<const std::uint64_t> counts, double log_base = 2.0) {
  if (!(log_base > 1.0)) throw DomainError("entropy: log base must be > 1");
  if (counts.empty()) throw NoContexts("entropy: empty context distribution");
  double total = 0.0;
  double weighted = 0.0;
  for (const auto c : counts) {
    if (c == 0) throw DomainError("entropy: zero count stored in distribution");
    const double dc = static_cast<double>(c);
    total += dc;
    weighted += dc * std::log2(dc);
  }
  const double bits = std::log2(total) - weighted / total;
  return log_base == 2.0 ? bits : bits / std::log2(log_base);
}

// Entropy of one target's contexts. Keys are visited in sorted order so the
// floating-point sum never depends on hash-map layout.
inline double entropy(const cooc::ContextCounts& contexts, double log_base = 2.0) {
  if (contexts.empty()) throw NoContexts("entropy: target has no contexts");
  std::vector<std::pair<std::string, std::uint64_t>> sorted(contexts.begin(), contexts.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::uint64_t> counts;
  counts.reserve(sorted.size());
  for (const auto& [key, n] : sorted) counts.push_back(n);
  return entropy_of_counts(counts, log_base);
}

inline std::uint64_t frequency(const cooc::CoocTable& table, const std::string& id) {
  const auto it = table.occurrences.find(id);
  if (it == table.occurrences.end()) throw UnknownTarget("frequency: unknown target: " + id);
  return it->second;
}

inline std::uint64_t context_types(const cooc::CoocTable& table, const std::string& id) {
  if (!table.occurrences.contains(id)) {
    throw UnknownTarget("context_types: unknown target: " + id);
  }
  const auto it = table.contexts.find(id);
  return it == table.contexts.end() ? 0 : it->second.size();
}

struct ScoreRow {
  double entropy = 0.0;
  std::uint64_t frequency = 0;
  std::uint64_t types = 0;
  bool no_data = false;  // target never occurred; entropy recorded as 0

  bool operator==(const ScoreRow&) const = default;
};

struct ScoreTable {
  std::map<std::string, ScoreRow> rows;  // keyed by target id
  double log_base = 2.0;
};

// Scores every target known to the table. Never-matched targets get
// (0, 0, 0) with the no-data flag instead of being dropped.
inline ScoreTable score_all(const cooc::CoocTable& table, double log_base = 2.0) {
  ScoreTable scores;
  scores.log_base = log_base;
  for (const auto& [id, occ] : table.occurrences) {
    ScoreRow row;
    row.frequency = occ;
    row.types = context_types(table, id);
    if (row.types > 0) {
      row.entropy = entropy(table.contexts.at(id), log_base);
    } else {
      row.no_data = occ == 0;
    }
    scores.rows.emplace(id, row);
  }
  return scores;
}

inline std::string format_entropy(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

// "target<TAB>frequency<TAB>types<TAB>entropy", sorted by target id.
inline void write_scores_tsv(std::ostream& out, const ScoreTable& scores) {
  for (const auto& [id, row] : scores.rows) {
    out << id << '\t' << row.frequency << '\t' << row.types << '\t'
        << format_entropy(row.entropy) << '\n';
  }
}

inline ScoreTable read_scores_tsv(std::istream& in, double log_base = 2.0) {
  ScoreTable scores;
  scores.log_base = log_base;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = strip_cr(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text, '\t');
    if (fields.size() != 4) throw MalformedLine(line_number, "expected 4 score columns");
    ScoreRow row;
    try {
      row.frequency = std::stoull(std::string(fields[1]));
      row.types = std::stoull(std::string(fields[2]));
      row.entropy = std::stod(std::string(fields[3]));
    } catch (const std::exception&) {
      throw MalformedLine(line_number, "unparseable score value");
    }
    row.no_data = row.frequency == 0;
    if (!scores.rows.emplace(std::string(fields[0]), row).second) {
      throw MalformedLine(line_number, "duplicate target id: " + std::string(fields[0]));
    }
  }
  return scores;
}

}  // namespace cdisp::measures
