#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdisp/errors.hpp"
#include "cdisp/measures.hpp"
#include "cdisp/stats.hpp"
#include "cdisp/targets.hpp"

namespace cdisp::evalreport {

// Column order matches the report layout.
inline constexpr std::array<std::string_view, 3> kMeasureNames{"entropy", "frequency", "types"};
inline constexpr std::size_t kEntropy = 0;
inline constexpr std::size_t kFrequency = 1;
inline constexpr std::size_t kTypes = 2;

inline constexpr std::array<std::pair<int, int>, 6> kDegreePairs{
    {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

// Gold degrees and measure values aligned by position, sorted by target id.
// This is the numeric view the whole evaluation battery runs on.
struct ScoreColumns {
  std::vector<std::string> ids;
  std::vector<double> degrees;
  std::array<std::vector<double>, 3> values;  // entropy, frequency, types
  std::vector<bool> no_data;

  std::size_t size() const { return ids.size(); }
};

// Joins scores with the gold set. Gold items without a score row raise
// MissingScores; no-data rows are kept or dropped per include_missing.
inline ScoreColumns make_columns(const measures::ScoreTable& scores,
                                 const std::vector<targets::GoldItem>& gold,
                                 bool include_missing = true) {
  if (gold.empty()) throw EmptyGoldSet("gold set is empty");
  std::vector<const targets::GoldItem*> ordered;
  ordered.reserve(gold.size());
  for (const auto& item : gold) ordered.push_back(&item);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });

  std::vector<std::string> missing;
  ScoreColumns cols;
  for (const auto* item : ordered) {
    const auto it = scores.rows.find(item->id);
    if (it == scores.rows.end()) {
      missing.push_back(item->id);
      continue;
    }
    const auto& row = it->second;
    if (!include_missing && row.no_data) continue;
    cols.ids.push_back(item->id);
    cols.degrees.push_back(static_cast<double>(item->degree));
    cols.values[kEntropy].push_back(row.entropy);
    cols.values[kFrequency].push_back(static_cast<double>(row.frequency));
    cols.values[kTypes].push_back(static_cast<double>(row.types));
    cols.no_data.push_back(row.no_data);
  }
  if (!missing.empty()) throw MissingScores(std::move(missing));
  return cols;
}

struct RhoResult {
  double rho = 0.0;
  double p = 1.0;
  bool degenerate = false;  // measure column was constant
};

struct ApCell {
  double ap = 0.0;
  double expected_ties = 0.0;  // expected AP over random tie orders
};

struct Comparison {
  std::size_t measure_a = 0;
  std::size_t measure_b = 0;
  stats::CorrelationComparison result;
  bool available = false;  // false when an input correlation is degenerate or |r| = 1
};

struct EvalReport {
  std::array<RhoResult, 3> rho;
  std::array<std::array<ApCell, 3>, 6> ap;  // [degree pair][measure]
  std::array<Comparison, 3> comparisons;    // freq/types, freq/entropy, types/entropy
  std::size_t n_evaluated = 0;
  std::size_t n_no_data = 0;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t corpus_digest = 0;
};

namespace detail {

// Ranking for AP: descending score, ties broken by ascending target id.
inline std::vector<std::size_t> rank_descending(const ScoreColumns& cols, std::size_t measure,
                                                const std::vector<std::size_t>& subset) {
  std::vector<std::size_t> order = subset;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = cols.values[measure][a];
    const double vb = cols.values[measure][b];
    if (va != vb) return va > vb;
    return cols.ids[a] < cols.ids[b];
  });
  return order;
}

}  // namespace detail

// AP for one degree pair and one measure: restrict to items of the two
// degrees, rank descending, positives are the higher degree.
inline ApCell pair_ap(const ScoreColumns& cols, std::size_t measure, int degree_lo,
                      int degree_hi) {
  std::vector<std::size_t> subset;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const int d = static_cast<int>(cols.degrees[i]);
    if (d != degree_lo && d != degree_hi) continue;
    subset.push_back(i);
    if (d == degree_hi) ++positives;
  }
  if (positives == 0 || positives == subset.size()) {
    throw EmptyClass("degree pair " + std::to_string(degree_lo) + " vs " +
                     std::to_string(degree_hi) + " lacks items in one class");
  }
  const auto order = detail::rank_descending(cols, measure, subset);
  std::vector<bool> labels;
  labels.reserve(order.size());
  for (const auto i : order) {
    labels.push_back(static_cast<int>(cols.degrees[i]) == degree_hi);
  }
  ApCell cell;
  cell.ap = stats::average_precision(labels);

  std::vector<stats::TieGroup> groups;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    const double v = cols.values[measure][order[i]];
    stats::TieGroup g;
    while (j < order.size() && cols.values[measure][order[j]] == v) {
      ++g.size;
      if (labels[j]) ++g.positives;
      ++j;
    }
    groups.push_back(g);
    i = j;
  }
  cell.expected_ties = stats::expected_average_precision(groups);
  return cell;
}

// Fills rho (with p), the 6x3 AP matrix, and the three Steiger comparisons.
inline EvalReport build_report(const ScoreColumns& cols) {
  if (cols.size() == 0) throw EmptyGoldSet("no items to evaluate");
  EvalReport report;
  report.n_evaluated = cols.size();
  for (const auto nd : cols.no_data) {
    if (nd) ++report.n_no_data;
  }

  for (std::size_t m = 0; m < 3; ++m) {
    try {
      const double rho = stats::spearman_rho(cols.degrees, cols.values[m]);
      report.rho[m].rho = rho;
      report.rho[m].p = stats::rho_t_test_p(rho, cols.size());
    } catch (const DegenerateSample&) {
      report.rho[m].degenerate = true;
      report.rho[m].rho = 0.0;
      report.rho[m].p = 1.0;
    }
  }

  for (std::size_t pi = 0; pi < kDegreePairs.size(); ++pi) {
    for (std::size_t m = 0; m < 3; ++m) {
      report.ap[pi][m] = pair_ap(cols, m, kDegreePairs[pi].first, kDegreePairs[pi].second);
    }
  }

  const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{
      {{kFrequency, kTypes}, {kFrequency, kEntropy}, {kTypes, kEntropy}}};
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    auto& cmp = report.comparisons[c];
    cmp.measure_a = pairs[c].first;
    cmp.measure_b = pairs[c].second;
    if (report.rho[cmp.measure_a].degenerate || report.rho[cmp.measure_b].degenerate) continue;
    try {
      const double r12 =
          stats::spearman_rho(cols.values[cmp.measure_a], cols.values[cmp.measure_b]);
      cmp.result = stats::steiger_z(report.rho[cmp.measure_a].rho, report.rho[cmp.measure_b].rho,
                                    r12, cols.size());
      cmp.available = true;
    } catch (const DegenerateSample&) {
      cmp.available = false;
    } catch (const DomainError&) {
      cmp.available = false;  // e.g. a perfect correlation on tiny samples
    }
  }
  return report;
}

inline EvalReport build_report(const measures::ScoreTable& scores,
                               const std::vector<targets::GoldItem>& gold,
                               bool include_missing = true) {
  return build_report(make_columns(scores, gold, include_missing));
}

// Report table: one row per degree pair, then the rho row; columns are the
// three measures. Header comments are the caller's business.
inline void write_report_tsv(std::ostream& out, const EvalReport& report) {
  out << "row\tentropy\tfrequency\ttypes\n";
  for (std::size_t pi = 0; pi < kDegreePairs.size(); ++pi) {
    out << "ap_" << kDegreePairs[pi].first << 'v' << kDegreePairs[pi].second;
    for (std::size_t m = 0; m < 3; ++m) {
      out << '\t' << measures::format_entropy(report.ap[pi][m].ap);
    }
    out << '\n';
  }
  out << "spearman_rho";
  for (std::size_t m = 0; m < 3; ++m) {
    if (report.rho[m].degenerate) {
      out << "\tNA";
    } else {
      out << '\t' << measures::format_entropy(report.rho[m].rho);
    }
  }
  out << '\n';
}

}  // namespace cdisp::evalreport
