#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "cdisp/errors.hpp"

namespace cdisp::stats {

// Two equal-length observation vectors, as consumed by the rank
// correlation routines.
struct PairedSample {
  std::vector<double> x;
  std::vector<double> y;

  PairedSample(std::vector<double> xs, std::vector<double> ys)
      : x(std::move(xs)), y(std::move(ys)) {
    if (x.size() != y.size()) throw DomainError("paired sample sides differ in length");
  }
  std::size_t size() const { return x.size(); }
};

// Ranks 1..n; tied values share the mean of their rank range.
inline std::vector<double> midranks(std::span<const double> values) {
  if (values.empty()) throw DomainError("midranks: empty input");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const double v : values) {
    if (std::isnan(v)) throw DomainError("midranks: NaN input");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) tie; their ranks are i+1..j+1
    const double mean_rank = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

// Pearson correlation of two equal-length vectors.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("pearson: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateSample("pearson: constant side");
  return sxy / std::sqrt(sxx * syy);
}

// Spearman's rho: Pearson correlation of midranks.
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spearman_rho: length mismatch");
  if (x.size() < 3) throw DomainError("spearman_rho: need n >= 3");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson(rx, ry);
}

inline double spearman_rho(const PairedSample& sample) {
  return spearman_rho(std::span<const double>(sample.x), std::span<const double>(sample.y));
}

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction,
// cf. https://en.wikipedia.org/wiki/Beta_function#Incomplete_beta_function
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || std::isnan(x)) throw DomainError("ibeta: bad parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) so the fraction converges fast.
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(1.0 - x, b, a);

  const double log_front = a * std::log(x) + b * std::log1p(-x) -
                           (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double dm = static_cast<double>(m);
    // even term
    double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    // odd term
    num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) break;
  }
  return std::exp(log_front) * h / a;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// CDF of Student's t with df degrees of freedom.
inline double student_t_cdf(double t, int df) {
  if (df < 1) throw DomainError("student_t_cdf: df must be >= 1");
  if (std::isnan(t)) throw DomainError("student_t_cdf: NaN");
  const double v = static_cast<double>(df);
  const double tail = 0.5 * regularized_incomplete_beta(v / (v + t * t), v / 2.0, 0.5);
  return t >= 0.0 ? 1.0 - tail : tail;
}

// Two-tailed p-value of rho != 0 via the t approximation with n-2 df.
// |rho| = 1 returns 0 by convention.
inline double rho_t_test_p(double rho, std::size_t n) {
  if (std::fabs(rho) > 1.0 || std::isnan(rho)) throw DomainError("rho_t_test_p: |rho| > 1");
  if (n < 3) throw DomainError("rho_t_test_p: need n >= 3");
  if (std::fabs(rho) == 1.0) return 0.0;
  const double dn = static_cast<double>(n);
  const double t = rho * std::sqrt((dn - 2.0) / (1.0 - rho * rho));
  const double p = 2.0 * (1.0 - student_t_cdf(std::fabs(t), static_cast<int>(n) - 2));
  return std::clamp(p, 0.0, 1.0);
}

struct CorrelationComparison {
  double r1 = 0.0;
  double r2 = 0.0;
  double r12 = 0.0;
  std::size_t n = 0;
  double z_stat = 0.0;
  double p_two_tailed = 1.0;
};

// Steiger's test for two dependent correlations sharing one variable,
// in the pooled-mean form: r1 = cor(g, m1), r2 = cor(g, m2), r12 = cor(m1, m2).
inline CorrelationComparison steiger_z(double r1, double r2, double r12, std::size_t n) {
  for (const double r : {r1, r2, r12}) {
    if (!(std::fabs(r) < 1.0)) throw DomainError("steiger_z: correlations must be in (-1, 1)");
  }
  if (n < 4) throw DomainError("steiger_z: need n >= 4");
  const double z1 = std::atanh(r1);
  const double z2 = std::atanh(r2);
  const double rbar = (r1 + r2) / 2.0;
  const double rbar2 = rbar * rbar;
  const double psi = r12 * (1.0 - 2.0 * rbar2) - 0.5 * rbar2 * (1.0 - 2.0 * rbar2 - r12 * r12);
  const double s = psi / ((1.0 - rbar2) * (1.0 - rbar2));
  const double z = (z1 - z2) * std::sqrt((static_cast<double>(n) - 3.0) / (2.0 - 2.0 * s));
  CorrelationComparison out;
  out.r1 = r1;
  out.r2 = r2;
  out.r12 = r12;
  out.n = n;
  out.z_stat = z;
  out.p_two_tailed = std::clamp(2.0 * (1.0 - normal_cdf(std::fabs(z))), 0.0, 1.0);
  return out;
}

// Mean precision at the positive positions of an already-ranked label list.
inline double average_precision(const std::vector<bool>& ranked_positive) {
  std::size_t positives = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < ranked_positive.size(); ++k) {
    if (!ranked_positive[k]) continue;
    ++positives;
    sum += static_cast<double>(positives) / static_cast<double>(k + 1);
  }
  if (positives == 0) throw NoPositives("average_precision: no positive labels");
  return sum / static_cast<double>(positives);
}

// A run of equally-scored items in a ranking.
struct TieGroup {
  std::size_t size = 0;
  std::size_t positives = 0;
};

// Expected AP when each tie group is ordered uniformly at random.
// Within a group of g items holding r positives that starts after s items
// (a of them positive), a positive at local rank i sees on average
// a + 1 + (i-1)(r-1)/(g-1) positives at or above it.
inline double expected_average_precision(std::span<const TieGroup> groups) {
  std::size_t total_positives = 0;
  for (const auto& g : groups) {
    if (g.positives > g.size) throw DomainError("expected_average_precision: positives > size");
    total_positives += g.positives;
  }
  if (total_positives == 0) throw NoPositives("expected_average_precision: no positive labels");
  double sum = 0.0;
  std::size_t seen = 0;        // items before the current group
  std::size_t seen_pos = 0;    // positives before the current group
  for (const auto& g : groups) {
    if (g.size == 0) continue;
    const double r = static_cast<double>(g.positives);
    const double gs = static_cast<double>(g.size);
    const double a = static_cast<double>(seen_pos);
    for (std::size_t i = 1; i <= g.size; ++i) {
      const double di = static_cast<double>(i);
      const double expected_above =
          g.size > 1 ? a + 1.0 + (di - 1.0) * (r - 1.0) / (gs - 1.0) : a + 1.0;
      sum += (r / gs) * expected_above / static_cast<double>(seen + i);
    }
    seen += g.size;
    seen_pos += g.positives;
  }
  return sum / static_cast<double>(total_positives);
}

}  // namespace cdisp::stats
