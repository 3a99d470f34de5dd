#include "seldiag/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seldiag::stats {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Coefficients of the Gaussian binomial [m+n choose m]_q: entry u counts the
// arrangements of m a-values among n b-values with exactly u pairs a > b.
std::vector<double> u_null_counts(std::size_t m, std::size_t n) {
  // table[i][j] holds the counts for sizes (i, j); built row by row.
  std::vector<std::vector<std::vector<double>>> table(
      m + 1, std::vector<std::vector<double>>(n + 1));
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      auto& cell = table[i][j];
      cell.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        cell[0] = 1.0;
        continue;
      }
      // Largest pooled value is either an a (beats all j b's) or a b.
      const auto& with_a = table[i - 1][j];
      for (std::size_t u = 0; u < with_a.size(); ++u) cell[u + j] += with_a[u];
      const auto& with_b = table[i][j - 1];
      for (std::size_t u = 0; u < with_b.size(); ++u) cell[u] += with_b[u];
    }
  }
  return table[m][n];
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double tie_term(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    term += t * t * t - t;
    i = j + 1;
  }
  return term;
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

TestResult kruskal_wallis(std::span<const SampleGroup> groups) {
  if (groups.size() < 2) throw std::invalid_argument("Kruskal-Wallis needs at least two groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.values.empty()) throw std::invalid_argument("group '" + g.label + "' is empty");
    pooled.insert(pooled.end(), g.values.begin(), g.values.end());
  }
  const double n = static_cast<double>(pooled.size());
  const double correction = 1.0 - tie_term(pooled) / (n * n * n - n);
  if (correction <= 0.0) return {0.0, 1.0};

  const auto ranks = midranks(pooled);
  double sum = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    const double r = std::accumulate(ranks.begin() + static_cast<std::ptrdiff_t>(offset),
                                     ranks.begin() + static_cast<std::ptrdiff_t>(offset + g.values.size()),
                                     0.0);
    sum += r * r / static_cast<double>(g.values.size());
    offset += g.values.size();
  }
  const double h = std::max(0.0, (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction);
  return {h, chi_square_sf(h, static_cast<double>(groups.size() - 1))};
}

double mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  const double ra = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  const double na = static_cast<double>(a.size());
  return ra - na * (na + 1.0) / 2.0;
}

double rank_sum_exact_p(double u, std::size_t na, std::size_t nb, Alternative alt) {
  const auto counts = u_null_counts(na, nb);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  // U is integral for tie-free samples.
  const auto k = static_cast<std::size_t>(std::llround(u));
  double at_most = 0.0;
  double at_least = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (v <= k) at_most += counts[v];
    if (v >= k) at_least += counts[v];
  }
  at_most /= total;
  at_least /= total;
  switch (alt) {
    case Alternative::Less: return at_most;
    case Alternative::Greater: return at_least;
    case Alternative::TwoSided: break;
  }
  return std::min(1.0, 2.0 * std::min(at_most, at_least));
}

double rank_sum_normal_p(std::span<const double> a, std::span<const double> b, Alternative alt) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term(pooled) / (n * (n - 1.0)));
  if (!(variance > 0.0)) return 1.0;
  const double sd = std::sqrt(variance);
  const double diff = mann_whitney_u(a, b) - na * nb / 2.0;

  switch (alt) {
    case Alternative::Less: return normal_cdf((diff + 0.5) / sd);
    case Alternative::Greater: return 1.0 - normal_cdf((diff - 0.5) / sd);
    case Alternative::TwoSided: break;
  }
  const double corrected = diff - std::copysign(diff == 0.0 ? 0.0 : 0.5, diff);
  const double z = corrected / sd;
  const double tail = std::min(normal_cdf(z), 1.0 - normal_cdf(z));
  return 2.0 * std::min(tail, 0.5);
}

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                             const RankSumOptions& options) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank-sum test needs non-empty samples");
  const double u = mann_whitney_u(a, b);
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const bool exact = pooled.size() <= options.exact_max_total && tie_term(pooled) == 0.0;
  const double p = exact ? rank_sum_exact_p(u, a.size(), b.size(), options.alternative)
                         : rank_sum_normal_p(a, b, options.alternative);
  return {u, std::clamp(p, 0.0, 1.0)};
}

std::vector<double> bonferroni(std::span<const double> p_values) {
  std::vector<double> out(p_values.begin(), p_values.end());
  const double m = static_cast<double>(out.size());
  for (double& p : out) p = std::min(1.0, p * m);
  return out;
}

}  // namespace seldiag::stats
