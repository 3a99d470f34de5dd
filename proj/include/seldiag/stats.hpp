#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seldiag::stats {

inline constexpr double kSignificanceLevel = 0.05;

struct SampleGroup {
  std::string label;
  std::vector<double> values;
};

struct TestResult {
  double statistic = 0.0;
  double p = 1.0;
};

enum class Alternative { TwoSided, Less, Greater };

struct RankSumOptions {
  Alternative alternative = Alternative::TwoSided;
  // Exact null distribution when the pooled sample is this small and tie-free.
  std::size_t exact_max_total = 12;
};

/// Mid-ranks (1-based) of the pooled values; ties share their average rank.
std::vector<double> midranks(std::span<const double> values);

/// Sum over tie groups of t^3 - t.
double tie_term(std::span<const double> values);

/// Chi-square upper tail probability.
double chi_square_sf(double x, double dof);

/// Omnibus test across groups with tie-corrected H.
TestResult kruskal_wallis(std::span<const SampleGroup> groups);

/// Mann-Whitney U for sample a (number of pairs with a > b, ties count half).
double mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Exact p-value from the null distribution of U; valid for tie-free data.
double rank_sum_exact_p(double u, std::size_t na, std::size_t nb, Alternative alt);

/// Normal approximation with tie-corrected variance and continuity correction.
double rank_sum_normal_p(std::span<const double> a, std::span<const double> b, Alternative alt);

/// Wilcoxon rank-sum test; statistic is U for `a`.
TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                             const RankSumOptions& options = {});

std::vector<double> bonferroni(std::span<const double> p_values);

}  // namespace seldiag::stats
