#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace clid {

/// 1-based ranks; tied values share the average of the ranks they span.
[[nodiscard]] std::vector<double> average_ranks(std::span<const double> values);

enum class CorrelationMethod { TApproximation, ExactPermutation };

[[nodiscard]] std::string_view to_string(CorrelationMethod method) noexcept;

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  CorrelationMethod method = CorrelationMethod::TApproximation;
};

/// Samples up to this size get an exact two-sided permutation p-value.
inline constexpr std::size_t kSpearmanExactMaxN = 10;

/// Spearman's rho (Pearson on average ranks) with a two-sided p-value.
/// n <= 10 enumerates all n! pairings; larger n uses Student's t with n-2
/// degrees of freedom. Throws LengthMismatch, DegenerateInput (constant
/// input) or InvalidArgument (n < 3, non-finite values).
[[nodiscard]] CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

enum class Alternative { TwoSided, Less, Greater };

[[nodiscard]] std::string_view to_string(Alternative alt) noexcept;

enum class PairedMethod { Exact, NormalApproximation };

[[nodiscard]] std::string_view to_string(PairedMethod method) noexcept;

struct PairedTestResult {
  double statistic = 0.0;  // min(T+, T-)
  double positive_rank_sum = 0.0;
  double negative_rank_sum = 0.0;
  double p_value = 1.0;
  std::size_t n_effective = 0;
  PairedMethod method = PairedMethod::Exact;
};

/// n_effective up to this size gets the exact null distribution.
inline constexpr std::size_t kWilcoxonExactMaxN = 25;

/// Wilcoxon signed-rank test on differences post - pre. Zero differences are
/// dropped; |d| ranks use average ranks. "Less" means post tends to be
/// smaller than pre. All-zero differences give p = 1 with n_effective = 0.
/// Above 25 pairs: normal approximation with continuity and tie correction.
[[nodiscard]] PairedTestResult wilcoxon_signed_rank(std::span<const double> pre,
                                                    std::span<const double> post,
                                                    Alternative alternative = Alternative::TwoSided);

/// Exact p-value of a positive-rank sum `t_plus` under random signs,
/// via the count-by-sum recursion. Ranks must be multiples of 0.5.
[[nodiscard]] double wilcoxon_exact_p(std::span<const double> ranks, double t_plus,
                                      Alternative alternative);

/// Same distribution by visiting all 2^n sign assignments (n <= 30).
[[nodiscard]] double wilcoxon_enumerated_p(std::span<const double> ranks, double t_plus,
                                           Alternative alternative);

}  // namespace clid
