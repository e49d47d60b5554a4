#include "clid/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "clid/error.hpp"

namespace clid {

std::string_view to_string(CorrelationMethod method) noexcept {
  return method == CorrelationMethod::ExactPermutation ? "exact-permutation" : "t-approximation";
}

std::string_view to_string(Alternative alt) noexcept {
  switch (alt) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Less: return "less";
    case Alternative::Greater: return "greater";
  }
  return "two-sided";
}

std::string_view to_string(PairedMethod method) noexcept {
  return method == PairedMethod::Exact ? "exact" : "normal-approximation";
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // positions start..end-1 hold ranks start+1..end
    const double rank = static_cast<double>(start + 1 + end) / 2.0;
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = rank;
    start = end;
  }
  return ranks;
}

namespace {

void require_finite(std::span<const double> v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(Errc::InvalidArgument, std::string(name) + " contains a non-finite value");
    }
  }
}

// Centered ranks times two: integers, so permutation sums are exact.
std::vector<std::int64_t> centered_doubled(const std::vector<double>& ranks) {
  const auto n = static_cast<std::int64_t>(ranks.size());
  std::vector<std::int64_t> out;
  out.reserve(ranks.size());
  for (double r : ranks) out.push_back(std::llround(2.0 * r) - (n + 1));
  return out;
}

std::vector<std::size_t> tie_group_sizes(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    sizes.push_back(j - i);
    i = j;
  }
  return sizes;
}

}  // namespace

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::LengthMismatch, "x has " + std::to_string(x.size()) + " values, y has " +
                                          std::to_string(y.size()));
  }
  const std::size_t n = x.size();
  if (n < 3) throw Error(Errc::InvalidArgument, "spearman needs at least 3 observations");
  require_finite(x, "x");
  require_finite(y, "y");

  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto cx = centered_doubled(rx);
  const auto cy = centered_doubled(ry);

  std::int64_t sxy = 0;
  std::int64_t sxx = 0;
  std::int64_t syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += cx[i] * cy[i];
    sxx += cx[i] * cx[i];
    syy += cy[i] * cy[i];
  }
  if (sxx == 0 || syy == 0) {
    throw Error(Errc::DegenerateInput, "spearman is undefined for a constant sequence");
  }

  CorrelationResult result;
  result.n = n;
  result.rho = std::clamp(static_cast<double>(sxy) /
                              std::sqrt(static_cast<double>(sxx) * static_cast<double>(syy)),
                          -1.0, 1.0);

  if (n <= kSpearmanExactMaxN) {
    // Every pairing of y's ranks with x's; sxx and syy are pairing-invariant,
    // so |rho_perm| >= |rho| reduces to |sum cx * cy_perm| >= |sxy|.
    const std::int64_t observed = sxy < 0 ? -sxy : sxy;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    do {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < n; ++i) s += cx[i] * cy[perm[i]];
      if ((s < 0 ? -s : s) >= observed) ++hits;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    result.method = CorrelationMethod::ExactPermutation;
    return result;
  }

  if (std::abs(sxy) * std::abs(sxy) == sxx * syy) {
    // Perfect association: only the pairings that keep y's rank order (or its
    // reverse) reach |rho| = 1; there are 2 * prod(tie group sizes!) of them.
    double log_p = std::log(2.0) - std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t g : tie_group_sizes(y)) log_p += std::lgamma(static_cast<double>(g) + 1.0);
    result.p_value = std::min(1.0, std::exp(log_p));
    result.method = CorrelationMethod::ExactPermutation;
    return result;
  }

  const double dof = static_cast<double>(n - 2);
  const double t = result.rho * std::sqrt(dof / ((1.0 + result.rho) * (1.0 - result.rho)));
  const boost::math::students_t_distribution<double> dist(dof);
  result.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))),
                              0.0, 1.0);
  result.method = CorrelationMethod::TApproximation;
  return result;
}

namespace {

std::vector<std::size_t> doubled_ranks(std::span<const double> ranks) {
  std::vector<std::size_t> out;
  out.reserve(ranks.size());
  for (double r : ranks) {
    const double twice = 2.0 * r;
    if (r <= 0.0 || std::abs(twice - std::round(twice)) > 1e-9) {
      throw Error(Errc::InvalidArgument, "signed ranks must be positive multiples of 0.5");
    }
    out.push_back(static_cast<std::size_t>(std::llround(twice)));
  }
  return out;
}

double p_from_tails(double lower, double upper, Alternative alternative) {
  switch (alternative) {
    case Alternative::Less: return std::min(1.0, lower);
    case Alternative::Greater: return std::min(1.0, upper);
    case Alternative::TwoSided: return std::min(1.0, 2.0 * std::min(lower, upper));
  }
  return 1.0;
}

}  // namespace

double wilcoxon_exact_p(std::span<const double> ranks, double t_plus, Alternative alternative) {
  const auto r2 = doubled_ranks(ranks);
  const std::size_t max_sum = std::accumulate(r2.begin(), r2.end(), std::size_t{0});
  // counts[s]: sign assignments whose doubled positive-rank sum is s.
  std::vector<double> counts(max_sum + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t r : r2) {
    reach += r;
    for (std::size_t s = reach; s >= r; --s) counts[s] += counts[s - r];
  }
  const auto observed = static_cast<std::size_t>(std::llround(2.0 * t_plus));
  const double total = std::ldexp(1.0, static_cast<int>(r2.size()));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    if (s <= observed) lower += counts[s];
    if (s >= observed) upper += counts[s];
  }
  return p_from_tails(lower / total, upper / total, alternative);
}

double wilcoxon_enumerated_p(std::span<const double> ranks, double t_plus,
                             Alternative alternative) {
  const auto r2 = doubled_ranks(ranks);
  const std::size_t n = r2.size();
  if (n > 30) throw Error(Errc::TooLarge, "enumeration limited to 30 ranks");
  const auto observed = static_cast<std::size_t>(std::llround(2.0 * t_plus));
  std::uint64_t lower = 0;
  std::uint64_t upper = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::size_t s = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (std::uint64_t{1} << k)) s += r2[k];
    }
    if (s <= observed) ++lower;
    if (s >= observed) ++upper;
  }
  return p_from_tails(static_cast<double>(lower) / static_cast<double>(total),
                      static_cast<double>(upper) / static_cast<double>(total), alternative);
}

PairedTestResult wilcoxon_signed_rank(std::span<const double> pre, std::span<const double> post,
                                      Alternative alternative) {
  if (pre.size() != post.size()) {
    throw Error(Errc::LengthMismatch, "pre has " + std::to_string(pre.size()) +
                                          " values, post has " + std::to_string(post.size()));
  }
  require_finite(pre, "pre");
  require_finite(post, "post");

  std::vector<double> magnitudes;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const double d = post[i] - pre[i];
    if (d == 0.0) continue;
    magnitudes.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }

  PairedTestResult result;
  result.n_effective = magnitudes.size();
  if (magnitudes.empty()) {
    result.p_value = 1.0;
    return result;
  }

  const auto ranks = average_ranks(magnitudes);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    (positive[i] ? result.positive_rank_sum : result.negative_rank_sum) += ranks[i];
  }
  result.statistic = std::min(result.positive_rank_sum, result.negative_rank_sum);

  const std::size_t n = result.n_effective;
  if (n <= kWilcoxonExactMaxN) {
    result.method = PairedMethod::Exact;
    result.p_value = wilcoxon_exact_p(ranks, result.positive_rank_sum, alternative);
    return result;
  }

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
  for (std::size_t t : tie_group_sizes(magnitudes)) {
    const double td = static_cast<double>(t);
    variance -= (td * td * td - td) / 48.0;
  }
  const double sd = std::sqrt(variance);
  auto upper_tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
  const double diff = result.positive_rank_sum - mean;
  result.method = PairedMethod::NormalApproximation;
  switch (alternative) {
    case Alternative::TwoSided:
      result.p_value = std::min(1.0, 2.0 * upper_tail(std::max(0.0, std::abs(diff) - 0.5) / sd));
      break;
    case Alternative::Less:
      result.p_value = 1.0 - upper_tail((diff + 0.5) / sd);
      break;
    case Alternative::Greater:
      result.p_value = upper_tail((diff - 0.5) / sd);
      break;
  }
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  return result;
}

}  // namespace clid
