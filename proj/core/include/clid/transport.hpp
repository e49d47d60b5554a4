#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "clid/embedding_store.hpp"
#include "clid/transcript.hpp"

namespace clid {

/// Dense row-major m x n cost matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TransportProblem {
  std::vector<double> source_weights;
  std::vector<double> sink_weights;
  CostMatrix cost;
};

struct TransportPlan {
  CostMatrix flow;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Exact transportation simplex: northwest-corner start, dual potentials on
/// the basis tree. The most negative reduced cost enters; degenerate stalls fall
/// back to Bland's smallest-index rule, which also breaks every tie.
/// Throws InvalidProblem or InfeasibleMarginals.
[[nodiscard]] TransportPlan solve_emd(const TransportProblem& problem);

/// Brute-force optimum over every spanning-tree basic solution. Independent
/// of solve_emd; limited to m * n <= 16 (TooLarge otherwise).
[[nodiscard]] double emd_oracle(const TransportProblem& problem);

inline constexpr double kMarginalTolerance = 1e-9;

/// Word Mover's Distance between two bags; nullopt when either bag is empty.
[[nodiscard]] std::optional<double> wmd(const WordBag& a, const WordBag& b,
                                        const EmbeddingStore& store);

/// Memoizes word-pair distances by store index. Results are bitwise equal
/// to uncached evaluation. Not thread-safe; use one per worker.
class DistanceCache {
 public:
  explicit DistanceCache(const EmbeddingStore& store) : store_(&store) {}
  double operator()(std::size_t i, std::size_t j);

 private:
  const EmbeddingStore* store_;
  std::unordered_map<std::uint64_t, double> cache_;
};

[[nodiscard]] std::optional<double> wmd(const WordBag& a, const WordBag& b,
                                        const EmbeddingStore& store, DistanceCache& cache);

}  // namespace clid
