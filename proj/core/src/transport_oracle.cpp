// Exhaustive basic-solution enumeration for tiny transportation problems.
// Shares no code with the simplex in transport.cpp.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "clid/error.hpp"
#include "clid/transport.hpp"

namespace clid {

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

double emd_oracle(const TransportProblem& problem) {
  const std::size_t m = problem.source_weights.size();
  const std::size_t n = problem.sink_weights.size();
  if (m == 0 || n == 0 || problem.cost.rows() != m || problem.cost.cols() != n) {
    throw Error(Errc::InvalidProblem, "shape mismatch");
  }
  if (m * n > 16) {
    throw Error(Errc::TooLarge, "oracle limited to m*n <= 16, got " + std::to_string(m * n));
  }
  const double src = std::accumulate(problem.source_weights.begin(), problem.source_weights.end(), 0.0);
  const double snk = std::accumulate(problem.sink_weights.begin(), problem.sink_weights.end(), 0.0);
  if (std::abs(src - snk) > kMarginalTolerance) {
    throw Error(Errc::InfeasibleMarginals, "marginal totals differ");
  }

  const std::size_t cells = m * n;
  const int basis_size = static_cast<int>(m + n - 1);
  double best = std::numeric_limits<double>::infinity();

  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (std::popcount(mask) != basis_size) continue;

    // m+n-1 acyclic edges on m+n nodes form a spanning tree.
    DisjointSet dsu(m + n);
    bool acyclic = true;
    for (std::size_t c = 0; c < cells && acyclic; ++c) {
      if (mask & (1u << c)) acyclic = dsu.unite(c / n, m + c % n);
    }
    if (!acyclic) continue;

    // Peel leaves: a node of degree one sends its whole residual along its edge.
    std::vector<double> residual(m + n);
    for (std::size_t i = 0; i < m; ++i) residual[i] = problem.source_weights[i];
    for (std::size_t j = 0; j < n; ++j) residual[m + j] = problem.sink_weights[j];
    std::vector<int> degree(m + n, 0);
    std::vector<char> open(cells, 0);
    for (std::size_t c = 0; c < cells; ++c) {
      if (mask & (1u << c)) {
        open[c] = 1;
        ++degree[c / n];
        ++degree[m + c % n];
      }
    }
    std::vector<double> flow(cells, 0.0);
    for (int solved = 0; solved < basis_size;) {
      bool progressed = false;
      for (std::size_t node = 0; node < m + n; ++node) {
        if (degree[node] != 1) continue;
        for (std::size_t c = 0; c < cells; ++c) {
          if (!open[c]) continue;
          const std::size_t r = c / n;
          const std::size_t k = m + c % n;
          if (r != node && k != node) continue;
          const std::size_t peer = r == node ? k : r;
          flow[c] = residual[node];
          residual[peer] -= flow[c];
          residual[node] = 0.0;
          open[c] = 0;
          --degree[r];
          --degree[k];
          ++solved;
          progressed = true;
          break;
        }
      }
      if (!progressed) break;
    }

    bool feasible = true;
    double total = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (!(mask & (1u << c))) continue;
      if (flow[c] < -1e-12) {
        feasible = false;
        break;
      }
      total += std::max(flow[c], 0.0) * problem.cost(c / n, c % n);
    }
    if (feasible) best = std::min(best, total);
  }
  return best;
}

}  // namespace clid
