#include "clid/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "clid/error.hpp"

namespace clid {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(Errc::InvalidProblem, "cost buffer has " + std::to_string(data_.size()) +
                                          " entries, expected " + std::to_string(rows_ * cols_));
  }
}

namespace {

double checked_total(std::span<const double> weights, const char* side) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(Errc::InvalidProblem, std::string(side) + " weights must be finite and >= 0");
    }
    total += w;
  }
  return total;
}

void validate(const TransportProblem& p) {
  const std::size_t m = p.source_weights.size();
  const std::size_t n = p.sink_weights.size();
  if (m == 0 || n == 0) throw Error(Errc::InvalidProblem, "empty marginal");
  if (p.cost.rows() != m || p.cost.cols() != n) {
    throw Error(Errc::InvalidProblem, "cost matrix shape does not match marginals");
  }
  for (double c : p.cost.data()) {
    if (!std::isfinite(c) || c < 0.0) {
      throw Error(Errc::InvalidProblem, "costs must be finite and >= 0");
    }
  }
  const double src = checked_total(p.source_weights, "source");
  const double snk = checked_total(p.sink_weights, "sink");
  if (std::abs(src - snk) > kMarginalTolerance) {
    throw Error(Errc::InfeasibleMarginals,
                "source mass " + std::to_string(src) + " != sink mass " + std::to_string(snk));
  }
}

// Graph nodes: rows are 0..m-1, columns are m..m+n-1. Basic cells are edges.
class BasisTree {
 public:
  BasisTree(std::size_t m, std::size_t n) : m_(m), n_(n), adj_(m + n) {}

  void rebuild(const std::vector<char>& is_basic) {
    for (auto& list : adj_) list.clear();
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic[i * n_ + j]) {
          adj_[i].push_back(m_ + j);
          adj_[m_ + j].push_back(i);
        }
      }
    }
  }

  // u_i + v_j = c_ij on every basic cell, anchored at u_0 = 0.
  void potentials(const CostMatrix& cost, std::vector<double>& u, std::vector<double>& v) {
    std::vector<double> pot(m_ + n_, 0.0);
    std::vector<char> seen(m_ + n_, 0);
    queue_.clear();
    queue_.push_back(0);
    seen[0] = 1;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const std::size_t node = queue_[head];
      for (std::size_t next : adj_[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        const bool node_is_row = node < m_;
        const std::size_t i = node_is_row ? node : next;
        const std::size_t j = (node_is_row ? next : node) - m_;
        pot[next] = cost(i, j) - pot[node];
        queue_.push_back(next);
      }
    }
    if (queue_.size() != m_ + n_) {
      throw Error(Errc::SolverDidNotConverge, "basis is not a spanning tree");
    }
    u.assign(pot.begin(), pot.begin() + static_cast<long>(m_));
    v.assign(pot.begin() + static_cast<long>(m_), pot.end());
  }

  // Cells on the tree path from row `row` to column `col`, starting at the row.
  std::vector<std::size_t> path(std::size_t row, std::size_t col) {
    std::vector<std::size_t> parent(m_ + n_, SIZE_MAX);
    queue_.clear();
    queue_.push_back(row);
    parent[row] = row;
    const std::size_t target = m_ + col;
    for (std::size_t head = 0; head < queue_.size() && parent[target] == SIZE_MAX; ++head) {
      const std::size_t node = queue_[head];
      for (std::size_t next : adj_[node]) {
        if (parent[next] != SIZE_MAX) continue;
        parent[next] = node;
        queue_.push_back(next);
      }
    }
    std::vector<std::size_t> cells;
    for (std::size_t node = target; node != row; node = parent[node]) {
      const std::size_t prev = parent[node];
      const std::size_t i = node < m_ ? node : prev;
      const std::size_t j = (node < m_ ? prev : node) - m_;
      cells.push_back(i * n_ + j);
    }
    std::reverse(cells.begin(), cells.end());
    return cells;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> queue_;
};

}  // namespace

TransportPlan solve_emd(const TransportProblem& problem) {
  validate(problem);
  const std::size_t m = problem.source_weights.size();
  const std::size_t n = problem.sink_weights.size();
  const CostMatrix& cost = problem.cost;

  std::vector<double> flow(m * n, 0.0);
  std::vector<char> is_basic(m * n, 0);

  // Northwest corner: walks exactly m + n - 1 cells from (0,0) to (m-1,n-1),
  // so degenerate zero-flow cells still enter the basis.
  {
    std::vector<double> supply = problem.source_weights;
    std::vector<double> demand = problem.sink_weights;
    std::size_t i = 0;
    std::size_t j = 0;
    while (true) {
      const double x = std::min(supply[i], demand[j]);
      flow[i * n + j] = x;
      is_basic[i * n + j] = 1;
      supply[i] -= x;
      demand[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      const bool move_down = j == n - 1 || (i < m - 1 && supply[i] <= demand[j]);
      if (move_down) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  double max_cost = 1.0;
  for (double c : cost.data()) max_cost = std::max(max_cost, c);
  const double tolerance = 1e-12 * max_cost;
  const std::size_t max_pivots = 1000 * (m + n) * (m + n) + 1000;

  BasisTree tree(m, n);
  std::vector<double> u;
  std::vector<double> v;
  std::size_t pivots = 0;
  std::size_t degenerate_run = 0;
  const std::size_t stall_limit = m + n;
  while (true) {
    tree.rebuild(is_basic);
    tree.potentials(cost, u, v);

    // Most negative reduced cost enters, lowest index on ties. After a run of
    // degenerate pivots, switch to Bland (lowest improving index) until the
    // objective moves again; that rules out cycling.
    const bool bland = degenerate_run >= stall_limit;
    std::size_t entering = SIZE_MAX;
    double best = -tolerance;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (is_basic[i * n + j]) continue;
        const double reduced = cost(i, j) - u[i] - v[j];
        if (reduced < best) {
          entering = i * n + j;
          if (bland) break;
          best = reduced;
        }
      }
      if (bland && entering != SIZE_MAX) break;
    }
    if (entering == SIZE_MAX) break;
    if (++pivots > max_pivots) {
      throw Error(Errc::SolverDidNotConverge, "pivot limit exceeded");
    }

    // Cycle: entering (+), then the tree path row -> column alternating -, +, ..., -.
    const auto cycle = tree.path(entering / n, entering % n);
    double theta = INFINITY;
    for (std::size_t k = 0; k < cycle.size(); k += 2) theta = std::min(theta, flow[cycle[k]]);
    std::size_t leaving = SIZE_MAX;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      if (flow[cycle[k]] == theta) leaving = std::min(leaving, cycle[k]);
    }
    if (leaving == SIZE_MAX) throw Error(Errc::SolverDidNotConverge, "no leaving cell");
    theta = std::max(theta, 0.0);
    degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
    flow[entering] += theta;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      flow[cycle[k]] += (k % 2 == 0) ? -theta : theta;
    }
    flow[leaving] = 0.0;
    is_basic[leaving] = 0;
    is_basic[entering] = 1;
  }

  TransportPlan plan;
  plan.pivots = pivots;
  plan.flow = CostMatrix(m, n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double f = std::max(0.0, flow[i * n + j]);
      plan.flow(i, j) = f;
      plan.objective += f * cost(i, j);
    }
  }
  return plan;
}

double DistanceCache::operator()(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double d = euclidean_distance(store_->vector_at(i), store_->vector_at(j));
  cache_.emplace(key, d);
  return d;
}

namespace {

template <typename Distance>
std::optional<double> wmd_impl(const WordBag& a, const WordBag& b, const EmbeddingStore& store,
                               Distance&& distance) {
  if (a.empty() || b.empty()) return std::nullopt;
  std::vector<std::size_t> ia;
  std::vector<std::size_t> ib;
  for (const auto& w : a.words) ia.push_back(store.index_of(w));
  for (const auto& w : b.words) ib.push_back(store.index_of(w));
  for (std::size_t idx : ia) {
    if (idx == EmbeddingStore::npos) throw Error(Errc::OutOfVocabulary, "bag word not in store");
  }
  for (std::size_t idx : ib) {
    if (idx == EmbeddingStore::npos) throw Error(Errc::OutOfVocabulary, "bag word not in store");
  }

  TransportProblem problem{a.weights, b.weights, CostMatrix(ia.size(), ib.size())};
  for (std::size_t i = 0; i < ia.size(); ++i) {
    for (std::size_t j = 0; j < ib.size(); ++j) problem.cost(i, j) = distance(ia[i], ib[j]);
  }
  return solve_emd(problem).objective;
}

}  // namespace

std::optional<double> wmd(const WordBag& a, const WordBag& b, const EmbeddingStore& store) {
  return wmd_impl(a, b, store, [&](std::size_t i, std::size_t j) {
    return euclidean_distance(store.vector_at(i), store.vector_at(j));
  });
}

std::optional<double> wmd(const WordBag& a, const WordBag& b, const EmbeddingStore& store,
                          DistanceCache& cache) {
  return wmd_impl(a, b, store, [&](std::size_t i, std::size_t j) { return cache(i, j); });
}

}  // namespace clid
