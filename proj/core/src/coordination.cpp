#include "clid/coordination.hpp"

#include <algorithm>
#include <string>

#include "clid/error.hpp"

namespace clid {

SessionDistances::SessionDistances(const Session& session, const EmbeddingStore& store)
    : store_(&store), n_(session.n_pairs()), cache_(store) {
  bags_a_.reserve(n_);
  bags_b_.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    bags_a_.push_back(build_bag(session.turns_a[i], store));
    bags_b_.push_back(build_bag(session.turns_b[i], store));
  }
  values_.resize(3 * n_ * n_);
  known_.assign(3 * n_ * n_, 0);
}

std::optional<double>& SessionDistances::slot(Role r1, std::size_t i, Role r2, std::size_t j,
                                              bool& fresh) {
  std::size_t block;
  std::size_t row;
  std::size_t col;
  if (r1 == r2) {
    block = r1 == Role::A ? 0 : 1;
    row = std::min(i, j);
    col = std::max(i, j);
  } else {
    block = 2;
    row = r1 == Role::A ? i : j;
    col = r1 == Role::A ? j : i;
  }
  const std::size_t at = block * n_ * n_ + row * n_ + col;
  fresh = !known_[at];
  known_[at] = 1;
  return values_[at];
}

std::optional<double> SessionDistances::between(Role r1, std::size_t i, Role r2, std::size_t j) {
  if (i >= n_ || j >= n_) {
    throw Error(Errc::IndexOutOfRange, "turn index beyond paired range");
  }
  bool fresh = false;
  auto& value = slot(r1, i, r2, j, fresh);
  if (fresh) {
    const WordBag* source;
    const WordBag* sink;
    if (r1 == r2) {
      source = &bag(r1, std::min(i, j));
      sink = &bag(r1, std::max(i, j));
    } else {
      source = r1 == Role::A ? &bags_a_[i] : &bags_a_[j];
      sink = r1 == Role::A ? &bags_b_[j] : &bags_b_[i];
    }
    value = wmd(*source, *sink, *store_, cache_);
    if (!value) ++undefined_;
  }
  return value;
}

namespace {

void check_k(std::size_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "context length must be >= 1");
}

// 0-based anchor index.
std::optional<double> window_min(SessionDistances& distances, Role anchor, std::size_t i,
                                 std::size_t k, std::size_t& skipped) {
  const std::size_t n = distances.n_pairs();
  if (distances.bag(anchor, i).empty()) {
    skipped += std::min(i + k, n) - i;
    return std::nullopt;
  }
  std::optional<double> best;
  for (std::size_t j = i; j < std::min(i + k, n); ++j) {
    const auto d = distances.between(anchor, i, other(anchor), j);
    if (!d) {
      ++skipped;
      continue;
    }
    if (!best || *d < *best) best = d;
  }
  return best;
}

}  // namespace

std::optional<double> local_distance(const Session& session, Role anchor, std::size_t i,
                                     std::size_t k, const EmbeddingStore& store) {
  check_k(k);
  const std::size_t n = session.n_pairs();
  if (i < 1 || i > n) {
    throw Error(Errc::IndexOutOfRange,
                "anchor index " + std::to_string(i) + " outside 1.." + std::to_string(n));
  }
  SessionDistances distances(session, store);
  std::size_t skipped = 0;
  return window_min(distances, anchor, i - 1, k, skipped);
}

DirectionalSeries directional_series(SessionDistances& distances, Role anchor, std::size_t k) {
  check_k(k);
  DirectionalSeries series;
  series.anchor = anchor;
  series.context_length = k;
  const std::size_t n = distances.n_pairs();
  series.local_distances.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto d = window_min(distances, anchor, i, k, series.skipped_pairs);
    if (d) ++series.defined_count;
    series.local_distances.push_back(d);
  }
  return series;
}

DirectionalSeries directional_series(const Session& session, Role anchor, std::size_t k,
                                     const EmbeddingStore& store) {
  SessionDistances distances(session, store);
  return directional_series(distances, anchor, k);
}

std::optional<double> uclid(const DirectionalSeries& series) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& d : series.local_distances) {
    if (d) {
      sum += *d;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::optional<double> alpha(SessionDistances& distances, Role anchor) {
  const std::size_t n = distances.n_pairs();
  if (n < 2) {
    throw Error(Errc::InsufficientTurns,
                "alpha needs at least 2 paired turns, session has " + std::to_string(n));
  }
  const Role responder = other(anchor);
  struct Mean {
    double sum = 0.0;
    std::size_t count = 0;
    void add(std::optional<double> d) {
      if (d) {
        sum += *d;
        ++count;
      }
    }
  };
  Mean within_anchor;
  Mean within_responder;
  Mean cross;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      within_anchor.add(distances.between(anchor, i, anchor, j));
      within_responder.add(distances.between(responder, i, responder, j));
    }
    for (std::size_t j = i; j < n; ++j) cross.add(distances.between(anchor, i, responder, j));
  }
  if (within_anchor.count == 0 || within_responder.count == 0 || cross.count == 0) {
    return std::nullopt;
  }
  return within_anchor.sum / static_cast<double>(within_anchor.count) +
         within_responder.sum / static_cast<double>(within_responder.count) +
         cross.sum / static_cast<double>(cross.count);
}

std::optional<double> alpha(const Session& session, Role anchor, const EmbeddingStore& store) {
  SessionDistances distances(session, store);
  return alpha(distances, anchor);
}

std::optional<double> nclid(std::optional<double> uclid_value, std::optional<double> alpha_value) {
  if (!uclid_value || !alpha_value || *alpha_value <= kAlphaFloor) return std::nullopt;
  return *uclid_value / *alpha_value;
}

std::optional<double> global_wmd(const Session& session, const EmbeddingStore& store) {
  std::vector<std::string> pooled_a;
  std::vector<std::string> pooled_b;
  for (const auto& t : session.turns_a) pooled_a.insert(pooled_a.end(), t.tokens.begin(), t.tokens.end());
  for (const auto& t : session.turns_b) pooled_b.insert(pooled_b.end(), t.tokens.begin(), t.tokens.end());
  return wmd(build_bag(pooled_a, store), build_bag(pooled_b, store), store);
}

namespace {

std::optional<double> mean_of(std::optional<double> x, std::optional<double> y) {
  if (!x || !y) return std::nullopt;
  return (*x + *y) / 2.0;
}

DirectionMeasures measure_direction(SessionDistances& distances, Role anchor, std::size_t k,
                                    const MeasureOptions& options) {
  DirectionMeasures out;
  out.series = directional_series(distances, anchor, k);
  out.uclid = uclid(out.series);
  if (options.with_alpha && distances.n_pairs() >= 2) {
    out.alpha = alpha(distances, anchor);
    out.nclid = nclid(out.uclid, out.alpha);
  }
  return out;
}

}  // namespace

SessionMeasures measure_session(const Session& session, const EmbeddingStore& store,
                                std::size_t k, const MeasureOptions& options) {
  check_k(k);
  SessionDistances distances(session, store);
  SessionMeasures m;
  m.session_id = session.session_id;
  m.n_pairs = session.n_pairs();
  m.context_length = k;
  m.a_to_b = measure_direction(distances, Role::A, k, options);
  m.b_to_a = measure_direction(distances, Role::B, k, options);
  if (options.with_global) m.global_wmd = global_wmd(session, store);
  m.symmetric_uclid = mean_of(m.a_to_b.uclid, m.b_to_a.uclid);
  m.symmetric_nclid = mean_of(m.a_to_b.nclid, m.b_to_a.nclid);
  m.skipped_pairs = distances.undefined_pairs();
  return m;
}

}  // namespace clid
