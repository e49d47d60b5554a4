#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "clid/embedding_store.hpp"
#include "clid/transcript.hpp"
#include "clid/transport.hpp"

namespace clid {

inline constexpr std::size_t kDefaultContextLength = 6;

/// Local distances for one direction. Direction X->Y takes X's turns as
/// anchors and searches Y's turns for the closest response, so it measures
/// how closely Y follows X.
struct DirectionalSeries {
  Role anchor = Role::A;
  std::size_t context_length = kDefaultContextLength;
  std::vector<std::optional<double>> local_distances;  // index i-1 holds d_i
  std::size_t defined_count = 0;
  std::size_t skipped_pairs = 0;  // undefined WMD pairs inside the windows

  [[nodiscard]] Role responder() const noexcept { return other(anchor); }
};

/// Memoized WMD between the turns of one session. Bags are built once per
/// turn. Cross-speaker pairs are always solved with the A turn as source so
/// both directions read the same value.
class SessionDistances {
 public:
  SessionDistances(const Session& session, const EmbeddingStore& store);

  /// 0-based turn indices within each role's own sequence.
  std::optional<double> between(Role r1, std::size_t i, Role r2, std::size_t j);

  [[nodiscard]] std::size_t n_pairs() const noexcept { return n_; }
  [[nodiscard]] const WordBag& bag(Role r, std::size_t i) const {
    return r == Role::A ? bags_a_[i] : bags_b_[i];
  }
  /// Distinct pairs evaluated so far whose WMD was undefined.
  [[nodiscard]] std::size_t undefined_pairs() const noexcept { return undefined_; }

 private:
  std::optional<double>& slot(Role r1, std::size_t i, Role r2, std::size_t j, bool& fresh);

  const EmbeddingStore* store_;
  std::size_t n_ = 0;
  std::vector<WordBag> bags_a_;
  std::vector<WordBag> bags_b_;
  DistanceCache cache_;
  std::vector<std::optional<double>> values_;  // 3 blocks of N*N: AA, BB, AB
  std::vector<char> known_;
  std::size_t undefined_ = 0;
};

/// Minimum WMD between anchor turn `i` (1-based) and the responder's turns
/// i .. min(i+k-1, N). nullopt when no pair in the window is defined.
/// Throws IndexOutOfRange or InvalidArgument (k == 0).
[[nodiscard]] std::optional<double> local_distance(const Session& session, Role anchor,
                                                   std::size_t i, std::size_t k,
                                                   const EmbeddingStore& store);

[[nodiscard]] DirectionalSeries directional_series(SessionDistances& distances, Role anchor,
                                                   std::size_t k);
[[nodiscard]] DirectionalSeries directional_series(const Session& session, Role anchor,
                                                   std::size_t k, const EmbeddingStore& store);

/// Mean of the defined local distances.
[[nodiscard]] std::optional<double> uclid(const DirectionalSeries& series);

/// Session normalizer for the direction anchored at `anchor`: average WMD
/// within the anchor's turns, within the responder's turns, and across
/// (anchor_i, responder_j) for i <= j. Undefined pairs shrink the
/// denominators. Throws InsufficientTurns when N < 2.
[[nodiscard]] std::optional<double> alpha(SessionDistances& distances, Role anchor);
[[nodiscard]] std::optional<double> alpha(const Session& session, Role anchor,
                                          const EmbeddingStore& store);

inline constexpr double kAlphaFloor = 1e-12;

[[nodiscard]] std::optional<double> nclid(std::optional<double> uclid_value,
                                          std::optional<double> alpha_value);

/// WMD between the pooled words of speaker A and of speaker B.
[[nodiscard]] std::optional<double> global_wmd(const Session& session,
                                               const EmbeddingStore& store);

struct DirectionMeasures {
  DirectionalSeries series;
  std::optional<double> uclid;
  std::optional<double> alpha;
  std::optional<double> nclid;
};

struct SessionMeasures {
  std::string session_id;
  std::size_t n_pairs = 0;
  std::size_t context_length = kDefaultContextLength;
  DirectionMeasures a_to_b;
  DirectionMeasures b_to_a;
  std::optional<double> global_wmd;
  std::optional<double> symmetric_uclid;
  std::optional<double> symmetric_nclid;
  std::size_t skipped_pairs = 0;

  [[nodiscard]] const DirectionMeasures& direction(Role anchor) const noexcept {
    return anchor == Role::A ? a_to_b : b_to_a;
  }
};

struct MeasureOptions {
  bool with_alpha = true;
  bool with_global = true;
};

[[nodiscard]] SessionMeasures measure_session(const Session& session, const EmbeddingStore& store,
                                              std::size_t k = kDefaultContextLength,
                                              const MeasureOptions& options = {});

}  // namespace clid
