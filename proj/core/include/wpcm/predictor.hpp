#pragma once

#include <string_view>
#include <vector>

#include "wpcm/filter.hpp"
#include "wpcm/markov_model.hpp"
#include "wpcm/waypoint.hpp"

namespace wpcm {

enum class Regime {
  InSegment,      // k+r <= N_n - 1
  SegmentEnd,     // k+r == N_n
  KnownWaypoint,  // k+r == N_q, n < q <= q_max
  FutureSegment,  // N_q < k+r < N_{q+1}, q+1 <= q_max
  BeyondKnown,    // k+r > N_{q_max}; base Markov model from the waypoint posterior
};

std::string_view to_string(Regime r) noexcept;

/// Target times are absolute step indices.
struct PredictionResult {
  int target = 0;
  Regime regime = Regime::InSegment;
  Vector mean;
  Matrix cov;
};

/// Waypoints 0..last_known have been broadcast.
struct KnownWaypointSet {
  int last_known = 0;
};

PredictionResult predict_in_segment(const AugmentedFilterState& state, const CmWaypointModel& model, int target);

PredictionResult predict_at_segment_end(const AugmentedFilterState& state, const CmWaypointModel& model);

/// x_{N_q} | z^k for q >= n; q == n is the segment end.
PredictionResult predict_at_waypoint(const AugmentedFilterState& state, const CmWaypointModel& model, int q,
                                     const KnownWaypointSet& known);

/// target in [N_q, N_{q+1} - 1] with n <= q and q+1 known. The joint of
/// (x_{N_q}, x_{N_{q+1}}) given z^k is propagated with segment q+1's model.
PredictionResult predict_in_future_segment(const AugmentedFilterState& state, const CmWaypointModel& model,
                                           int target, const KnownWaypointSet& known);

/// target >= N_{q_max}: the posterior at the last known waypoint is pushed
/// through `markov`, re-indexed so step 1 leaves that waypoint.
PredictionResult predict_beyond_known(const AugmentedFilterState& state, const CmWaypointModel& model, int target,
                                      const KnownWaypointSet& known, const MarkovModel& markov);

/// Picks the single regime responsible for `target`.
PredictionResult predict(const AugmentedFilterState& state, const CmWaypointModel& model, int target,
                         const KnownWaypointSet& known, const MarkovModel& markov);

/// Predictions for every target in [first, last], propagated incrementally;
/// agrees with calling predict() per target.
std::vector<PredictionResult> predict_range(const AugmentedFilterState& state, const CmWaypointModel& model,
                                            int first, int last, const KnownWaypointSet& known,
                                            const MarkovModel& markov);

}  // namespace wpcm
