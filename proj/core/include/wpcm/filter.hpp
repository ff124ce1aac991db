#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wpcm/gaussian.hpp"
#include "wpcm/waypoint.hpp"

namespace wpcm {

/// z_k = H x_k + v_k,  v_k ~ N(0, R).
struct MeasurementModel {
  Matrix observation;
  Matrix noise_cov;
};

/// H picking the position of each (pos, vel) axis, R = variance * I.
MeasurementModel position_measurement(int axes, double variance);

void validate(const MeasurementModel& meas, Index state_dim);

/// Posterior of y_k = (x_k, x_{N_n}) given z^k while k lies in segment n,
/// i.e. N_{n-1} <= k <= N_n - 1. After the final waypoint the state is
/// parked at k = N_m with both blocks equal to x_{N_m}.
struct AugmentedFilterState {
  int segment = 1;
  int time = 0;
  Vector estimate;
  Matrix mse;

  Index state_dim() const noexcept { return estimate.size() / 2; }

  /// [I 0] y: estimate of x_k.
  Gaussian current() const;
  /// [0 I] y: estimate of x_{N_n}.
  Gaussian segment_end() const;
};

/// Starts segment n at time `time` from a joint over (x_k, x_{N_n}); the joint
/// must have two equal-size blocks, current state first.
AugmentedFilterState init_segment(const JointGaussian& joint, int segment, int time);

/// Segment-1 start from the scenario prior of (x_{N_0}, x_{N_1}).
AugmentedFilterState init_from_scenario(const CmWaypointModel& model);

/// Prediction to k+1 with G^y = [[G_{k+1,k}, G_{k+1,N_n}], [0, I]] and process
/// noise diag(G_{k+1}, 0). Requires k+1 <= N_n - 1.
AugmentedFilterState time_update(const AugmentedFilterState& state, const CmWaypointModel& model);

/// Joseph-form update of the augmented state with z_k.
AugmentedFilterState measurement_update(const AugmentedFilterState& state, const Vector& z,
                                        const MeasurementModel& meas);

/// time_update followed by measurement_update when z is present.
AugmentedFilterState filter_step(const AugmentedFilterState& state, const std::optional<Vector>& z,
                                 const CmWaypointModel& model, const MeasurementModel& meas);

/// Posterior of x_{N_n} given z^{N_n}; `state` must sit at N_n - 1.
Gaussian waypoint_update(const AugmentedFilterState& state, const std::optional<Vector>& z,
                         const CmWaypointModel& model, const MeasurementModel& meas);

/// Joint of (x_{N_n}, x_{N_{n+1}}) given z^{N_n}, blocks "start" and "end":
///   mean_end  = mu_{N_{n+1}} + G (x_hat - mu_{N_n})
///   cov_end   = G_{N_{n+1}} + G P G'
///   cross     = G P
AugmentedFilterState advance_to_next_segment(const Gaussian& posterior, const CmWaypointModel& model, int n);

/// Same quantity as a JointGaussian.
JointGaussian next_waypoint_joint(const Gaussian& posterior, const CmWaypointModel& model, int n);

struct FilterResult {
  /// estimates[k] = (x_hat_k, P_k) for k = 0..K; k = 0 is the prior.
  std::vector<Gaussian> estimates;
  AugmentedFilterState terminal;
};

/// Filters z_1..z_K where measurements[i] holds z_{i+1}; a missing entry
/// skips that measurement update.
FilterResult run_filter(const CmWaypointModel& model, const MeasurementModel& meas,
                        std::span<const std::optional<Vector>> measurements);

}  // namespace wpcm
