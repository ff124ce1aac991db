#pragma once

#include <vector>

#include "wpcm/cml.hpp"
#include "wpcm/gaussian.hpp"
#include "wpcm/markov_model.hpp"

namespace wpcm {

/// Waypoint statistics. Waypoints are indexed 0..m; waypoint 0 sits at time 0
/// and its Gaussian is the prior of the whole sequence.
struct WaypointScenario {
  std::vector<int> times;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  /// cross[n-1] = C_{N_n, N_{n-1}} = Cov(x_{N_n}, x_{N_{n-1}}), n = 1..m.
  std::vector<Matrix> cross;
  double step_seconds = 1.0;

  int waypoint_count() const noexcept { return static_cast<int>(times.size()); }
  int last_index() const noexcept { return waypoint_count() - 1; }
  int horizon() const { return times.back(); }
  Index state_dim() const { return means.front().size(); }

  Gaussian waypoint(int n) const;
  const Matrix& cross_cov(int n) const;

  /// Prior joint of (x_{N_{n-1}}, x_{N_n}), blocks "start" and "end".
  JointGaussian consecutive_joint(int n) const;

  /// The first `count` waypoints.
  WaypointScenario prefix(int count) const;
};

/// Throws InvalidParam/NotSpd if the scenario breaks an invariant.
void validate(const WaypointScenario& scenario);

class CmWaypointModel {
 public:
  CmWaypointModel(WaypointScenario scenario, MarkovModel base, std::vector<CmlSegmentModel> segments,
                  std::vector<Matrix> gains, std::vector<Matrix> residuals);

  const WaypointScenario& scenario() const noexcept { return scenario_; }
  const MarkovModel& base() const noexcept { return base_; }

  int last_index() const noexcept { return scenario_.last_index(); }
  int time(int n) const;
  int horizon() const { return scenario_.horizon(); }
  Index state_dim() const { return scenario_.state_dim(); }

  /// Segment n in [1, m] spans [N_{n-1}, N_n].
  const CmlSegmentModel& segment(int n) const;

  /// Segment containing `t` as its start or an interior time: N_{n-1} <= t < N_n.
  int segment_of(int t) const;

  /// Index n with N_n == t, or -1.
  int waypoint_at(int t) const noexcept;

  /// G_{N_n,N_{n-1}} = C_{N_n,N_{n-1}} C_{N_{n-1}}^{-1}, n in [1, m].
  const Matrix& waypoint_gain(int n) const;
  /// G_{N_n} = C_{N_n} - G_{N_n,N_{n-1}} C_{N_n,N_{n-1}}'.
  const Matrix& waypoint_residual(int n) const;

  Gaussian initial() const { return scenario_.waypoint(0); }

  const Matrix& initial_lower() const noexcept { return initial_lower_; }
  const Matrix& residual_lower(int n) const;

 private:
  WaypointScenario scenario_;
  MarkovModel base_;
  std::vector<CmlSegmentModel> segments_;
  std::vector<Matrix> gains_;
  std::vector<Matrix> residuals_;
  Matrix initial_lower_;
  std::vector<Matrix> residual_lowers_;
};

/// Induces one CM_L model per segment from the leading steps of `markov`
/// (re-indexed to the segment length) and the waypoint regressions.
CmWaypointModel build_waypoint_model(const WaypointScenario& scenario, const MarkovModel& markov);

/// States x_0..x_{N_m}: each far waypoint is drawn from its mean-anchored
/// regression on the previous one, then the interior is filled in time order.
std::vector<Vector> simulate_waypoint_trajectory(const CmWaypointModel& model, RngStream& rng);

inline constexpr Index kMaxDenseJointDim = 2000;

/// Exact joint over x_0..x_{N_m} (blocks "x0".."x<N>"), composed in the
/// simulation's generation order. Throws SizeGuard above kMaxDenseJointDim.
JointGaussian full_joint_waypoint(const CmWaypointModel& model);

/// G_{N_q,N_n} = G_{N_q,N_{q-1}} ... G_{N_{n+1},N_n}; identity for q == n.
Matrix waypoint_chain_gain(const CmWaypointModel& model, int n, int q);

/// C_{N_q,N_n} = G_{N_q,N_n} C_{N_n}, n < q <= m.
Matrix waypoint_chain_cross_cov(const CmWaypointModel& model, int n, int q);

}  // namespace wpcm
