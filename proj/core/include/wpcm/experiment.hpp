#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wpcm/filter.hpp"
#include "wpcm/markov_model.hpp"
#include "wpcm/predictor.hpp"
#include "wpcm/waypoint.hpp"

namespace wpcm {

/// Estimator assumptions for one Monte Carlo case. Truth is always generated
/// from `truth`; `assumed` covers the waypoints known to the estimator and
/// must share times and dimension with the leading waypoints of `truth`.
struct ExperimentCase {
  std::string id;
  WaypointScenario assumed;
  WaypointScenario truth;
};

/// Four-waypoint airliner scenario (x, vx, y, vy) at times 0, 50, 110, 150,
/// T = 15 s. This is the matched case "i".
WaypointScenario airliner_scenario();

/// Cases "i" .. "vii". Mismatched cases specify the first three waypoints.
std::vector<ExperimentCase> build_airliner_cases();

/// Case with the given id, using `truth` as the generating scenario; case "i"
/// assumes the truth's first `known_count` waypoints.
ExperimentCase airliner_case(const std::string& id, const WaypointScenario& truth, int known_count = 3);

struct ExperimentSetup {
  double noise_intensity = 0.01;
  MeasurementModel measurement = position_measurement(2, 100.0);
  int measured_through = 4;
  int first_target = 5;
  int last_target = 150;
  int last_known_waypoint = 2;
};

/// Models shared by every replicate of a case.
struct PreparedCase {
  std::string id;
  CmWaypointModel truth;
  CmWaypointModel assumed;
  MarkovModel markov;
};

PreparedCase prepare_case(const ExperimentCase& c, const ExperimentSetup& setup);

struct ReplicateOutcome {
  std::vector<Vector> truth;
  std::vector<std::optional<Vector>> measurements;
  FilterResult filtered;
  std::vector<PredictionResult> predictions;
};

/// One run: truth from the true model, z_1..z_K, filter with the assumed
/// model, predictions for [first_target, last_target]. Randomness comes only
/// from RngStream::for_replicate(master_seed, replicate).
ReplicateOutcome run_replicate(const PreparedCase& prepared, const ExperimentSetup& setup, std::uint64_t master_seed,
                               std::uint64_t replicate);

/// z_k = H x_k + v_k for k = 1..through.
std::vector<std::optional<Vector>> synthesize_measurements(std::span<const Vector> truth, const MeasurementModel& meas,
                                                           int through, RngStream& rng);

using PositionSeries = std::vector<Eigen::Vector2d>;

/// (x, y) of an (x, vx, y, vy) state.
Eigen::Vector2d position_of(const Vector& state);

/// Mean over runs of the Euclidean position error at each target.
/// truth[i][j] and predicted[i][j] are run i, target j.
std::vector<double> aee(std::span<const PositionSeries> truth, std::span<const PositionSeries> predicted);

struct AeeSeries {
  std::string case_id;
  std::vector<int> target_times;
  std::vector<double> aee;
  int runs = 0;

  double at(int target_time) const;
  double horizon_mean() const;
};

/// Monte Carlo AEE over `runs` replicates. Output is bit-identical for any
/// `threads` value.
AeeSeries run_case(const ExperimentCase& c, const ExperimentSetup& setup, int runs, std::uint64_t master_seed,
                   int threads = 1);

/// Sample paths of a model, run i drawn from for_replicate(master_seed, i).
std::vector<std::vector<Vector>> simulate_runs(const CmWaypointModel& model, int runs, std::uint64_t master_seed);

}  // namespace wpcm
