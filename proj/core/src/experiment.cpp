#include "wpcm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "wpcm/error.hpp"

namespace wpcm {

namespace {

Matrix per_axis(const Eigen::Matrix2d& block) {
  Matrix m = Matrix::Zero(4, 4);
  m.topLeftCorner<2, 2>() = block;
  m.bottomRightCorner<2, 2>() = block;
  return m;
}

Vector vec4(double a, double b, double c, double d) {
  Vector v(4);
  v << a, b, c, d;
  return v;
}

Matrix diag4(double a, double b, double c, double d) { return vec4(a, b, c, d).asDiagonal(); }

WaypointScenario mismatched(std::vector<Vector> means, const Matrix& cov, const Matrix& cross) {
  WaypointScenario s;
  s.times = {0, 50, 110};
  s.means = std::move(means);
  s.covs.assign(3, cov);
  s.cross.assign(2, cross);
  s.step_seconds = 15.0;
  return s;
}

std::vector<Vector> means_ii() {
  return {vec4(10000, 60, 5000, 50), vec4(90000, 50, 30000, 70), vec4(170000, 40, 170000, 80)};
}

std::vector<Vector> means_iv() {
  return {vec4(10500, 60, 5500, 50), vec4(90500, 50, 30500, 70), vec4(170500, 40, 170500, 80)};
}

}  // namespace

WaypointScenario airliner_scenario() {
  Eigen::Matrix2d c;
  c << 10000, 400, 400, 100;
  Eigen::Matrix2d x;
  x << 8000, 200, 200, 70;
  WaypointScenario s;
  s.times = {0, 50, 110, 150};
  s.means = {vec4(10000, 80, 5000, 30), vec4(90000, 70, 30000, 50), vec4(170000, 60, 170000, 60),
             vec4(250000, 90, 200000, 30)};
  s.covs.assign(4, per_axis(c));
  s.cross.assign(3, per_axis(x));
  s.step_seconds = 15.0;
  return s;
}

ExperimentCase airliner_case(const std::string& id, const WaypointScenario& truth, int known_count) {
  const Matrix zero = Matrix::Zero(4, 4);
  const Matrix c_ii = diag4(1e4, 1e4, 1e4, 1e4);
  const Matrix x_ii = diag4(7000, 6000, 7000, 6000);
  const Matrix c_vi = diag4(1e5, 1e4, 1e5, 1e4);
  const Matrix x_vi = diag4(70000, 6000, 70000, 6000);
  ExperimentCase out{id, {}, truth};
  if (id == "i") {
    out.assumed = truth.prefix(known_count);
  } else if (id == "ii") {
    out.assumed = mismatched(means_ii(), c_ii, x_ii);
  } else if (id == "iii") {
    out.assumed = mismatched(means_ii(), c_ii, zero);
  } else if (id == "iv") {
    out.assumed = mismatched(means_iv(), c_ii, x_ii);
  } else if (id == "v") {
    out.assumed = mismatched(means_iv(), c_ii, zero);
  } else if (id == "vi") {
    out.assumed = mismatched(means_iv(), c_vi, x_vi);
  } else if (id == "vii") {
    out.assumed = mismatched(means_iv(), c_vi, zero);
  } else {
    throw Error(ErrorCode::InvalidParam, "unknown case id '" + id + "' (expected i..vii)");
  }
  return out;
}

std::vector<ExperimentCase> build_airliner_cases() {
  const auto truth = airliner_scenario();
  std::vector<ExperimentCase> out;
  for (const char* id : {"i", "ii", "iii", "iv", "v", "vi", "vii"}) out.push_back(airliner_case(id, truth));
  return out;
}

PreparedCase prepare_case(const ExperimentCase& c, const ExperimentSetup& setup) {
  validate(c.truth);
  validate(c.assumed);
  if (c.truth.state_dim() != 4 || c.assumed.state_dim() != 4) {
    throw Error(ErrorCode::InvalidParam, "experiments use the (x, vx, y, vy) state layout");
  }
  if (c.assumed.waypoint_count() > c.truth.waypoint_count()) {
    throw Error(ErrorCode::InvalidParam, "assumed scenario has more waypoints than the truth");
  }
  for (int n = 0; n < c.assumed.waypoint_count(); ++n) {
    if (c.assumed.times[static_cast<std::size_t>(n)] != c.truth.times[static_cast<std::size_t>(n)]) {
      throw Error(ErrorCode::InvalidParam, "assumed and true waypoint times differ at waypoint " + std::to_string(n));
    }
  }
  if (setup.last_known_waypoint < 1 || setup.last_known_waypoint > c.assumed.last_index()) {
    throw Error(ErrorCode::InvalidParam, "last known waypoint must be in [1, " +
                                             std::to_string(c.assumed.last_index()) + "]");
  }
  if (setup.measured_through < 0 || setup.measured_through >= c.assumed.times[1]) {
    throw Error(ErrorCode::InvalidParam, "measurements must end inside the first segment");
  }
  if (setup.first_target < setup.measured_through || setup.last_target > c.truth.horizon()) {
    throw Error(ErrorCode::InvalidParam, "prediction targets must lie in [measured_through, truth horizon]");
  }
  auto markov = build_ncv(c.truth.step_seconds, setup.noise_intensity, 2, c.truth.horizon());
  auto truth = build_waypoint_model(c.truth, markov);
  auto assumed = build_waypoint_model(c.assumed, markov);
  return {c.id, std::move(truth), std::move(assumed), std::move(markov)};
}

std::vector<std::optional<Vector>> synthesize_measurements(std::span<const Vector> truth, const MeasurementModel& meas,
                                                           int through, RngStream& rng) {
  if (through < 0 || static_cast<std::size_t>(through) >= truth.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "measurement times exceed the trajectory");
  }
  const Matrix lower = cholesky(meas.noise_cov);
  std::vector<std::optional<Vector>> z;
  z.reserve(static_cast<std::size_t>(through));
  for (int k = 1; k <= through; ++k) {
    z.emplace_back(meas.observation * truth[static_cast<std::size_t>(k)] +
                   lower * rng.standard_normal(meas.observation.rows()));
  }
  return z;
}

ReplicateOutcome run_replicate(const PreparedCase& prepared, const ExperimentSetup& setup, std::uint64_t master_seed,
                               std::uint64_t replicate) {
  auto rng = RngStream::for_replicate(master_seed, replicate);
  ReplicateOutcome out;
  out.truth = simulate_waypoint_trajectory(prepared.truth, rng);
  out.measurements = synthesize_measurements(out.truth, setup.measurement, setup.measured_through, rng);
  out.filtered = run_filter(prepared.assumed, setup.measurement, out.measurements);
  out.predictions = predict_range(out.filtered.terminal, prepared.assumed, setup.first_target, setup.last_target,
                                  KnownWaypointSet{setup.last_known_waypoint}, prepared.markov);
  return out;
}

Eigen::Vector2d position_of(const Vector& state) {
  if (state.size() != 4) throw Error(ErrorCode::InvalidParam, "position_of expects an (x, vx, y, vy) state");
  return {state[0], state[2]};
}

std::vector<double> aee(std::span<const PositionSeries> truth, std::span<const PositionSeries> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "truth and prediction run counts differ");
  }
  if (truth.empty()) return {};
  const std::size_t targets = truth.front().size();
  std::vector<double> sum(targets, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].size() != targets || predicted[i].size() != targets) {
      throw Error(ErrorCode::LengthMismatch, "run " + std::to_string(i) + " has a different number of targets");
    }
    for (std::size_t j = 0; j < targets; ++j) sum[j] += (truth[i][j] - predicted[i][j]).norm();
  }
  for (double& s : sum) s /= static_cast<double>(truth.size());
  return sum;
}

double AeeSeries::at(int target_time) const {
  for (std::size_t i = 0; i < target_times.size(); ++i) {
    if (target_times[i] == target_time) return aee[i];
  }
  throw Error(ErrorCode::IndexOutOfRange, "no AEE value for target " + std::to_string(target_time));
}

double AeeSeries::horizon_mean() const {
  if (aee.empty()) return 0.0;
  return std::accumulate(aee.begin(), aee.end(), 0.0) / static_cast<double>(aee.size());
}

AeeSeries run_case(const ExperimentCase& c, const ExperimentSetup& setup, int runs, std::uint64_t master_seed,
                   int threads) {
  if (runs < 1) throw Error(ErrorCode::InvalidParam, "run count must be >= 1");
  const auto prepared = prepare_case(c, setup);
  const auto n_runs = static_cast<std::size_t>(runs);
  std::vector<PositionSeries> truth(n_runs);
  std::vector<PositionSeries> predicted(n_runs);

  std::mutex failure_mutex;
  std::size_t failed_replicate = n_runs;
  std::string failure;
  ErrorCode failure_code = ErrorCode::NotSpd;

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n_runs; i += stride) {
      try {
        const auto outcome = run_replicate(prepared, setup, master_seed, i);
        auto& t = truth[i];
        auto& p = predicted[i];
        t.reserve(outcome.predictions.size());
        p.reserve(outcome.predictions.size());
        for (const auto& pr : outcome.predictions) {
          t.push_back(position_of(outcome.truth[static_cast<std::size_t>(pr.target)]));
          p.push_back(position_of(pr.mean));
        }
      } catch (const Error& e) {
        std::lock_guard lock(failure_mutex);
        if (i < failed_replicate) {
          failed_replicate = i;
          failure = e.what();
          failure_code = e.code();
        }
        return;
      }
    }
  };

  const auto n_threads = static_cast<std::size_t>(std::max(1, std::min(threads, runs)));
  if (n_threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
    for (auto& th : pool) th.join();
  }
  if (failed_replicate != n_runs) {
    throw Error(failure_code, "case " + c.id + ", replicate " + std::to_string(failed_replicate) + ": " + failure);
  }

  AeeSeries out;
  out.case_id = c.id;
  out.runs = runs;
  for (int t = setup.first_target; t <= setup.last_target; ++t) out.target_times.push_back(t);
  out.aee = aee(truth, predicted);
  return out;
}

std::vector<std::vector<Vector>> simulate_runs(const CmWaypointModel& model, int runs, std::uint64_t master_seed) {
  if (runs < 0) throw Error(ErrorCode::InvalidParam, "run count must be >= 0");
  std::vector<std::vector<Vector>> out;
  out.reserve(static_cast<std::size_t>(runs));
  for (int i = 0; i < runs; ++i) {
    auto rng = RngStream::for_replicate(master_seed, static_cast<std::uint64_t>(i));
    out.push_back(simulate_waypoint_trajectory(model, rng));
  }
  return out;
}

}  // namespace wpcm
