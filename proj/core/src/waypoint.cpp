#include "wpcm/waypoint.hpp"

#include <algorithm>
#include <string>

#include "wpcm/error.hpp"

namespace wpcm {

namespace {

std::string wp(int n) { return "waypoint " + std::to_string(n); }

}  // namespace

Gaussian WaypointScenario::waypoint(int n) const {
  if (n < 0 || n > last_index()) throw Error(ErrorCode::IndexOutOfRange, wp(n) + " does not exist");
  return {means[static_cast<std::size_t>(n)], covs[static_cast<std::size_t>(n)]};
}

const Matrix& WaypointScenario::cross_cov(int n) const {
  if (n < 1 || n > last_index()) {
    throw Error(ErrorCode::IndexOutOfRange, "no cross-covariance for " + wp(n));
  }
  return cross[static_cast<std::size_t>(n - 1)];
}

JointGaussian WaypointScenario::consecutive_joint(int n) const {
  const auto a = waypoint(n - 1);
  const auto b = waypoint(n);
  const Index d = a.dim();
  Vector mean(2 * d);
  mean << a.mean, b.mean;
  Matrix cov(2 * d, 2 * d);
  cov << a.cov, cross_cov(n).transpose(), cross_cov(n), b.cov;
  return JointGaussian(std::move(mean), symmetrize(cov), {{"start", d}, {"end", d}});
}

WaypointScenario WaypointScenario::prefix(int count) const {
  if (count < 1 || count > waypoint_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "prefix of " + std::to_string(count) + " waypoints");
  }
  const auto c = static_cast<std::ptrdiff_t>(count);
  WaypointScenario out;
  out.times.assign(times.begin(), times.begin() + c);
  out.means.assign(means.begin(), means.begin() + c);
  out.covs.assign(covs.begin(), covs.begin() + c);
  out.cross.assign(cross.begin(), cross.begin() + (c - 1));
  out.step_seconds = step_seconds;
  return out;
}

void validate(const WaypointScenario& s) {
  const auto m = s.times.size();
  if (m < 2) throw Error(ErrorCode::InvalidParam, "a scenario needs at least two waypoints");
  if (s.means.size() != m || s.covs.size() != m || s.cross.size() != m - 1) {
    throw Error(ErrorCode::InvalidParam, "waypoint times, means, covariances and cross-covariances differ in count");
  }
  if (s.times.front() != 0) throw Error(ErrorCode::InvalidParam, "the first waypoint must be at time 0");
  for (std::size_t i = 1; i < m; ++i) {
    if (s.times[i] <= s.times[i - 1]) throw Error(ErrorCode::InvalidParam, "waypoint times must strictly increase");
  }
  if (!(s.step_seconds > 0.0)) throw Error(ErrorCode::InvalidParam, "step duration must be positive");
  const Index d = s.means.front().size();
  if (d == 0) throw Error(ErrorCode::InvalidParam, "state dimension must be positive");
  for (std::size_t i = 0; i < m; ++i) {
    const int n = static_cast<int>(i);
    if (s.means[i].size() != d || !s.means[i].allFinite()) {
      throw Error(ErrorCode::InvalidParam, wp(n) + ": mean has wrong dimension or non-finite entries");
    }
    if (s.covs[i].rows() != d || s.covs[i].cols() != d) {
      throw Error(ErrorCode::InvalidParam, wp(n) + ": covariance has wrong shape");
    }
    SpdFactor check(s.covs[i], wp(n) + " covariance");
    if (i > 0) {
      if (s.cross[i - 1].rows() != d || s.cross[i - 1].cols() != d || !s.cross[i - 1].allFinite()) {
        throw Error(ErrorCode::InvalidParam, wp(n) + ": cross-covariance has wrong shape");
      }
      SpdFactor joint(s.consecutive_joint(n).cov(), "joint covariance of waypoints " + std::to_string(n - 1) +
                                                        " and " + std::to_string(n));
    }
  }
}

CmWaypointModel::CmWaypointModel(WaypointScenario scenario, MarkovModel base, std::vector<CmlSegmentModel> segments,
                                 std::vector<Matrix> gains, std::vector<Matrix> residuals)
    : scenario_(std::move(scenario)),
      base_(std::move(base)),
      segments_(std::move(segments)),
      gains_(std::move(gains)),
      residuals_(std::move(residuals)) {
  validate(scenario_);
  const auto m = static_cast<std::size_t>(scenario_.last_index());
  if (segments_.size() != m || gains_.size() != m || residuals_.size() != m) {
    throw Error(ErrorCode::InvalidParam, "one segment model and waypoint regression per segment required");
  }
  for (std::size_t i = 0; i < m; ++i) {
    const int gap = scenario_.times[i + 1] - scenario_.times[i];
    if (segments_[i].length() != gap) {
      throw Error(ErrorCode::InvalidParam, "segment " + std::to_string(i + 1) + " length does not match waypoint gap");
    }
    residual_lowers_.push_back(SpdFactor(residuals_[i], "G_{N_" + std::to_string(i + 1) + "}").lower());
  }
  initial_lower_ = SpdFactor(scenario_.covs.front(), "waypoint 0 covariance").lower();
}

const Matrix& CmWaypointModel::residual_lower(int n) const {
  if (n < 1 || n > last_index()) throw Error(ErrorCode::IndexOutOfRange, "no residual for " + wp(n));
  return residual_lowers_[static_cast<std::size_t>(n - 1)];
}

int CmWaypointModel::time(int n) const {
  if (n < 0 || n > last_index()) throw Error(ErrorCode::IndexOutOfRange, wp(n) + " does not exist");
  return scenario_.times[static_cast<std::size_t>(n)];
}

const CmlSegmentModel& CmWaypointModel::segment(int n) const {
  if (n < 1 || n > last_index()) throw Error(ErrorCode::IndexOutOfRange, "segment " + std::to_string(n));
  return segments_[static_cast<std::size_t>(n - 1)];
}

int CmWaypointModel::segment_of(int t) const {
  if (t < 0 || t >= horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, "time " + std::to_string(t) + " is not inside any segment");
  }
  const auto it = std::upper_bound(scenario_.times.begin(), scenario_.times.end(), t);
  return static_cast<int>(it - scenario_.times.begin());
}

int CmWaypointModel::waypoint_at(int t) const noexcept {
  const auto it = std::lower_bound(scenario_.times.begin(), scenario_.times.end(), t);
  if (it == scenario_.times.end() || *it != t) return -1;
  return static_cast<int>(it - scenario_.times.begin());
}

const Matrix& CmWaypointModel::waypoint_gain(int n) const {
  if (n < 1 || n > last_index()) throw Error(ErrorCode::IndexOutOfRange, "no regression for " + wp(n));
  return gains_[static_cast<std::size_t>(n - 1)];
}

const Matrix& CmWaypointModel::waypoint_residual(int n) const {
  if (n < 1 || n > last_index()) throw Error(ErrorCode::IndexOutOfRange, "no residual for " + wp(n));
  return residuals_[static_cast<std::size_t>(n - 1)];
}

CmWaypointModel build_waypoint_model(const WaypointScenario& scenario, const MarkovModel& markov) {
  validate(scenario);
  if (markov.state_dim() != scenario.state_dim()) {
    throw Error(ErrorCode::InvalidParam, "Markov model and scenario state dimensions differ");
  }
  std::vector<CmlSegmentModel> segments;
  std::vector<Matrix> gains;
  std::vector<Matrix> residuals;
  for (int n = 1; n <= scenario.last_index(); ++n) {
    const int gap = scenario.times[static_cast<std::size_t>(n)] - scenario.times[static_cast<std::size_t>(n - 1)];
    if (gap > markov.horizon()) {
      throw Error(ErrorCode::InvalidParam, "Markov horizon " + std::to_string(markov.horizon()) +
                                               " shorter than segment " + std::to_string(n) + " (" +
                                               std::to_string(gap) + " steps)");
    }
    segments.push_back(induce_cml(markov.slice(1, gap)));
    const SpdFactor prev(scenario.covs[static_cast<std::size_t>(n - 1)], wp(n - 1) + " covariance");
    const Matrix& c = scenario.cross_cov(n);
    Matrix gain = prev.right_solve(c);
    Matrix residual = symmetrize(scenario.covs[static_cast<std::size_t>(n)] - gain * c.transpose());
    SpdFactor check(residual, "G_{N_" + std::to_string(n) + "}");
    gains.push_back(std::move(gain));
    residuals.push_back(std::move(residual));
  }
  return CmWaypointModel(scenario, markov, std::move(segments), std::move(gains), std::move(residuals));
}

std::vector<Vector> simulate_waypoint_trajectory(const CmWaypointModel& model, RngStream& rng) {
  const auto& s = model.scenario();
  std::vector<Vector> path(static_cast<std::size_t>(model.horizon() + 1));
  path[0] = sample(s.means[0], model.initial_lower(), rng);
  for (int n = 1; n <= model.last_index(); ++n) {
    const int start = model.time(n - 1);
    const int end = model.time(n);
    const auto& prev = path[static_cast<std::size_t>(start)];
    const Vector mean = s.means[static_cast<std::size_t>(n)] +
                        model.waypoint_gain(n) * (prev - s.means[static_cast<std::size_t>(n - 1)]);
    path[static_cast<std::size_t>(end)] = sample(mean, model.residual_lower(n), rng);
    const auto& seg = model.segment(n);
    const Vector& far = path[static_cast<std::size_t>(end)];
    for (int k = 1; k < seg.length(); ++k) {
      const auto& st = seg.step(k);
      const Vector m = st.prev_gain * path[static_cast<std::size_t>(start + k - 1)] + st.end_gain * far;
      path[static_cast<std::size_t>(start + k)] = sample(m, st.noise_lower, rng);
    }
  }
  return path;
}

JointGaussian full_joint_waypoint(const CmWaypointModel& model) {
  const Index d = model.state_dim();
  const Index total = d * (model.horizon() + 1);
  if (total > kMaxDenseJointDim) {
    throw Error(ErrorCode::SizeGuard, "dense joint of " + std::to_string(total) + " dimensions exceeds " +
                                          std::to_string(kMaxDenseJointDim));
  }
  const auto& s = model.scenario();
  auto name = [](int t) { return "x" + std::to_string(t); };
  JointBuilder builder;
  builder.add(name(0), s.means[0], {}, s.covs[0]);
  const Vector zero = Vector::Zero(d);
  for (int n = 1; n <= model.last_index(); ++n) {
    const int start = model.time(n - 1);
    const int end = model.time(n);
    const Matrix& g = model.waypoint_gain(n);
    builder.add(name(end), s.means[static_cast<std::size_t>(n)] - g * s.means[static_cast<std::size_t>(n - 1)],
                {{name(start), g}}, model.waypoint_residual(n));
    const auto& seg = model.segment(n);
    for (int k = 1; k < seg.length(); ++k) {
      const auto& st = seg.step(k);
      builder.add(name(start + k), zero, {{name(start + k - 1), st.prev_gain}, {name(end), st.end_gain}},
                  st.noise_cov);
    }
  }
  std::vector<std::string> order;
  for (int t = 0; t <= model.horizon(); ++t) order.push_back(name(t));
  return builder.build(order);
}

Matrix waypoint_chain_gain(const CmWaypointModel& model, int n, int q) {
  if (n < 0 || q < n || q > model.last_index()) {
    throw Error(ErrorCode::IndexOutOfRange, "waypoint chain from " + std::to_string(n) + " to " + std::to_string(q));
  }
  Matrix g = Matrix::Identity(model.state_dim(), model.state_dim());
  for (int j = n + 1; j <= q; ++j) g = model.waypoint_gain(j) * g;
  return g;
}

Matrix waypoint_chain_cross_cov(const CmWaypointModel& model, int n, int q) {
  if (n < 0 || q <= n || q > model.last_index()) {
    throw Error(ErrorCode::IndexOutOfRange, "cross-covariance C_{N_q,N_n} needs n < q <= m (n=" +
                                                std::to_string(n) + ", q=" + std::to_string(q) + ")");
  }
  return waypoint_chain_gain(model, n, q) * model.scenario().covs[static_cast<std::size_t>(n)];
}

}  // namespace wpcm
