#include "wpcm/filter.hpp"

#include <string>

#include "wpcm/error.hpp"

namespace wpcm {

namespace {

void check_state(const AugmentedFilterState& s) {
  const Index n = s.estimate.size();
  if (n == 0 || n % 2 != 0 || s.mse.rows() != n || s.mse.cols() != n) {
    throw Error(ErrorCode::InvalidParam, "augmented state must have two equal blocks and a matching MSE matrix");
  }
}

// Joseph-form linear update of (mean, cov) with z = H x + v.
void joseph_update(Vector& mean, Matrix& cov, const Matrix& h, const Matrix& r, const Vector& z) {
  const Matrix ph = cov * h.transpose();
  const Matrix innovation_cov = symmetrize(h * ph + r);
  const SpdFactor s(innovation_cov, "innovation covariance");
  const Matrix gain = s.right_solve(ph);
  mean += gain * (z - h * mean);
  const Matrix a = Matrix::Identity(cov.rows(), cov.cols()) - gain * h;
  cov = symmetrize(a * cov * a.transpose() + gain * r * gain.transpose());
}

}  // namespace

MeasurementModel position_measurement(int axes, double variance) {
  if (axes < 1) throw Error(ErrorCode::InvalidParam, "axes must be >= 1");
  if (!(variance > 0.0)) throw Error(ErrorCode::InvalidParam, "measurement variance must be positive");
  MeasurementModel m{Matrix::Zero(axes, 2 * axes), variance * Matrix::Identity(axes, axes)};
  for (int a = 0; a < axes; ++a) m.observation(a, 2 * a) = 1.0;
  return m;
}

void validate(const MeasurementModel& meas, Index state_dim) {
  if (meas.observation.cols() != state_dim) {
    throw Error(ErrorCode::InvalidParam, "observation matrix has " + std::to_string(meas.observation.cols()) +
                                             " columns, state has " + std::to_string(state_dim));
  }
  if (meas.noise_cov.rows() != meas.observation.rows() || meas.noise_cov.cols() != meas.observation.rows()) {
    throw Error(ErrorCode::InvalidParam, "measurement noise covariance has wrong shape");
  }
  SpdFactor check(meas.noise_cov, "measurement noise covariance R");
}

Gaussian AugmentedFilterState::current() const {
  const Index d = state_dim();
  return {estimate.head(d), mse.topLeftCorner(d, d)};
}

Gaussian AugmentedFilterState::segment_end() const {
  const Index d = state_dim();
  return {estimate.tail(d), mse.bottomRightCorner(d, d)};
}

AugmentedFilterState init_segment(const JointGaussian& joint, int segment, int time) {
  if (joint.blocks().size() != 2 || joint.blocks()[0].size != joint.blocks()[1].size) {
    throw Error(ErrorCode::InvalidParam, "segment initialization needs a joint of two equal-size blocks");
  }
  SpdFactor check(joint.cov(), "segment-start joint covariance");
  return {segment, time, joint.mean(), symmetrize(joint.cov())};
}

AugmentedFilterState init_from_scenario(const CmWaypointModel& model) {
  return init_segment(model.scenario().consecutive_joint(1), 1, 0);
}

AugmentedFilterState time_update(const AugmentedFilterState& state, const CmWaypointModel& model) {
  check_state(state);
  const int n = state.segment;
  const int start = model.time(n - 1);
  const int end = model.time(n);
  const int next = state.time + 1;
  if (state.time < start || next > end - 1) {
    throw Error(ErrorCode::HorizonOutOfSegment, "time update to k=" + std::to_string(next) +
                                                    " is not interior to segment " + std::to_string(n));
  }
  const Index d = state.state_dim();
  if (d != model.state_dim()) throw Error(ErrorCode::InvalidParam, "filter state dimension mismatch");
  const auto& step = model.segment(n).step(next - start);
  Matrix gy = Matrix::Identity(2 * d, 2 * d);
  gy.topLeftCorner(d, d) = step.prev_gain;
  gy.topRightCorner(d, d) = step.end_gain;
  AugmentedFilterState out{n, next, gy * state.estimate, gy * state.mse * gy.transpose()};
  out.mse.topLeftCorner(d, d) += step.noise_cov;
  out.mse = symmetrize(out.mse);
  return out;
}

AugmentedFilterState measurement_update(const AugmentedFilterState& state, const Vector& z,
                                        const MeasurementModel& meas) {
  check_state(state);
  const Index d = state.state_dim();
  validate(meas, d);
  if (z.size() != meas.observation.rows()) throw Error(ErrorCode::InvalidParam, "measurement dimension mismatch");
  Matrix hy = Matrix::Zero(meas.observation.rows(), 2 * d);
  hy.leftCols(d) = meas.observation;
  AugmentedFilterState out = state;
  joseph_update(out.estimate, out.mse, hy, meas.noise_cov, z);
  return out;
}

AugmentedFilterState filter_step(const AugmentedFilterState& state, const std::optional<Vector>& z,
                                 const CmWaypointModel& model, const MeasurementModel& meas) {
  auto predicted = time_update(state, model);
  if (!z) return predicted;
  return measurement_update(predicted, *z, meas);
}

Gaussian waypoint_update(const AugmentedFilterState& state, const std::optional<Vector>& z,
                         const CmWaypointModel& model, const MeasurementModel& meas) {
  check_state(state);
  const int end = model.time(state.segment);
  if (state.time != end - 1) {
    throw Error(ErrorCode::HorizonOutOfSegment, "waypoint update needs the state at k=" + std::to_string(end - 1) +
                                                    ", got k=" + std::to_string(state.time));
  }
  Gaussian g = state.segment_end();
  if (!z) return g;
  validate(meas, g.dim());
  if (z->size() != meas.observation.rows()) throw Error(ErrorCode::InvalidParam, "measurement dimension mismatch");
  joseph_update(g.mean, g.cov, meas.observation, meas.noise_cov, *z);
  return g;
}

JointGaussian next_waypoint_joint(const Gaussian& posterior, const CmWaypointModel& model, int n) {
  if (n < 0 || n >= model.last_index()) {
    throw Error(ErrorCode::IndexOutOfRange, "no waypoint after waypoint " + std::to_string(n));
  }
  const auto& s = model.scenario();
  const Index d = model.state_dim();
  if (posterior.dim() != d) throw Error(ErrorCode::InvalidParam, "posterior dimension mismatch");
  const Matrix& g = model.waypoint_gain(n + 1);
  Vector mean(2 * d);
  mean << posterior.mean,
      s.means[static_cast<std::size_t>(n + 1)] + g * (posterior.mean - s.means[static_cast<std::size_t>(n)]);
  const Matrix cross = g * posterior.cov;
  Matrix cov(2 * d, 2 * d);
  cov << posterior.cov, cross.transpose(), cross, model.waypoint_residual(n + 1) + cross * g.transpose();
  return JointGaussian(std::move(mean), symmetrize(cov), {{"start", d}, {"end", d}});
}

AugmentedFilterState advance_to_next_segment(const Gaussian& posterior, const CmWaypointModel& model, int n) {
  auto joint = next_waypoint_joint(posterior, model, n);
  return {n + 1, model.time(n), joint.mean(), joint.cov()};
}

FilterResult run_filter(const CmWaypointModel& model, const MeasurementModel& meas,
                        std::span<const std::optional<Vector>> measurements) {
  validate(meas, model.state_dim());
  const int k_max = static_cast<int>(measurements.size());
  if (k_max > model.horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, std::to_string(k_max) + " measurements exceed model horizon " +
                                                std::to_string(model.horizon()));
  }
  FilterResult out;
  out.estimates.reserve(static_cast<std::size_t>(k_max + 1));
  auto state = init_from_scenario(model);
  out.estimates.push_back(state.current());
  for (int t = 1; t <= k_max; ++t) {
    const auto& z = measurements[static_cast<std::size_t>(t - 1)];
    const int n = state.segment;
    if (t < model.time(n)) {
      state = filter_step(state, z, model, meas);
      out.estimates.push_back(state.current());
      continue;
    }
    Gaussian post = waypoint_update(state, z, model, meas);
    out.estimates.push_back(post);
    if (n < model.last_index()) {
      state = advance_to_next_segment(post, model, n);
    } else {
      const Index d = post.dim();
      Vector y(2 * d);
      y << post.mean, post.mean;
      Matrix sigma(2 * d, 2 * d);
      sigma << post.cov, post.cov, post.cov, post.cov;
      state = {n, t, std::move(y), std::move(sigma)};
    }
  }
  out.terminal = std::move(state);
  return out;
}

}  // namespace wpcm
