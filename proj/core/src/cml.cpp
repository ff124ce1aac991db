#include "wpcm/cml.hpp"

#include <string>

#include "wpcm/error.hpp"

namespace wpcm {

CmlSegmentModel::CmlSegmentModel(int length, Index state_dim, std::vector<Step> steps)
    : length_(length), dim_(state_dim), steps_(std::move(steps)) {
  if (length_ < 1) throw Error(ErrorCode::InvalidParam, "segment length must be >= 1");
  if (steps_.size() != static_cast<std::size_t>(length_ - 1)) {
    throw Error(ErrorCode::InvalidParam, "segment of length " + std::to_string(length_) + " needs " +
                                             std::to_string(length_ - 1) + " interior steps");
  }
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    auto& s = steps_[i];
    const auto k = std::to_string(i + 1);
    if (s.prev_gain.rows() != dim_ || s.prev_gain.cols() != dim_ || s.end_gain.rows() != dim_ ||
        s.end_gain.cols() != dim_ || s.noise_cov.rows() != dim_ || s.noise_cov.cols() != dim_) {
      throw Error(ErrorCode::InvalidParam, "CM_L coefficients at k=" + k + " are not " + std::to_string(dim_) +
                                               "x" + std::to_string(dim_));
    }
    s.noise_lower = SpdFactor(s.noise_cov, "G_" + k).lower();
  }
}

const CmlSegmentModel::Step& CmlSegmentModel::step(int k) const {
  if (k < 1 || k > length_ - 1) {
    throw Error(ErrorCode::IndexOutOfRange, "interior step " + std::to_string(k) + " outside [1, " +
                                                std::to_string(length_ - 1) + "]");
  }
  return steps_[static_cast<std::size_t>(k - 1)];
}

CmlSegmentModel induce_cml(const MarkovModel& markov) {
  const int n = markov.horizon();
  const Index d = markov.state_dim();
  const auto ends = end_conditionals(markov);
  std::vector<CmlSegmentModel::Step> steps;
  steps.reserve(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (int k = 1; k <= n - 1; ++k) {
    const auto& ek = ends[static_cast<std::size_t>(k)];
    const auto& ekm1 = ends[static_cast<std::size_t>(k - 1)];
    const auto kk = std::to_string(k);
    const SpdFactor noise(markov.noise_cov(k), "M_" + kk);
    const SpdFactor c_end(ek.cov, "C_{N|" + kk + "}");
    // M_{N|k}' C_{N|k}^{-1}
    const Matrix mt_cinv = c_end.right_solve(ek.transition.transpose());
    const Matrix info = symmetrize(noise.inverse() + mt_cinv * ek.transition);
    const SpdFactor info_f(info, "G_" + kk + " information");
    CmlSegmentModel::Step s;
    s.noise_cov = info_f.inverse();
    s.end_gain = info_f.solve(mt_cinv);
    s.prev_gain = markov.transition(k) - s.end_gain * ekm1.transition;
    steps.push_back(std::move(s));
  }
  return CmlSegmentModel(n, d, std::move(steps));
}

CmlBoundary boundary_from_endpoints(const Vector& start_mean, const Vector& end_mean, const Matrix& start_cov,
                                    const Matrix& end_cov, const Matrix& cross) {
  const Index d = start_mean.size();
  if (end_mean.size() != d || start_cov.rows() != d || start_cov.cols() != d || end_cov.rows() != d ||
      end_cov.cols() != d || cross.rows() != d || cross.cols() != d) {
    throw Error(ErrorCode::InvalidParam, "endpoint statistics have inconsistent dimensions");
  }
  SpdFactor c0(start_cov, "C_0");
  const SpdFactor cn(end_cov, "C_N");
  CmlBoundary b;
  b.end = {end_mean, symmetrize(end_cov)};
  b.start_mean = start_mean;
  b.start_gain = cn.right_solve(cross);
  b.start_residual = symmetrize(start_cov - b.start_gain * cross.transpose());
  SpdFactor residual(b.start_residual, "G_0 (endpoint residual)");
  return b;
}

namespace {

void check_dims(const CmlSegmentModel& seg, const CmlBoundary& b) {
  const Index d = seg.state_dim();
  if (b.end.dim() != d || b.start_mean.size() != d || b.start_gain.rows() != d || b.start_gain.cols() != d ||
      b.start_residual.rows() != d || b.start_residual.cols() != d) {
    throw Error(ErrorCode::InvalidParam, "boundary dimensions do not match segment state dimension");
  }
}

}  // namespace

std::vector<Vector> simulate_cml(const CmlSegmentModel& seg, const CmlBoundary& boundary, RngStream& rng) {
  check_dims(seg, boundary);
  const int n = seg.length();
  std::vector<Vector> path(static_cast<std::size_t>(n + 1));
  path[static_cast<std::size_t>(n)] = sample(boundary.end, rng);
  const Vector& xn = path[static_cast<std::size_t>(n)];
  path[0] = sample(Gaussian{boundary.start_mean + boundary.start_gain * (xn - boundary.end.mean),
                            boundary.start_residual},
                   rng);
  for (int k = 1; k < n; ++k) {
    const auto& s = seg.step(k);
    const Vector mean = s.prev_gain * path[static_cast<std::size_t>(k - 1)] + s.end_gain * xn;
    path[static_cast<std::size_t>(k)] = sample(mean, s.noise_lower, rng);
  }
  return path;
}

JointGaussian full_joint_cml(const CmlSegmentModel& seg, const CmlBoundary& boundary) {
  check_dims(seg, boundary);
  const int n = seg.length();
  const std::string end_name = "x" + std::to_string(n);
  JointBuilder builder;
  builder.add(end_name, boundary.end.mean, {}, boundary.end.cov);
  builder.add("x0", boundary.start_mean - boundary.start_gain * boundary.end.mean,
              {{end_name, boundary.start_gain}}, boundary.start_residual);
  const Vector zero = Vector::Zero(seg.state_dim());
  for (int k = 1; k < n; ++k) {
    const auto& s = seg.step(k);
    builder.add("x" + std::to_string(k), zero, {{"x" + std::to_string(k - 1), s.prev_gain}, {end_name, s.end_gain}},
                s.noise_cov);
  }
  std::vector<std::string> order;
  for (int k = 0; k <= n; ++k) order.push_back("x" + std::to_string(k));
  return builder.build(order);
}

}  // namespace wpcm
