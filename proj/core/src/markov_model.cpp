#include "wpcm/markov_model.hpp"

#include <string>

#include "wpcm/error.hpp"

namespace wpcm {

MarkovModel::MarkovModel(std::vector<Matrix> transitions, std::vector<Matrix> noise_covs,
                         std::optional<Gaussian> prior)
    : transitions_(std::move(transitions)), noise_covs_(std::move(noise_covs)), prior_(std::move(prior)) {
  if (transitions_.empty()) throw Error(ErrorCode::InvalidParam, "Markov model horizon must be >= 1");
  if (transitions_.size() != noise_covs_.size()) {
    throw Error(ErrorCode::InvalidParam, "transition and noise sequences differ in length");
  }
  const Index d = transitions_.front().rows();
  if (d == 0) throw Error(ErrorCode::InvalidParam, "state dimension must be positive");
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto step = std::to_string(i + 1);
    if (transitions_[i].rows() != d || transitions_[i].cols() != d || !transitions_[i].allFinite()) {
      throw Error(ErrorCode::InvalidParam, "transition at step " + step + " is not a finite square matrix of dim " +
                                               std::to_string(d));
    }
    if (noise_covs_[i].rows() != d || noise_covs_[i].cols() != d) {
      throw Error(ErrorCode::InvalidParam, "noise covariance at step " + step + " has wrong shape");
    }
    SpdFactor check(noise_covs_[i], "noise covariance at step " + step);
  }
  if (prior_) {
    if (prior_->dim() != d) throw Error(ErrorCode::InvalidParam, "prior dimension mismatch");
    validate(*prior_, "Markov prior");
  }
}

MarkovModel MarkovModel::time_invariant(const Matrix& transition, const Matrix& noise_cov, int horizon,
                                        std::optional<Gaussian> prior) {
  if (horizon < 1) throw Error(ErrorCode::InvalidParam, "Markov model horizon must be >= 1");
  const auto n = static_cast<std::size_t>(horizon);
  return MarkovModel(std::vector<Matrix>(n, transition), std::vector<Matrix>(n, noise_cov), std::move(prior));
}

const Matrix& MarkovModel::transition(int k) const {
  if (k < 1 || k > horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, "transition step " + std::to_string(k) + " outside [1, " +
                                                std::to_string(horizon()) + "]");
  }
  return transitions_[static_cast<std::size_t>(k - 1)];
}

const Matrix& MarkovModel::noise_cov(int k) const {
  if (k < 1 || k > horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, "noise step " + std::to_string(k) + " outside [1, " +
                                                std::to_string(horizon()) + "]");
  }
  return noise_covs_[static_cast<std::size_t>(k - 1)];
}

MarkovModel MarkovModel::with_prior(Gaussian prior) const {
  return MarkovModel(transitions_, noise_covs_, std::move(prior));
}

MarkovModel MarkovModel::slice(int first_step, int length) const {
  if (length < 1 || first_step < 1 || first_step + length - 1 > horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, "slice [" + std::to_string(first_step) + ", " +
                                                std::to_string(first_step + length - 1) +
                                                "] outside model horizon " + std::to_string(horizon()));
  }
  const auto b = static_cast<std::ptrdiff_t>(first_step - 1);
  return MarkovModel(std::vector<Matrix>(transitions_.begin() + b, transitions_.begin() + b + length),
                     std::vector<Matrix>(noise_covs_.begin() + b, noise_covs_.begin() + b + length));
}

NcvBlocks ncv_blocks(double step_seconds, double noise_intensity, int axes) {
  if (!(step_seconds > 0.0)) throw Error(ErrorCode::InvalidParam, "step duration T must be positive");
  if (!(noise_intensity > 0.0)) throw Error(ErrorCode::InvalidParam, "noise intensity q must be positive");
  if (axes < 1) throw Error(ErrorCode::InvalidParam, "axes must be >= 1");
  const double t = step_seconds;
  const double q = noise_intensity;
  Eigen::Matrix2d f;
  f << 1.0, t, 0.0, 1.0;
  Eigen::Matrix2d qb;
  qb << q * t * t * t / 3.0, q * t * t / 2.0, q * t * t / 2.0, q * t;
  const Index d = 2 * axes;
  NcvBlocks out{Matrix::Zero(d, d), Matrix::Zero(d, d)};
  for (int a = 0; a < axes; ++a) {
    out.transition.block<2, 2>(2 * a, 2 * a) = f;
    out.noise_cov.block<2, 2>(2 * a, 2 * a) = qb;
  }
  return out;
}

MarkovModel build_ncv(double step_seconds, double noise_intensity, int axes, int horizon) {
  const auto b = ncv_blocks(step_seconds, noise_intensity, axes);
  return MarkovModel::time_invariant(b.transition, b.noise_cov, horizon);
}

std::vector<EndConditional> end_conditionals(const MarkovModel& model) {
  const int n = model.horizon();
  const Index d = model.state_dim();
  std::vector<EndConditional> out(static_cast<std::size_t>(n + 1));
  out[static_cast<std::size_t>(n)] = {Matrix::Identity(d, d), Matrix::Zero(d, d), true};
  // M_{N|k} = M_{N|k+1} M_{k+1,k};  C_{N|k} = M_{N|k+1} M_{k+1} M_{N|k+1}' + C_{N|k+1}
  for (int k = n - 1; k >= 0; --k) {
    const auto& next = out[static_cast<std::size_t>(k + 1)];
    auto& cur = out[static_cast<std::size_t>(k)];
    cur.transition = next.transition * model.transition(k + 1);
    cur.cov = symmetrize(next.transition * model.noise_cov(k + 1) * next.transition.transpose() + next.cov);
    cur.degenerate = false;
  }
  return out;
}

EndConditional end_conditional(const MarkovModel& model, int k) {
  if (k < 0 || k > model.horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, "end_conditional index " + std::to_string(k) + " outside [0, " +
                                                std::to_string(model.horizon()) + "]");
  }
  const Index d = model.state_dim();
  EndConditional acc{Matrix::Identity(d, d), Matrix::Zero(d, d), true};
  for (int j = model.horizon() - 1; j >= k; --j) {
    acc.cov = symmetrize(acc.transition * model.noise_cov(j + 1) * acc.transition.transpose() + acc.cov);
    acc.transition = acc.transition * model.transition(j + 1);
    acc.degenerate = false;
  }
  return acc;
}

Gaussian end_density(const MarkovModel& model, int i, const Vector& state) {
  if (i < 0 || i >= model.horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, "end_density index " + std::to_string(i) + " outside [0, " +
                                                std::to_string(model.horizon() - 1) + "]");
  }
  if (state.size() != model.state_dim()) throw Error(ErrorCode::InvalidParam, "state dimension mismatch");
  auto ec = end_conditional(model, i);
  SpdFactor check(ec.cov, "C_{N|i}");
  return {ec.transition * state, std::move(ec.cov)};
}

std::vector<Vector> simulate_markov(const MarkovModel& model, RngStream& rng) {
  if (!model.prior()) throw Error(ErrorCode::InvalidParam, "simulate_markov requires a prior");
  std::vector<Vector> path;
  path.reserve(static_cast<std::size_t>(model.horizon() + 1));
  path.push_back(sample(*model.prior(), rng));
  for (int k = 1; k <= model.horizon(); ++k) {
    const Matrix lower = cholesky(model.noise_cov(k));
    path.push_back(model.transition(k) * path.back() + lower * rng.standard_normal(model.state_dim()));
  }
  return path;
}

}  // namespace wpcm
