#pragma once

#include <optional>
#include <vector>

#include "wpcm/gaussian.hpp"

namespace wpcm {

/// x_k = M_{k,k-1} x_{k-1} + e_k,  e_k ~ N(0, M_k),  k = 1..N.
/// Step matrices are stored per step and may vary with k.
class MarkovModel {
 public:
  MarkovModel(std::vector<Matrix> transitions, std::vector<Matrix> noise_covs,
              std::optional<Gaussian> prior = std::nullopt);

  /// Same (F, Q) at every step.
  static MarkovModel time_invariant(const Matrix& transition, const Matrix& noise_cov, int horizon,
                                    std::optional<Gaussian> prior = std::nullopt);

  int horizon() const noexcept { return static_cast<int>(transitions_.size()); }
  Index state_dim() const noexcept { return transitions_.front().rows(); }

  /// M_{k,k-1}, k in [1, N].
  const Matrix& transition(int k) const;
  /// M_k, k in [1, N].
  const Matrix& noise_cov(int k) const;

  const std::optional<Gaussian>& prior() const noexcept { return prior_; }
  MarkovModel with_prior(Gaussian prior) const;

  /// Steps first_step .. first_step + length - 1 re-indexed as 1..length.
  MarkovModel slice(int first_step, int length) const;

 private:
  std::vector<Matrix> transitions_;
  std::vector<Matrix> noise_covs_;
  std::optional<Gaussian> prior_;
};

/// Nearly-constant-velocity model: per axis F = [[1,T],[0,1]] and
/// Q = q [[T^3/3, T^2/2],[T^2/2, T]], block-diagonal over `axes`; state
/// ordering is (pos, vel) per axis.
struct NcvBlocks {
  Matrix transition;
  Matrix noise_cov;
};

NcvBlocks ncv_blocks(double step_seconds, double noise_intensity, int axes);

MarkovModel build_ncv(double step_seconds, double noise_intensity, int axes, int horizon);

/// M_{N|k} and C_{N|k}. At k = N the accumulation is the empty sum: the
/// covariance is zero and `degenerate` is set.
struct EndConditional {
  Matrix transition;
  Matrix cov;
  bool degenerate = false;
};

EndConditional end_conditional(const MarkovModel& model, int k);

/// All end conditionals for k = 0..N, computed by the backward recursion.
std::vector<EndConditional> end_conditionals(const MarkovModel& model);

/// p(s_N | s_i) = N(M_{N|i} s_i, C_{N|i}), i in [0, N-1].
Gaussian end_density(const MarkovModel& model, int i, const Vector& state);

/// Sample path x_0..x_N; requires a prior.
std::vector<Vector> simulate_markov(const MarkovModel& model, RngStream& rng);

}  // namespace wpcm
