#pragma once

#include <vector>

#include "wpcm/gaussian.hpp"
#include "wpcm/markov_model.hpp"

namespace wpcm {

/// Coefficients of x_k = G_{k,k-1} x_{k-1} + G_{k,N} x_N + e_k, e_k ~ N(0, G_k),
/// for the interior times k = 1..N-1 of one segment of length N.
class CmlSegmentModel {
 public:
  struct Step {
    Matrix prev_gain;  // G_{k,k-1}
    Matrix end_gain;   // G_{k,N}
    Matrix noise_cov;  // G_k
    Matrix noise_lower{};  // Cholesky factor of G_k, filled by the constructor
  };

  CmlSegmentModel(int length, Index state_dim, std::vector<Step> steps);

  int length() const noexcept { return length_; }
  Index state_dim() const noexcept { return dim_; }

  /// Interior step k in [1, N-1].
  const Step& step(int k) const;

 private:
  int length_;
  Index dim_;
  std::vector<Step> steps_;
};

/// CM_L model induced by a Markov model over its full horizon N:
///   G_k     = (M_k^{-1} + M_{N|k}' C_{N|k}^{-1} M_{N|k})^{-1}
///   G_{k,N} = G_k M_{N|k}' C_{N|k}^{-1}
///   G_{k,k-1} = M_{k,k-1} - G_{k,N} M_{N|k-1}
/// A horizon of 1 yields a segment with no interior steps.
CmlSegmentModel induce_cml(const MarkovModel& markov);

/// Endpoint law in the x_N-first ordering:
///   x_N ~ N(mu_N, C_N),  x_0 = mu_0 + G_{0,N}(x_N - mu_N) + e_0,  e_0 ~ N(0, G_0).
struct CmlBoundary {
  Gaussian end;
  Vector start_mean;
  Matrix start_gain;      // G_{0,N}
  Matrix start_residual;  // G_0
};

/// `cross` is Cov(x_0, x_N).
CmlBoundary boundary_from_endpoints(const Vector& start_mean, const Vector& end_mean, const Matrix& start_cov,
                                    const Matrix& end_cov, const Matrix& cross);

/// Sample path x_0..x_N. Interior states follow the recursion on raw states.
std::vector<Vector> simulate_cml(const CmlSegmentModel& seg, const CmlBoundary& boundary, RngStream& rng);

/// Exact joint of (x_0..x_N), blocks named "x0".."xN" in time order.
JointGaussian full_joint_cml(const CmlSegmentModel& seg, const CmlBoundary& boundary);

}  // namespace wpcm
