#pragma once

// Dense Gaussian-density primitives shared by every model in the library.
//
// Covariances are symmetrized as (A + A')/2 before factorization, and every
// "inverse" in the library is evaluated as a Cholesky solve. A matrix counts
// as SPD when it is symmetric to a relative tolerance of 1e-9 and every
// Cholesky pivot exceeds 1e-12 * trace / dim.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "wpcm/rng.hpp"

namespace wpcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kPivotFloorFactor = 1e-12;

Matrix symmetrize(const Matrix& m);

bool all_finite(const Matrix& m) noexcept;

/// Relative asymmetry max|A - A'| / max|A| (0 for the zero matrix).
double asymmetry(const Matrix& m) noexcept;

/// Lower Cholesky factor of a symmetric positive definite matrix.
/// Throws Error(NotSpd) for non-square, asymmetric, non-finite or
/// non-positive-definite input.
Matrix cholesky(const Matrix& m);

bool is_spd(const Matrix& m) noexcept;

/// Validated Cholesky factorization used for all solves against a covariance.
class SpdFactor {
 public:
  /// `what` names the matrix in error messages.
  explicit SpdFactor(const Matrix& m, std::string_view what = "matrix");

  Index dim() const noexcept { return llt_.rows(); }
  Matrix lower() const { return llt_.matrixL(); }

  /// Returns m^{-1} * rhs.
  Matrix solve(const Matrix& rhs) const;
  Vector solve(const Vector& rhs) const;

  /// Returns lhs * m^{-1}, i.e. (m^{-1} lhs')'.
  Matrix right_solve(const Matrix& lhs) const;

  /// m^{-1}; only for callers that genuinely need the full precision matrix.
  Matrix inverse() const;

 private:
  Eigen::LLT<Matrix> llt_;
};

struct Gaussian {
  Vector mean;
  Matrix cov;

  Index dim() const noexcept { return mean.size(); }
};

/// Checks dim(mean) == dim(cov), finiteness and SPD covariance.
void validate(const Gaussian& g, std::string_view what = "gaussian");

struct Block {
  std::string name;
  Index size = 0;
};

/// A Gaussian over a stack of named blocks.
class JointGaussian {
 public:
  JointGaussian(Vector mean, Matrix cov, std::vector<Block> blocks);

  /// Single-block joint named `name`.
  static JointGaussian single(Gaussian g, std::string name);

  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  Index dim() const noexcept { return mean_.size(); }

  bool has_block(std::string_view name) const noexcept;
  Index offset(std::string_view name) const;
  Index block_size(std::string_view name) const;

  /// Indices of `name` within the stacked vector.
  std::vector<Index> indices(std::string_view name) const;

  Gaussian as_gaussian() const { return {mean_, cov_}; }

 private:
  std::size_t find(std::string_view name) const;

  Vector mean_;
  Matrix cov_;
  std::vector<Block> blocks_;
};

Gaussian marginal(const Gaussian& g, std::span<const Index> keep);
Gaussian marginal(const JointGaussian& joint, std::string_view block);

/// Sub-joint over the named blocks, in the order given.
JointGaussian marginal(const JointGaussian& joint, std::span<const std::string> blocks);

/// Conditions `g` on the coordinates `observed` taking `value`; the result
/// covers the remaining coordinates in ascending order.
Gaussian condition(const Gaussian& g, std::span<const Index> observed, const Vector& value);

/// Conditions the joint on block `observed`; the result is the joint of the
/// remaining blocks in their original order.
JointGaussian condition(const JointGaussian& joint, std::string_view observed, const Vector& value);

/// Regression of the coordinates `target` on `given`: returns the matrix
/// A with E[target | given] = mean_t + A (given - mean_g).
Matrix regression_gain(const Matrix& cov, std::span<const Index> target,
                       std::span<const Index> given);

/// mean + L z with z drawn from `rng`.
Vector sample(const Gaussian& g, RngStream& rng);

/// Sample with a precomputed lower factor.
Vector sample(const Vector& mean, const Matrix& lower, RngStream& rng);

/// Builds a joint Gaussian block by block, each new block being an affine
/// function of earlier blocks plus independent zero-mean noise.
class JointBuilder {
 public:
  struct Parent {
    std::string name;
    Matrix gain;
  };

  /// block = offset + sum(parent.gain * parent) + e,  e ~ N(0, noise_cov).
  /// noise_cov may be singular (e.g. zero).
  void add(std::string name, const Vector& offset, const std::vector<Parent>& parents,
           const Matrix& noise_cov);

  /// Joint in insertion order.
  JointGaussian build() const;

  /// Joint with blocks permuted into `order` (must name every block once).
  JointGaussian build(std::span<const std::string> order) const;

  Index dim() const noexcept { return mean_.size(); }

 private:
  std::vector<Block> blocks_;
  std::vector<Index> offsets_;
  Vector mean_;
  Matrix cov_;
};

Matrix select(const Matrix& m, std::span<const Index> rows, std::span<const Index> cols);
Vector select(const Vector& v, std::span<const Index> idx);

}  // namespace wpcm
