#include "wpcm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wpcm/error.hpp"

namespace wpcm {

namespace {

std::vector<Index> complement(Index n, std::span<const Index> idx) {
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (Index i : idx) {
    if (i < 0 || i >= n) throw Error(ErrorCode::IndexOutOfRange, "coordinate index out of range");
    taken[static_cast<std::size_t>(i)] = true;
  }
  std::vector<Index> rest;
  for (Index i = 0; i < n; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  return rest;
}

}  // namespace

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool all_finite(const Matrix& m) noexcept { return m.allFinite(); }

double asymmetry(const Matrix& m) noexcept {
  if (m.rows() != m.cols() || m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

SpdFactor::SpdFactor(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << " is not square (" << m.rows() << "x" << m.cols() << ")";
    throw Error(ErrorCode::NotSpd, os.str());
  }
  if (!m.allFinite()) throw Error(ErrorCode::NotSpd, std::string(what) + " has non-finite entries");
  if (asymmetry(m) > kSymmetryTolerance) {
    std::ostringstream os;
    os << what << " is not symmetric (relative asymmetry " << asymmetry(m) << ")";
    throw Error(ErrorCode::NotSpd, os.str());
  }
  const Matrix s = symmetrize(m);
  llt_.compute(s);
  const double floor = kPivotFloorFactor * s.trace() / static_cast<double>(s.rows());
  if (llt_.info() != Eigen::Success) {
    throw Error(ErrorCode::NotSpd, std::string(what) + " is not positive definite");
  }
  const auto diag = llt_.matrixLLT().diagonal();
  for (Index i = 0; i < diag.size(); ++i) {
    const double pivot = diag[i] * diag[i];
    if (!(pivot > floor) || !(pivot > 0.0)) {
      std::ostringstream os;
      os << what << " is not positive definite (pivot " << i << " = " << pivot << ")";
      throw Error(ErrorCode::NotSpd, os.str());
    }
  }
}

Matrix SpdFactor::solve(const Matrix& rhs) const { return llt_.solve(rhs); }

Vector SpdFactor::solve(const Vector& rhs) const { return llt_.solve(rhs); }

Matrix SpdFactor::right_solve(const Matrix& lhs) const {
  return llt_.solve(lhs.transpose()).transpose();
}

Matrix SpdFactor::inverse() const {
  return symmetrize(llt_.solve(Matrix::Identity(dim(), dim())));
}

Matrix cholesky(const Matrix& m) { return SpdFactor(m).lower(); }

bool is_spd(const Matrix& m) noexcept {
  try {
    SpdFactor f(m);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void validate(const Gaussian& g, std::string_view what) {
  if (g.cov.rows() != g.mean.size() || g.cov.cols() != g.mean.size()) {
    throw Error(ErrorCode::InvalidParam, std::string(what) + ": mean/covariance dimension mismatch");
  }
  if (!g.mean.allFinite()) throw Error(ErrorCode::InvalidParam, std::string(what) + ": non-finite mean");
  SpdFactor check(g.cov, what);
}

JointGaussian::JointGaussian(Vector mean, Matrix cov, std::vector<Block> blocks)
    : mean_(std::move(mean)), cov_(std::move(cov)), blocks_(std::move(blocks)) {
  Index total = 0;
  for (const auto& b : blocks_) {
    if (b.size <= 0) throw Error(ErrorCode::InvalidParam, "block '" + b.name + "' has nonpositive size");
    total += b.size;
  }
  if (total != mean_.size() || cov_.rows() != total || cov_.cols() != total) {
    throw Error(ErrorCode::InvalidParam, "block sizes do not match joint dimension");
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    for (std::size_t j = i + 1; j < blocks_.size(); ++j) {
      if (blocks_[i].name == blocks_[j].name) {
        throw Error(ErrorCode::InvalidParam, "duplicate block name '" + blocks_[i].name + "'");
      }
    }
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw Error(ErrorCode::InvalidParam, "joint has non-finite entries");
  }
}

JointGaussian JointGaussian::single(Gaussian g, std::string name) {
  const Index n = g.dim();
  return JointGaussian(std::move(g.mean), std::move(g.cov), {Block{std::move(name), n}});
}

std::size_t JointGaussian::find(std::string_view name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].name == name) return i;
  }
  throw Error(ErrorCode::UnknownBlock, "no block named '" + std::string(name) + "'");
}

bool JointGaussian::has_block(std::string_view name) const noexcept {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.name == name; });
}

Index JointGaussian::offset(std::string_view name) const {
  const std::size_t pos = find(name);
  Index off = 0;
  for (std::size_t i = 0; i < pos; ++i) off += blocks_[i].size;
  return off;
}

Index JointGaussian::block_size(std::string_view name) const { return blocks_[find(name)].size; }

std::vector<Index> JointGaussian::indices(std::string_view name) const {
  const Index off = offset(name);
  std::vector<Index> idx(static_cast<std::size_t>(block_size(name)));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = off + static_cast<Index>(i);
  return idx;
}

Matrix select(const Matrix& m, std::span<const Index> rows, std::span<const Index> cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

Vector select(const Vector& v, std::span<const Index> idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

Gaussian marginal(const Gaussian& g, std::span<const Index> keep) {
  for (Index i : keep) {
    if (i < 0 || i >= g.dim()) throw Error(ErrorCode::IndexOutOfRange, "coordinate index out of range");
  }
  return {select(g.mean, keep), select(g.cov, keep, keep)};
}

Gaussian marginal(const JointGaussian& joint, std::string_view block) {
  const auto idx = joint.indices(block);
  return marginal(joint.as_gaussian(), idx);
}

JointGaussian marginal(const JointGaussian& joint, std::span<const std::string> blocks) {
  std::vector<Index> idx;
  std::vector<Block> out_blocks;
  for (const auto& name : blocks) {
    const auto b = joint.indices(name);
    idx.insert(idx.end(), b.begin(), b.end());
    out_blocks.push_back({name, static_cast<Index>(b.size())});
  }
  auto g = marginal(joint.as_gaussian(), idx);
  return JointGaussian(std::move(g.mean), std::move(g.cov), std::move(out_blocks));
}

Matrix regression_gain(const Matrix& cov, std::span<const Index> target,
                       std::span<const Index> given) {
  const Matrix c_tg = select(cov, target, given);
  const SpdFactor c_g(select(cov, given, given), "conditioning covariance");
  return c_g.right_solve(c_tg);
}

Gaussian condition(const Gaussian& g, std::span<const Index> observed, const Vector& value) {
  if (value.size() != static_cast<Index>(observed.size())) {
    throw Error(ErrorCode::InvalidParam, "observed value dimension mismatch");
  }
  const auto rest = complement(g.dim(), observed);
  const Matrix c_ab = select(g.cov, rest, observed);
  const SpdFactor c_b(select(g.cov, observed, observed), "observed-block covariance");
  const Matrix gain = c_b.right_solve(c_ab);
  Gaussian out;
  out.mean = select(g.mean, rest) + gain * (value - select(g.mean, observed));
  out.cov = symmetrize(select(g.cov, rest, rest) - gain * c_ab.transpose());
  return out;
}

JointGaussian condition(const JointGaussian& joint, std::string_view observed, const Vector& value) {
  if (value.size() != joint.block_size(observed)) {
    throw Error(ErrorCode::InvalidParam, "observed value dimension does not match block '" +
                                             std::string(observed) + "'");
  }
  const auto idx = joint.indices(observed);
  auto g = condition(joint.as_gaussian(), idx, value);
  std::vector<Block> rest;
  for (const auto& b : joint.blocks()) {
    if (b.name != observed) rest.push_back(b);
  }
  if (rest.empty()) throw Error(ErrorCode::InvalidParam, "cannot condition on every block");
  return JointGaussian(std::move(g.mean), std::move(g.cov), std::move(rest));
}

Vector sample(const Vector& mean, const Matrix& lower, RngStream& rng) {
  return mean + lower * rng.standard_normal(mean.size());
}

Vector sample(const Gaussian& g, RngStream& rng) {
  if (g.cov.rows() != g.dim()) throw Error(ErrorCode::InvalidParam, "mean/covariance dimension mismatch");
  return sample(g.mean, cholesky(g.cov), rng);
}

void JointBuilder::add(std::string name, const Vector& offset, const std::vector<Parent>& parents,
                       const Matrix& noise_cov) {
  const Index n = offset.size();
  if (noise_cov.rows() != n || noise_cov.cols() != n) {
    throw Error(ErrorCode::InvalidParam, "noise covariance of '" + name + "' has wrong shape");
  }
  for (const auto& b : blocks_) {
    if (b.name == name) throw Error(ErrorCode::InvalidParam, "duplicate block '" + name + "'");
  }
  const Index total = mean_.size();
  Matrix stacked = Matrix::Zero(n, total);
  for (const auto& p : parents) {
    std::size_t pos = blocks_.size();
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].name == p.name) pos = i;
    }
    if (pos == blocks_.size()) throw Error(ErrorCode::UnknownBlock, "unknown parent '" + p.name + "'");
    if (p.gain.rows() != n || p.gain.cols() != blocks_[pos].size) {
      throw Error(ErrorCode::InvalidParam, "gain from '" + p.name + "' has wrong shape");
    }
    stacked.middleCols(offsets_[pos], blocks_[pos].size) += p.gain;
  }
  const Matrix cross = stacked * cov_;
  Matrix own = symmetrize(cross * stacked.transpose() + noise_cov);

  Vector mean(total + n);
  mean.head(total) = mean_;
  mean.tail(n) = offset + stacked * mean_;
  Matrix cov(total + n, total + n);
  cov.topLeftCorner(total, total) = cov_;
  cov.bottomLeftCorner(n, total) = cross;
  cov.topRightCorner(total, n) = cross.transpose();
  cov.bottomRightCorner(n, n) = own;

  mean_ = std::move(mean);
  cov_ = std::move(cov);
  offsets_.push_back(total);
  blocks_.push_back({std::move(name), n});
}

JointGaussian JointBuilder::build() const { return JointGaussian(mean_, cov_, blocks_); }

JointGaussian JointBuilder::build(std::span<const std::string> order) const {
  if (order.size() != blocks_.size()) {
    throw Error(ErrorCode::InvalidParam, "block order must name every block exactly once");
  }
  return marginal(build(), order);
}

}  // namespace wpcm
