#pragma once

// Brute-force Gaussian oracles for tests. Every random vector is held as an
// affine map of i.i.d. standard-normal sources, x = b + A w, so joint moments
// are read off as A A' and conditioning goes through a pseudo-inverse. None of
// this shares code with the library's JointBuilder / SpdFactor / filter path.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wpcm/filter.hpp"
#include "wpcm/markov_model.hpp"
#include "wpcm/waypoint.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

/// Symmetric square root through the eigendecomposition; tolerates PSD input.
inline Matrix psd_sqrt(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cov + cov.transpose()));
  const Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

class LinearSystem {
 public:
  int add_root(const Vector& mean, const Matrix& cov) { return add(mean, {}, cov); }

  /// x = offset + sum(gain * parent) + e,  e ~ N(0, noise_cov)
  int add(const Vector& offset, const std::vector<std::pair<int, Matrix>>& parents, const Matrix& noise_cov) {
    const Eigen::Index d = offset.size();
    const Matrix root = psd_sqrt(noise_cov);
    const Eigen::Index fresh = root.cols();
    Vector b = offset;
    Matrix a = Matrix::Zero(d, sources_ + fresh);
    for (const auto& [id, gain] : parents) {
      b += gain * offsets_[static_cast<std::size_t>(id)];
      const Matrix& pa = coeffs_[static_cast<std::size_t>(id)];
      a.leftCols(pa.cols()) += gain * pa;
    }
    a.rightCols(fresh) = root;
    sources_ += fresh;
    offsets_.push_back(b);
    coeffs_.push_back(a);
    return static_cast<int>(offsets_.size()) - 1;
  }

  Vector mean(const std::vector<int>& vars) const {
    Vector m(dim(vars));
    Eigen::Index off = 0;
    for (int v : vars) {
      const auto& b = offsets_[static_cast<std::size_t>(v)];
      m.segment(off, b.size()) = b;
      off += b.size();
    }
    return m;
  }

  Matrix coeffs(const std::vector<int>& vars) const {
    Matrix a = Matrix::Zero(dim(vars), sources_);
    Eigen::Index off = 0;
    for (int v : vars) {
      const auto& c = coeffs_[static_cast<std::size_t>(v)];
      a.block(off, 0, c.rows(), c.cols()) = c;
      off += c.rows();
    }
    return a;
  }

  Matrix cov(const std::vector<int>& rows, const std::vector<int>& cols) const {
    return coeffs(rows) * coeffs(cols).transpose();
  }

  Matrix cov(const std::vector<int>& vars) const { return cov(vars, vars); }

  /// Moments of `target` given `observed` = value (all observed vars stacked).
  std::pair<Vector, Matrix> conditional(const std::vector<int>& target, const std::vector<int>& observed,
                                        const Vector& value) const {
    const Vector mt = mean(target);
    const Matrix ctt = cov(target);
    if (observed.empty()) return {mt, ctt};
    const Matrix cto = cov(target, observed);
    const Matrix coo = cov(observed);
    const auto cod = coo.completeOrthogonalDecomposition();
    const Matrix gain = cod.solve(cto.transpose()).transpose();
    return {mt + gain * (value - mean(observed)), ctt - gain * cto.transpose()};
  }

  /// Regression matrix of `target` on `given`.
  Matrix regression(const std::vector<int>& target, const std::vector<int>& given) const {
    const auto cod = cov(given).completeOrthogonalDecomposition();
    return cod.solve(cov(target, given).transpose()).transpose();
  }

  Eigen::Index dim(const std::vector<int>& vars) const {
    Eigen::Index n = 0;
    for (int v : vars) n += offsets_[static_cast<std::size_t>(v)].size();
    return n;
  }

 private:
  std::vector<Vector> offsets_;
  std::vector<Matrix> coeffs_;
  Eigen::Index sources_ = 0;
};

/// Markov sequence x_0..x_N with the model's prior.
inline std::vector<int> markov_states(LinearSystem& sys, const wpcm::MarkovModel& m) {
  std::vector<int> ids;
  ids.push_back(sys.add_root(m.prior()->mean, m.prior()->cov));
  for (int k = 1; k <= m.horizon(); ++k) {
    ids.push_back(sys.add(Vector::Zero(m.state_dim()), {{ids.back(), m.transition(k)}}, m.noise_cov(k)));
  }
  return ids;
}

/// States x_0..x_{N_m} of a waypoint model, from its coefficients.
inline std::vector<int> waypoint_states(LinearSystem& sys, const wpcm::CmWaypointModel& model) {
  const auto& s = model.scenario();
  std::vector<int> ids(static_cast<std::size_t>(model.horizon() + 1), -1);
  ids[0] = sys.add_root(s.means[0], s.covs[0]);
  const Vector zero = Vector::Zero(model.state_dim());
  for (int n = 1; n <= model.last_index(); ++n) {
    const int start = model.time(n - 1);
    const int end = model.time(n);
    const Matrix& g = model.waypoint_gain(n);
    ids[static_cast<std::size_t>(end)] =
        sys.add(s.means[static_cast<std::size_t>(n)] - g * s.means[static_cast<std::size_t>(n - 1)],
                {{ids[static_cast<std::size_t>(start)], g}}, model.waypoint_residual(n));
    for (int k = 1; k < model.segment(n).length(); ++k) {
      const auto& st = model.segment(n).step(k);
      ids[static_cast<std::size_t>(start + k)] =
          sys.add(zero, {{ids[static_cast<std::size_t>(start + k - 1)], st.prev_gain},
                         {ids[static_cast<std::size_t>(end)], st.end_gain}},
                  st.noise_cov);
    }
  }
  return ids;
}

/// States, measurements and (optionally) a Markov tail leaving waypoint
/// `tail_from` for `tail_steps` steps, all in one system.
struct BatchOracle {
  LinearSystem sys;
  std::vector<int> states;                 // x_t, t = 0..N_m
  std::map<int, int> measurement_ids;      // k -> z_k
  std::vector<int> tail;                   // tail[j] = x_{N_q + j + 1} under the Markov law
  std::vector<std::optional<Vector>> z;    // z[k-1] = z_k

  BatchOracle(const wpcm::CmWaypointModel& model, const wpcm::MeasurementModel& meas,
              std::vector<std::optional<Vector>> measurements, int tail_from = -1,
              const wpcm::MarkovModel* markov = nullptr, int tail_steps = 0)
      : z(std::move(measurements)) {
    states = waypoint_states(sys, model);
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!z[i]) continue;
      const int k = static_cast<int>(i) + 1;
      measurement_ids[k] = sys.add(Vector::Zero(meas.observation.rows()),
                                   {{states[static_cast<std::size_t>(k)], meas.observation}}, meas.noise_cov);
    }
    if (tail_from >= 0 && markov != nullptr) {
      int prev = states[static_cast<std::size_t>(model.time(tail_from))];
      for (int j = 1; j <= tail_steps; ++j) {
        prev = sys.add(Vector::Zero(model.state_dim()), {{prev, markov->transition(j)}}, markov->noise_cov(j));
        tail.push_back(prev);
      }
    }
  }

  /// Moments of the given variables conditioned on z_1..z_k.
  std::pair<Vector, Matrix> given_through(const std::vector<int>& vars, int k) const {
    std::vector<int> obs;
    std::vector<Vector> vals;
    Eigen::Index n = 0;
    for (const auto& [t, id] : measurement_ids) {
      if (t > k) break;
      obs.push_back(id);
      vals.push_back(*z[static_cast<std::size_t>(t - 1)]);
      n += vals.back().size();
    }
    Vector v(n);
    Eigen::Index off = 0;
    for (const auto& x : vals) {
      v.segment(off, x.size()) = x;
      off += x.size();
    }
    return sys.conditional(vars, obs, v);
  }

  std::pair<Vector, Matrix> state_given(int t, int k) const {
    return given_through({states[static_cast<std::size_t>(t)]}, k);
  }
};

}  // namespace oracle
