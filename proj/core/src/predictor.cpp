#include "wpcm/predictor.hpp"

#include <algorithm>
#include <string>

#include "wpcm/error.hpp"

namespace wpcm {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::InSegment: return "in_segment";
    case Regime::SegmentEnd: return "segment_end";
    case Regime::KnownWaypoint: return "known_waypoint";
    case Regime::FutureSegment: return "future_segment";
    case Regime::BeyondKnown: return "beyond_known";
  }
  return "unknown";
}

namespace {

void check_known(const AugmentedFilterState& state, const CmWaypointModel& model, const KnownWaypointSet& known) {
  if (known.last_known < state.segment || known.last_known > model.last_index()) {
    throw Error(ErrorCode::InvalidParam, "known waypoints must include the current segment end (" +
                                             std::to_string(state.segment) + ") and exist in the model");
  }
}

// Advances an augmented (x, x_end) pair of segment `n` from absolute time
// `from` to `to` with no measurements.
void propagate(Vector& y, Matrix& sigma, const CmWaypointModel& model, int n, int from, int to) {
  const int start = model.time(n - 1);
  const Index d = model.state_dim();
  const auto& seg = model.segment(n);
  Matrix gy = Matrix::Identity(2 * d, 2 * d);
  for (int k = from + 1; k <= to; ++k) {
    const auto& step = seg.step(k - start);
    gy.topLeftCorner(d, d) = step.prev_gain;
    gy.topRightCorner(d, d) = step.end_gain;
    y = gy * y;
    sigma = gy * sigma * gy.transpose();
    sigma.topLeftCorner(d, d) += step.noise_cov;
    sigma = symmetrize(sigma);
  }
}

PredictionResult head(int target, Regime regime, const Vector& y, const Matrix& sigma, Index d) {
  return {target, regime, y.head(d), sigma.topLeftCorner(d, d)};
}

Gaussian waypoint_posterior(const AugmentedFilterState& state, const CmWaypointModel& model, int q) {
  const int n = state.segment;
  Gaussian end = state.segment_end();
  if (q == n) return end;
  const auto& s = model.scenario();
  const Matrix g = waypoint_chain_gain(model, n, q);
  const Matrix& cq = s.covs[static_cast<std::size_t>(q)];
  const Matrix& cn = s.covs[static_cast<std::size_t>(n)];
  // G_{N_q} = C_{N_q} - C_{N_q,N_n} C_{N_n}^{-1} C_{N_q,N_n}' with C_{N_q,N_n} = G C_{N_n}
  const Matrix residual = cq - g * cn * g.transpose();
  return {s.means[static_cast<std::size_t>(q)] + g * (end.mean - s.means[static_cast<std::size_t>(n)]),
          symmetrize(residual + g * end.cov * g.transpose())};
}

// Joint of (x_{N_q}, x_{N_{q+1}}) given z^k as an augmented pair.
void future_segment_start(const AugmentedFilterState& state, const CmWaypointModel& model, int q, Vector& y,
                          Matrix& sigma) {
  const Index d = model.state_dim();
  const Gaussian at_q = waypoint_posterior(state, model, q);
  const Gaussian at_next = waypoint_posterior(state, model, q + 1);
  const Matrix cross = model.waypoint_gain(q + 1) * at_q.cov;
  y.resize(2 * d);
  y << at_q.mean, at_next.mean;
  sigma.resize(2 * d, 2 * d);
  sigma << at_q.cov, cross.transpose(), cross, at_next.cov;
}

// Targets past the model horizon are served by the Markov regime, which
// bounds them by the Markov model's own horizon.
void check_target(const AugmentedFilterState& state, int target) {
  if (target < state.time) {
    throw Error(ErrorCode::IndexOutOfRange, "target " + std::to_string(target) + " precedes the filter time " +
                                                std::to_string(state.time));
  }
}

}  // namespace

PredictionResult predict_in_segment(const AugmentedFilterState& state, const CmWaypointModel& model, int target) {
  const int end = model.time(state.segment);
  if (target < state.time || target > end - 1) {
    throw Error(ErrorCode::HorizonOutOfSegment, "target " + std::to_string(target) + " not in [" +
                                                    std::to_string(state.time) + ", " + std::to_string(end - 1) + "]");
  }
  Vector y = state.estimate;
  Matrix sigma = state.mse;
  propagate(y, sigma, model, state.segment, state.time, target);
  return head(target, Regime::InSegment, y, sigma, state.state_dim());
}

PredictionResult predict_at_segment_end(const AugmentedFilterState& state, const CmWaypointModel& model) {
  auto g = state.segment_end();
  return {model.time(state.segment), Regime::SegmentEnd, std::move(g.mean), std::move(g.cov)};
}

PredictionResult predict_at_waypoint(const AugmentedFilterState& state, const CmWaypointModel& model, int q,
                                     const KnownWaypointSet& known) {
  check_known(state, model, known);
  if (q < state.segment || q > model.last_index()) {
    throw Error(ErrorCode::IndexOutOfRange, "waypoint " + std::to_string(q) + " is not ahead of segment " +
                                                std::to_string(state.segment));
  }
  if (q > known.last_known) {
    throw Error(ErrorCode::WaypointUnknown, "waypoint " + std::to_string(q) + " has not been broadcast");
  }
  if (q == state.segment) return predict_at_segment_end(state, model);
  auto g = waypoint_posterior(state, model, q);
  return {model.time(q), Regime::KnownWaypoint, std::move(g.mean), std::move(g.cov)};
}

PredictionResult predict_in_future_segment(const AugmentedFilterState& state, const CmWaypointModel& model,
                                           int target, const KnownWaypointSet& known) {
  check_known(state, model, known);
  if (target < model.time(state.segment) || target >= model.horizon()) {
    throw Error(ErrorCode::IndexOutOfRange, "target " + std::to_string(target) + " is not in a future segment");
  }
  const int q = model.segment_of(target) - 1;
  if (q + 1 > known.last_known) {
    throw Error(ErrorCode::WaypointUnknown, "segment ending at waypoint " + std::to_string(q + 1) +
                                               " needs that waypoint to be known");
  }
  Vector y;
  Matrix sigma;
  future_segment_start(state, model, q, y, sigma);
  propagate(y, sigma, model, q + 1, model.time(q), target);
  return head(target, Regime::FutureSegment, y, sigma, state.state_dim());
}

PredictionResult predict_beyond_known(const AugmentedFilterState& state, const CmWaypointModel& model, int target,
                                      const KnownWaypointSet& known, const MarkovModel& markov) {
  check_known(state, model, known);
  const int q = known.last_known;
  const int base_time = model.time(q);
  if (target < base_time) {
    throw Error(ErrorCode::IndexOutOfRange, "target " + std::to_string(target) + " precedes the last known waypoint");
  }
  const Gaussian base = waypoint_posterior(state, model, q);
  if (target == base_time) return {target, Regime::BeyondKnown, base.mean, base.cov};
  const auto ec = end_conditional(markov.slice(1, target - base_time), 0);
  return {target, Regime::BeyondKnown, ec.transition * base.mean,
          symmetrize(ec.transition * base.cov * ec.transition.transpose() + ec.cov)};
}

PredictionResult predict(const AugmentedFilterState& state, const CmWaypointModel& model, int target,
                         const KnownWaypointSet& known, const MarkovModel& markov) {
  check_target(state, target);
  check_known(state, model, known);
  const int end = model.time(state.segment);
  if (target < end) return predict_in_segment(state, model, target);
  if (target == end) return predict_at_segment_end(state, model);
  if (target > model.time(known.last_known)) return predict_beyond_known(state, model, target, known, markov);
  const int q = model.waypoint_at(target);
  if (q >= 0) return predict_at_waypoint(state, model, q, known);
  return predict_in_future_segment(state, model, target, known);
}

std::vector<PredictionResult> predict_range(const AugmentedFilterState& state, const CmWaypointModel& model,
                                            int first, int last, const KnownWaypointSet& known,
                                            const MarkovModel& markov) {
  check_known(state, model, known);
  std::vector<PredictionResult> out;
  if (last < first) return out;
  check_target(state, first);
  check_target(state, last);
  const Index d = state.state_dim();
  out.reserve(static_cast<std::size_t>(last - first + 1));

  // Current segment.
  const int end = model.time(state.segment);
  {
    Vector y = state.estimate;
    Matrix sigma = state.mse;
    int t = state.time;
    for (int target = first; target <= last && target < end; ++target) {
      propagate(y, sigma, model, state.segment, t, target);
      t = target;
      out.push_back(head(target, Regime::InSegment, y, sigma, d));
    }
  }
  if (first <= end && end <= last) out.push_back(predict_at_segment_end(state, model));

  // Known future segments.
  const int known_end = model.time(known.last_known);
  for (int q = state.segment; q < known.last_known; ++q) {
    const int seg_start = model.time(q);
    const int seg_end = model.time(q + 1);
    if (seg_end < first || seg_start >= last) continue;
    Vector y;
    Matrix sigma;
    future_segment_start(state, model, q, y, sigma);
    int t = seg_start;
    for (int target = std::max(first, seg_start + 1); target <= last && target < seg_end; ++target) {
      propagate(y, sigma, model, q + 1, t, target);
      t = target;
      out.push_back(head(target, Regime::FutureSegment, y, sigma, d));
    }
    if (seg_end >= first && seg_end <= last) {
      auto g = waypoint_posterior(state, model, q + 1);
      out.push_back({seg_end, Regime::KnownWaypoint, std::move(g.mean), std::move(g.cov)});
    }
  }

  // Beyond the last known waypoint.
  if (last > known_end) {
    const Gaussian base = waypoint_posterior(state, model, known.last_known);
    Vector mean = base.mean;
    Matrix cov = base.cov;
    for (int t = known_end + 1; t <= last; ++t) {
      const int step = t - known_end;
      const Matrix& f = markov.transition(step);
      mean = f * mean;
      cov = symmetrize(f * cov * f.transpose() + markov.noise_cov(step));
      if (t >= first) out.push_back({t, Regime::BeyondKnown, mean, cov});
    }
  }
  return out;
}

}  // namespace wpcm
