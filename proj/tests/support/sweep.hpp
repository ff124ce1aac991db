#pragma once

// Filter + predictor sweep against the batch oracle: every filter time k,
// every admissible known-waypoint set, every target from k to past the last
// known waypoint. Reports the worst relative errors.

#include <algorithm>
#include <set>
#include <span>
#include <vector>

#include "oracle.hpp"
#include "scenarios.hpp"
#include "wpcm/predictor.hpp"

namespace sweep {

struct Report {
  double filter = 0.0;     // run_filter estimates vs x_k | z^k
  double predictor = 0.0;  // predict() vs x_t | z^k
  double range = 0.0;      // predict_range() vs predict()
  std::set<wpcm::Regime> regimes;
  int predictions = 0;
};

inline Report run(const scenarios::Setup& s, int tail_steps) {
  Report rep;
  const auto model = wpcm::build_waypoint_model(s.scenario, s.markov);
  const int m = model.last_index();
  const int big_k = static_cast<int>(s.z.size());

  // one oracle per possible last-known waypoint, each with its Markov tail
  std::vector<oracle::BatchOracle> batches;
  for (int lk = 0; lk <= m; ++lk) batches.emplace_back(model, s.meas, s.z, lk, &s.markov, tail_steps);

  for (int k = 0; k <= big_k; ++k) {
    const std::span<const std::optional<wpcm::Vector>> zk(s.z.data(), static_cast<std::size_t>(k));
    const auto res = wpcm::run_filter(model, s.meas, zk);
    {
      const auto [mean, cov] = batches[0].state_given(k, k);
      rep.filter = std::max({rep.filter, oracle::rel_err(res.estimates.back().mean, mean),
                             oracle::rel_err(res.estimates.back().cov, cov)});
    }
    const auto& state = res.terminal;
    for (int lk = state.segment; lk <= m; ++lk) {
      const wpcm::KnownWaypointSet known{lk};
      const auto& batch = batches[static_cast<std::size_t>(lk)];
      const int known_end = model.time(lk);
      const int last = known_end + tail_steps;
      const auto range = wpcm::predict_range(state, model, k, last, known, s.markov);
      if (range.size() != static_cast<std::size_t>(last - k + 1)) {
        rep.range = 1.0;
        continue;
      }
      for (int t = k; t <= last; ++t) {
        const auto p = wpcm::predict(state, model, t, known, s.markov);
        const int var = t <= known_end ? batch.states[static_cast<std::size_t>(t)]
                                       : batch.tail[static_cast<std::size_t>(t - known_end - 1)];
        const auto [mean, cov] = batch.given_through({var}, k);
        rep.predictor = std::max({rep.predictor, oracle::rel_err(p.mean, mean), oracle::rel_err(p.cov, cov)});
        const auto& r = range[static_cast<std::size_t>(t - k)];
        if (r.target != t || r.regime != p.regime) rep.range = 1.0;
        rep.range = std::max({rep.range, oracle::rel_err(r.mean, p.mean), oracle::rel_err(r.cov, p.cov)});
        rep.regimes.insert(p.regime);
        ++rep.predictions;
      }
    }
  }
  return rep;
}

}  // namespace sweep
