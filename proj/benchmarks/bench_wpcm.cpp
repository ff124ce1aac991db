#include <benchmark/benchmark.h>

#include <vector>

#include "wpcm/experiment.hpp"
#include "wpcm/filter.hpp"
#include "wpcm/predictor.hpp"

namespace {

struct Airliner {
  wpcm::MarkovModel markov = wpcm::build_ncv(15.0, 0.01, 2, 150);
  wpcm::CmWaypointModel truth = wpcm::build_waypoint_model(wpcm::airliner_scenario(), markov);
  wpcm::CmWaypointModel assumed = wpcm::build_waypoint_model(wpcm::airliner_scenario().prefix(3), markov);
  wpcm::MeasurementModel meas = wpcm::position_measurement(2, 100.0);
};

const Airliner& airliner() {
  static const Airliner p;
  return p;
}

void BM_BuildModel(benchmark::State& state) {
  const auto s = wpcm::airliner_scenario();
  const auto markov = wpcm::build_ncv(15.0, 0.01, 2, 150);
  for (auto _ : state) benchmark::DoNotOptimize(wpcm::build_waypoint_model(s, markov));
}
BENCHMARK(BM_BuildModel);

void BM_FilterStep(benchmark::State& state) {
  const auto& p = airliner();
  const auto init = wpcm::init_from_scenario(p.assumed);
  wpcm::Vector z(2);
  z << 11000.0, 5500.0;
  const std::optional<wpcm::Vector> zk = z;
  for (auto _ : state) benchmark::DoNotOptimize(wpcm::filter_step(init, zk, p.assumed, p.meas));
}
BENCHMARK(BM_FilterStep);

void BM_Simulate(benchmark::State& state) {
  const auto& p = airliner();
  wpcm::RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(wpcm::simulate_waypoint_trajectory(p.truth, rng));
}
BENCHMARK(BM_Simulate);

void BM_PredictRange(benchmark::State& state) {
  const auto& p = airliner();
  wpcm::RngStream rng(2);
  const auto x = wpcm::simulate_waypoint_trajectory(p.truth, rng);
  const auto z = wpcm::synthesize_measurements(x, p.meas, 4, rng);
  const auto res = wpcm::run_filter(p.assumed, p.meas, z);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpcm::predict_range(res.terminal, p.assumed, 5, 150, {2}, p.markov));
  }
}
BENCHMARK(BM_PredictRange);

void BM_RunCase(benchmark::State& state) {
  const auto c = wpcm::airliner_case("ii", wpcm::airliner_scenario());
  const wpcm::ExperimentSetup setup;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpcm::run_case(c, setup, static_cast<int>(state.range(0)), 7, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunCase)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
