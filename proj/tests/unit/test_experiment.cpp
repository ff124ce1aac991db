#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "wpcm/error.hpp"
#include "wpcm/experiment.hpp"

using wpcm::ErrorCode;
using wpcm::Matrix;
using wpcm::PositionSeries;
using wpcm::Vector;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const wpcm::Error& e) {
    return e.code();
  }
  FAIL("expected wpcm::Error");
  return ErrorCode::InvalidParam;
}

Vector v4(double a, double b, double c, double d) {
  Vector v(4);
  v << a, b, c, d;
  return v;
}

Matrix diag4(double a, double b, double c, double d) { return v4(a, b, c, d).asDiagonal(); }

const wpcm::ExperimentCase& find(const std::vector<wpcm::ExperimentCase>& cases, const std::string& id) {
  for (const auto& c : cases)
    if (c.id == id) return c;
  FAIL("missing case " << id);
  return cases.front();
}

}  // namespace

TEST_CASE("truth scenario") {
  const auto s = wpcm::airliner_scenario();
  CHECK(s.times == std::vector<int>{0, 50, 110, 150});
  CHECK(s.step_seconds == 15.0);
  CHECK(s.means[0] == v4(10000, 80, 5000, 30));
  CHECK(s.means[1] == v4(90000, 70, 30000, 50));
  CHECK(s.means[2] == v4(170000, 60, 170000, 60));
  CHECK(s.means[3] == v4(250000, 90, 200000, 30));
  Matrix c = Matrix::Zero(4, 4);
  c << 10000, 400, 0, 0, 400, 100, 0, 0, 0, 0, 10000, 400, 0, 0, 400, 100;
  Matrix x = Matrix::Zero(4, 4);
  x << 8000, 200, 0, 0, 200, 70, 0, 0, 0, 0, 8000, 200, 0, 0, 200, 70;
  for (int n = 0; n < 4; ++n) CHECK(s.covs[static_cast<std::size_t>(n)] == c);
  for (int n = 0; n < 3; ++n) CHECK(s.cross[static_cast<std::size_t>(n)] == x);
  CHECK_NOTHROW(wpcm::validate(s));
}

TEST_CASE("case parameters") {
  const auto cases = wpcm::build_airliner_cases();
  REQUIRE(cases.size() == 7);
  const auto truth = wpcm::airliner_scenario();
  for (const auto& c : cases) {
    CAPTURE(c.id);
    CHECK(c.truth.means == truth.means);
    CHECK(c.assumed.waypoint_count() == 3);
    CHECK(c.assumed.times == std::vector<int>{0, 50, 110});
  }
  const auto& i = find(cases, "i");
  CHECK(i.assumed.means[0] == v4(10000, 80, 5000, 30));
  CHECK(i.assumed.covs[2] == truth.covs[2]);

  const auto& ii = find(cases, "ii");
  CHECK(ii.assumed.means[0] == v4(10000, 60, 5000, 50));
  CHECK(ii.assumed.means[2] == v4(170000, 40, 170000, 80));
  CHECK(ii.assumed.covs[1] == diag4(1e4, 1e4, 1e4, 1e4));
  CHECK(ii.assumed.cross[0] == diag4(7000, 6000, 7000, 6000));

  const auto& iii = find(cases, "iii");
  CHECK(iii.assumed.means == ii.assumed.means);
  CHECK(iii.assumed.cross[1].isZero());

  const auto& iv = find(cases, "iv");
  CHECK(iv.assumed.means[1] == v4(90500, 50, 30500, 70));
  CHECK(iv.assumed.cross[0] == ii.assumed.cross[0]);
  CHECK(find(cases, "v").assumed.cross[0].isZero());

  const auto& vi = find(cases, "vi");
  CHECK(vi.assumed.means == iv.assumed.means);
  CHECK(vi.assumed.covs[0] == diag4(1e5, 1e4, 1e5, 1e4));
  CHECK(vi.assumed.cross[1] == diag4(70000, 6000, 70000, 6000));
  CHECK(find(cases, "vii").assumed.cross[0].isZero());
  CHECK(find(cases, "vii").assumed.covs[0] == vi.assumed.covs[0]);

  CHECK(code_of([&] { wpcm::airliner_case("viii", truth); }) == ErrorCode::InvalidParam);
}

TEST_CASE("aee examples") {
  const std::vector<PositionSeries> truth{{Eigen::Vector2d(0, 0), Eigen::Vector2d(10, 10)}};
  CHECK(wpcm::aee(truth, truth) == std::vector<double>{0.0, 0.0});

  const std::vector<PositionSeries> off{{Eigen::Vector2d(3, 4), Eigen::Vector2d(11, 10)}};
  const auto e = wpcm::aee(truth, off);
  CHECK(e[0] == 5.0);
  CHECK(e[1] == 1.0);

  const std::vector<PositionSeries> short_run{{Eigen::Vector2d(0, 0)}};
  CHECK(code_of([&] { wpcm::aee(truth, short_run); }) == ErrorCode::LengthMismatch);
  const std::vector<PositionSeries> two_runs{truth[0], truth[0]};
  CHECK(code_of([&] { wpcm::aee(truth, two_runs); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("aee against a direct reimplementation") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0.0, 50.0);
  std::vector<PositionSeries> a(17), b(17);
  for (int r = 0; r < 17; ++r) {
    for (int t = 0; t < 9; ++t) {
      a[static_cast<std::size_t>(r)].emplace_back(nd(gen), nd(gen));
      b[static_cast<std::size_t>(r)].emplace_back(nd(gen), nd(gen));
    }
  }
  const auto got = wpcm::aee(a, b);
  for (int t = 0; t < 9; ++t) {
    double sum = 0.0;
    for (int r = 0; r < 17; ++r) {
      const double dx = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)].x() -
                        b[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)].x();
      const double dy = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)].y() -
                        b[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)].y();
      sum += std::hypot(dx, dy);
    }
    CHECK(got[static_cast<std::size_t>(t)] == doctest::Approx(sum / 17).epsilon(1e-12));
  }
}

TEST_CASE("replicates: truth never depends on the assumed case") {
  const auto cases = wpcm::build_airliner_cases();
  const wpcm::ExperimentSetup setup;
  const auto pi = wpcm::prepare_case(find(cases, "i"), setup);
  const auto piv = wpcm::prepare_case(find(cases, "iv"), setup);
  const auto a = wpcm::run_replicate(pi, setup, 17, 3);
  const auto b = wpcm::run_replicate(piv, setup, 17, 3);
  REQUIRE(a.truth.size() == 151);
  for (std::size_t k = 0; k < a.truth.size(); ++k) CHECK(a.truth[k] == b.truth[k]);
  REQUIRE(a.measurements.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(*a.measurements[k] == *b.measurements[k]);
  CHECK(a.predictions.size() == 146);
  CHECK(a.predictions.front().target == 5);
  CHECK(a.filtered.estimates.size() == 5);
  // different estimator, different predictions
  CHECK(a.predictions[45].mean != b.predictions[45].mean);

  const auto again = wpcm::run_replicate(pi, setup, 17, 3);
  CHECK(again.predictions[100].mean == a.predictions[100].mean);
}

TEST_CASE("measurements") {
  const auto meas = wpcm::position_measurement(2, 100.0);
  std::vector<Vector> truth(6, v4(1, 2, 3, 4));
  auto zero = wpcm::RngStream::zero();
  const auto z = wpcm::synthesize_measurements(truth, meas, 4, zero);
  REQUIRE(z.size() == 4);
  Vector expect(2);
  expect << 1, 3;
  for (const auto& zk : z) CHECK(*zk == expect);
  CHECK(wpcm::position_of(v4(5, 6, 7, 8)) == Eigen::Vector2d(5, 7));
  auto rng = wpcm::RngStream(1);
  CHECK(code_of([&] { wpcm::synthesize_measurements(truth, meas, 6, rng); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("run_case: finite, reproducible, thread-invariant") {
  const auto cases = wpcm::build_airliner_cases();
  const wpcm::ExperimentSetup setup;
  const auto a = wpcm::run_case(find(cases, "ii"), setup, 60, 2024, 1);
  const auto b = wpcm::run_case(find(cases, "ii"), setup, 60, 2024, 1);
  const auto c = wpcm::run_case(find(cases, "ii"), setup, 60, 2024, 7);
  REQUIRE(a.aee.size() == 146);
  CHECK(a.runs == 60);
  CHECK(a.target_times.front() == 5);
  CHECK(a.target_times.back() == 150);
  for (double v : a.aee) CHECK((std::isfinite(v) && v > 0.0));
  CHECK(a.aee == b.aee);
  CHECK(a.aee == c.aee);
  const auto d = wpcm::run_case(find(cases, "ii"), setup, 60, 2025, 1);
  CHECK(a.aee != d.aee);
  CHECK(a.at(50) == a.aee[45]);
  CHECK(code_of([&] { a.at(4); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { wpcm::run_case(find(cases, "ii"), setup, 0, 1, 1); }) == ErrorCode::InvalidParam);
}

TEST_CASE("matched case: a known waypoint beats mid-segment") {
  const auto cases = wpcm::build_airliner_cases();
  const auto s = wpcm::run_case(find(cases, "i"), wpcm::ExperimentSetup{}, 1000, 77, 4);
  CHECK(s.at(50) < s.at(80));
  CHECK(s.horizon_mean() > 0.0);
}

TEST_CASE("simulate_runs") {
  const auto m = wpcm::build_waypoint_model(wpcm::airliner_scenario(), wpcm::build_ncv(15.0, 0.01, 2, 150));
  const auto runs = wpcm::simulate_runs(m, 3, 8);
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].size() == 151);
  auto rng = wpcm::RngStream::for_replicate(8, 1);
  CHECK(wpcm::simulate_waypoint_trajectory(m, rng)[70] == runs[1][70]);
  CHECK(wpcm::simulate_runs(m, 0, 8).empty());
}
