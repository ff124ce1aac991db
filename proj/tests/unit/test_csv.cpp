#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wpcm/csv.hpp"
#include "wpcm/error.hpp"

using wpcm::ErrorCode;
using wpcm::Vector;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string l;
  while (std::getline(is, l)) out.push_back(l);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

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

}  // namespace

TEST_CASE("number formatting") {
  CHECK(wpcm::csv::format_number(1.5) == "1.5");
  CHECK(wpcm::csv::format_number(250000) == "250000");
  CHECK(wpcm::csv::format_number(0.1 + 0.2) == "0.3");
  CHECK(wpcm::csv::format_number(std::nan("")) == "nan");
  CHECK(wpcm::csv::format_number(-INFINITY) == "-inf");
}

TEST_CASE("empty inputs give header-only files") {
  std::ostringstream a, t, e, p, m;
  wpcm::csv::write_aee(a, std::vector<wpcm::AeeSeries>{});
  wpcm::csv::write_trajectories(t, {});
  wpcm::csv::write_estimates(e, std::vector<wpcm::Gaussian>{});
  wpcm::csv::write_predictions(p, std::vector<wpcm::PredictionResult>{}, 4, {});
  wpcm::csv::write_measurements(m, std::vector<std::optional<Vector>>{});
  CHECK(a.str() == "case_id,target_time,aee_m,log10_aee\n");
  CHECK(t.str() == "run,k,x_m,vx_mps,y_m,vy_mps\n");
  CHECK(e.str() == "k,x_m,vx_mps,y_m,vy_mps,var_x,var_vx,var_y,var_vy\n");
  CHECK(p.str() == "target_time,r,regime,x_m,vx_mps,y_m,vy_mps,var_x,var_y,true_x_m,true_y_m,error_m\n");
  CHECK(m.str() == "k,z_x_m,z_y_m\n");
}

TEST_CASE("aee rows") {
  wpcm::AeeSeries s;
  s.case_id = "i";
  s.runs = 2;
  for (int t = 5; t <= 150; ++t) {
    s.target_times.push_back(t);
    s.aee.push_back(10.0 * t);
  }
  std::ostringstream os;
  wpcm::csv::write_aee(os, std::vector<wpcm::AeeSeries>{s});
  const auto ls = lines(os.str());
  REQUIRE(ls.size() == 147);
  CHECK(ls[1] == "i,5,50,1.69897000434");
  const auto last = cells(ls.back());
  CHECK(last[0] == "i");
  CHECK(last[1] == "150");
  CHECK(std::stod(last[3]) == doctest::Approx(std::log10(1500.0)));

  s.aee.pop_back();
  std::ostringstream bad;
  CHECK(code_of([&] { wpcm::csv::write_aee(bad, std::vector<wpcm::AeeSeries>{s}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("trajectory rows") {
  std::vector<std::vector<Vector>> runs{{v4(1, 2, 3, 4), v4(5, 6, 7, 8)}, {v4(9, 10, 11, 12)}};
  std::ostringstream os;
  wpcm::csv::write_trajectories(os, runs);
  const auto ls = lines(os.str());
  REQUIRE(ls.size() == 4);
  CHECK(ls[1] == "0,0,1,2,3,4");
  CHECK(ls[2] == "0,1,5,6,7,8");
  CHECK(ls[3] == "1,0,9,10,11,12");
  std::vector<std::vector<Vector>> wrong{{Vector::Zero(2)}};
  CHECK(code_of([&] { wpcm::csv::write_trajectories(os, wrong); }) == ErrorCode::InvalidParam);
}

TEST_CASE("estimate and prediction rows") {
  wpcm::Matrix c = wpcm::Matrix::Identity(4, 4);
  c(2, 2) = 9;
  std::ostringstream e;
  wpcm::csv::write_estimates(e, std::vector<wpcm::Gaussian>{{v4(1, 2, 3, 4), c}});
  CHECK(lines(e.str())[1] == "0,1,2,3,4,1,1,9,1");

  std::vector<wpcm::PredictionResult> preds{{5, wpcm::Regime::InSegment, v4(1, 2, 3, 4), c},
                                            {9, wpcm::Regime::BeyondKnown, v4(1, 2, 3, 4), c}};
  std::vector<Vector> truth(6, v4(4, 0, 7, 0));
  std::ostringstream p;
  wpcm::csv::write_predictions(p, preds, 4, truth);
  const auto ls = lines(p.str());
  REQUIRE(ls.size() == 3);
  CHECK(ls[1] == "5,1,in_segment,1,2,3,4,1,9,4,7,5");
  CHECK(ls[2] == "9,5,beyond_known,1,2,3,4,1,9,,,");
  CHECK(cells(ls[2]).size() == 12);
}

TEST_CASE("measurement round trip") {
  std::vector<std::optional<Vector>> z(5);
  z[0] = Eigen::Vector2d(1.25, -3.5);
  z[2] = Eigen::Vector2d(1e5 / 3.0, 2.0);
  z[4] = Eigen::Vector2d(0.0, 7.0);
  std::ostringstream os;
  wpcm::csv::write_measurements(os, z);
  std::istringstream is(os.str());
  const auto back = wpcm::csv::read_measurements(is);
  REQUIRE(back.size() == 5);
  CHECK(*back[0] == *z[0]);
  CHECK_FALSE(back[1].has_value());
  CHECK(*back[2] == *z[2]);
  CHECK_FALSE(back[3].has_value());
  CHECK(*back[4] == *z[4]);

  const auto dir = std::filesystem::temp_directory_path() / "wpcm_csv_test";
  std::filesystem::create_directories(dir);
  wpcm::csv::write_measurements(dir / "z.csv", z);
  CHECK(wpcm::csv::read_measurements(dir / "z.csv").size() == 5);
  CHECK(code_of([&] { wpcm::csv::read_measurements(dir / "missing.csv"); }) == ErrorCode::IoError);
  CHECK(code_of([&] { wpcm::csv::write_measurements(dir / "no" / "such" / "z.csv", z); }) == ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("measurement parse errors name the line") {
  auto err = [](const std::string& text) {
    std::istringstream is(text);
    try {
      wpcm::csv::read_measurements(is);
    } catch (const wpcm::Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      return std::string(e.what());
    }
    FAIL("expected a parse error");
    return std::string();
  };
  CHECK(err("k,x,y\n").find("line 1") != std::string::npos);
  CHECK(err("k,z_x_m,z_y_m\n1,2,3\n2,abc,3\n").find("line 3") != std::string::npos);
  CHECK(err("k,z_x_m,z_y_m\n1,2\n").find("line 2") != std::string::npos);
  CHECK(err("k,z_x_m,z_y_m\n2,2,3\n2,2,3\n").find("line 3") != std::string::npos);
  CHECK(err("k,z_x_m,z_y_m\n0,2,3\n").find("line 2") != std::string::npos);

  std::istringstream empty("");
  CHECK(wpcm::csv::read_measurements(empty).empty());
  std::istringstream header_only("k,z_x_m,z_y_m\r\n");
  CHECK(wpcm::csv::read_measurements(header_only).empty());
}
