#include "wpcm/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wpcm/error.hpp"

namespace wpcm::csv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

void require_state4(const Vector& x) {
  if (x.size() != 4) throw Error(ErrorCode::InvalidParam, "CSV export expects (x, vx, y, vy) states");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  }
}

// Shortest text that parses back to the same double; measurements are inputs
// and must replay exactly.
std::string exact_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_aee(std::ostream& os, std::span<const AeeSeries> series) {
  os << "case_id,target_time,aee_m,log10_aee\n";
  for (const auto& s : series) {
    if (s.target_times.size() != s.aee.size()) {
      throw Error(ErrorCode::LengthMismatch, "AEE series '" + s.case_id + "' is inconsistent");
    }
    for (std::size_t i = 0; i < s.aee.size(); ++i) {
      os << s.case_id << ',' << s.target_times[i] << ',' << format_number(s.aee[i]) << ','
         << format_number(std::log10(s.aee[i])) << '\n';
    }
  }
}

void write_aee(const std::filesystem::path& path, std::span<const AeeSeries> series) {
  auto os = open_out(path);
  write_aee(os, series);
  finish(os, path);
}

void write_trajectories(std::ostream& os, const std::vector<std::vector<Vector>>& runs) {
  os << "run,k,x_m,vx_mps,y_m,vy_mps\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t k = 0; k < runs[r].size(); ++k) {
      const auto& x = runs[r][k];
      require_state4(x);
      os << r << ',' << k << ',' << format_number(x[0]) << ',' << format_number(x[1]) << ',' << format_number(x[2])
         << ',' << format_number(x[3]) << '\n';
    }
  }
}

void write_trajectories(const std::filesystem::path& path, const std::vector<std::vector<Vector>>& runs) {
  auto os = open_out(path);
  write_trajectories(os, runs);
  finish(os, path);
}

void write_estimates(std::ostream& os, std::span<const Gaussian> estimates) {
  os << "k,x_m,vx_mps,y_m,vy_mps,var_x,var_vx,var_y,var_vy\n";
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const auto& g = estimates[k];
    require_state4(g.mean);
    os << k;
    for (Index i = 0; i < 4; ++i) os << ',' << format_number(g.mean[i]);
    for (Index i = 0; i < 4; ++i) os << ',' << format_number(g.cov(i, i));
    os << '\n';
  }
}

void write_estimates(const std::filesystem::path& path, std::span<const Gaussian> estimates) {
  auto os = open_out(path);
  write_estimates(os, estimates);
  finish(os, path);
}

void write_predictions(std::ostream& os, std::span<const PredictionResult> predictions, int from_time,
                       std::span<const Vector> truth) {
  os << "target_time,r,regime,x_m,vx_mps,y_m,vy_mps,var_x,var_y,true_x_m,true_y_m,error_m\n";
  for (const auto& p : predictions) {
    require_state4(p.mean);
    os << p.target << ',' << (p.target - from_time) << ',' << to_string(p.regime);
    for (Index i = 0; i < 4; ++i) os << ',' << format_number(p.mean[i]);
    os << ',' << format_number(p.cov(0, 0)) << ',' << format_number(p.cov(2, 2));
    if (p.target >= 0 && static_cast<std::size_t>(p.target) < truth.size()) {
      const auto& x = truth[static_cast<std::size_t>(p.target)];
      const double err = std::hypot(x[0] - p.mean[0], x[2] - p.mean[2]);
      os << ',' << format_number(x[0]) << ',' << format_number(x[2]) << ',' << format_number(err);
    } else {
      os << ",,,";
    }
    os << '\n';
  }
}

void write_predictions(const std::filesystem::path& path, std::span<const PredictionResult> predictions,
                       int from_time, std::span<const Vector> truth) {
  auto os = open_out(path);
  write_predictions(os, predictions, from_time, truth);
  finish(os, path);
}

void write_measurements(std::ostream& os, std::span<const std::optional<Vector>> z) {
  os << "k,z_x_m,z_y_m\n";
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!z[i]) continue;
    if (z[i]->size() != 2) throw Error(ErrorCode::InvalidParam, "measurement CSV expects 2-d position measurements");
    os << (i + 1) << ',' << exact_number((*z[i])[0]) << ',' << exact_number((*z[i])[1]) << '\n';
  }
}

void write_measurements(const std::filesystem::path& path, std::span<const std::optional<Vector>> z) {
  auto os = open_out(path);
  write_measurements(os, z);
  finish(os, path);
}

std::vector<std::optional<Vector>> read_measurements(std::istream& is) {
  std::vector<std::optional<Vector>> out;
  std::string line;
  int line_no = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "k,z_x_m,z_y_m") {
        throw Error(ErrorCode::ConfigError, "line 1: expected header 'k,z_x_m,z_y_m'");
      }
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 3) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected 3 columns");
    }
    const double kd = parse_number(cells[0], line_no);
    const int k = static_cast<int>(kd);
    if (kd != k || k < 1) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": time must be an integer >= 1");
    }
    if (static_cast<std::size_t>(k) <= out.size()) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": times must strictly increase");
    }
    out.resize(static_cast<std::size_t>(k));
    Vector z(2);
    z << parse_number(cells[1], line_no), parse_number(cells[2], line_no);
    out.back() = std::move(z);
  }
  return out;
}

std::vector<std::optional<Vector>> read_measurements(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return read_measurements(is);
}

}  // namespace wpcm::csv
