#include "wpcm_cli/config.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wpcm/error.hpp"

namespace wpcm::cli {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Character iterator that counts newlines as the parser consumes input.
class LineCountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  LineCountingIterator(const char* p, int* line) : p_(p), line_(line) {}
  reference operator*() const { return *p_; }
  LineCountingIterator& operator++() {
    if (*p_ == '\n') ++*line_;
    ++p_;
    return *this;
  }
  LineCountingIterator operator++(int) {
    auto old = *this;
    ++*this;
    return old;
  }
  bool operator==(const LineCountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const LineCountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_;
  int* line_;
};

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// DOM builder that also remembers the source line of every value, keyed by
// JSON pointer.
class LocatingSax {
 public:
  LocatingSax(json& root, const int* line, std::map<std::string, int>& lines)
      : dom_(root, true), line_(line), lines_(lines) {}

  bool null() { return value(), dom_.null(); }
  bool boolean(bool v) { return value(), dom_.boolean(v); }
  bool number_integer(json::number_integer_t v) { return value(), dom_.number_integer(v); }
  bool number_unsigned(json::number_unsigned_t v) { return value(), dom_.number_unsigned(v); }
  bool number_float(json::number_float_t v, const json::string_t& s) { return value(), dom_.number_float(v, s); }
  bool string(json::string_t& v) { return value(), dom_.string(v); }
  bool binary(json::binary_t& v) { return value(), dom_.binary(v); }
  bool start_object(std::size_t n) {
    frames_.push_back({false, 0, {}, value()});
    return dom_.start_object(n);
  }
  bool key(json::string_t& k) {
    frames_.back().key = k;
    lines_.try_emplace(frames_.back().pointer + "/" + escape_token(k), *line_);
    return dom_.key(k);
  }
  bool end_object() {
    frames_.pop_back();
    return dom_.end_object();
  }
  bool start_array(std::size_t n) {
    frames_.push_back({true, 0, {}, value()});
    return dom_.start_array(n);
  }
  bool end_array() {
    frames_.pop_back();
    return dom_.end_array();
  }
  bool parse_error(std::size_t pos, const std::string& tok, const nlohmann::detail::exception& ex) {
    return dom_.parse_error(pos, tok, ex);
  }

 private:
  struct Frame {
    bool array;
    std::size_t index;
    std::string key;
    std::string pointer;
  };

  // Pointer of the value being started; records its line.
  std::string value() {
    std::string ptr;
    if (!frames_.empty()) {
      auto& f = frames_.back();
      ptr = f.pointer + "/" + (f.array ? std::to_string(f.index++) : escape_token(f.key));
    }
    lines_.try_emplace(ptr, *line_);
    return ptr;
  }

  nlohmann::detail::json_sax_dom_parser<json> dom_;
  const int* line_;
  std::map<std::string, int>& lines_;
  std::vector<Frame> frames_;
};

class Reader {
 public:
  Reader(std::string_view text, std::string source) : source_(std::move(source)) {
    int line = 1;
    LocatingSax sax(root_, &line, lines_);
    try {
      json::sax_parse(LineCountingIterator(text.data(), &line), LineCountingIterator(text.data() + text.size(), &line),
                      &sax);
    } catch (const json::exception& e) {
      // message carries "at line L, column C"
      fail_at(line, std::string("invalid JSON: ") + e.what());
    }
    if (!root_.is_object()) fail("", "top level must be an object");
  }

  const json& root() const { return root_; }

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    fail_at(line_of(ptr), (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
  }

  [[noreturn]] void fail_at(int line, const std::string& msg, ErrorCode code = ErrorCode::ConfigError) const {
    const std::string where = source_.empty() ? "" : source_ + ": ";
    throw Error(code, where + "line " + std::to_string(line) + ": " + msg);
  }

  // Re-anchors a library error at `ptr`, keeping its code.
  [[noreturn]] void rethrow(const std::string& ptr, const Error& e) const {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
    fail_at(line_of(ptr), ptr + ": " + msg, e.code() == ErrorCode::NotSpd ? ErrorCode::NotSpd : ErrorCode::ConfigError);
  }

  int line_of(std::string ptr) const {
    while (true) {
      const auto it = lines_.find(ptr);
      if (it != lines_.end()) return it->second;
      if (ptr.empty()) return 1;
      ptr.resize(ptr.rfind('/'));
    }
  }

  void only_keys(const json& obj, const std::string& ptr, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.contains(k)) fail(ptr + "/" + escape_token(k), "unknown key '" + k + "'");
    }
  }

  double number(const json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
  }

  long long integer(const json& j, const std::string& ptr) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<long long>();
  }

  std::uint64_t unsigned_integer(const json& j, const std::string& ptr) const {
    if (!j.is_number_unsigned()) fail(ptr, "expected a non-negative integer");
    return j.get<std::uint64_t>();
  }

  const json& array(const json& j, const std::string& ptr) const {
    if (!j.is_array()) fail(ptr, "expected an array");
    return j;
  }

  Vector vector(const json& j, const std::string& ptr) const {
    array(j, ptr);
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = number(j[i], ptr + "/" + std::to_string(i));
    return v;
  }

  Matrix matrix(const json& j, const std::string& ptr, Index dim) const {
    if (!j.is_object() || j.size() != 1) fail(ptr, "matrix must be one of {diag}, {blocks2x2}, {rows}");
    const auto& [kind, body] = *j.items().begin();
    const std::string bp = ptr + "/" + kind;
    Matrix m = Matrix::Zero(dim, dim);
    if (kind == "diag") {
      const Vector d = vector(body, bp);
      if (d.size() != dim) fail(bp, "expected " + std::to_string(dim) + " diagonal entries");
      m.diagonal() = d;
    } else if (kind == "blocks2x2") {
      array(body, bp);
      if (static_cast<Index>(body.size()) * 2 != dim) {
        fail(bp, "expected " + std::to_string(dim / 2) + " 2x2 blocks for dimension " + std::to_string(dim));
      }
      for (std::size_t b = 0; b < body.size(); ++b) {
        const Matrix blk = rows(body[b], bp + "/" + std::to_string(b), 2);
        m.block(2 * static_cast<Index>(b), 2 * static_cast<Index>(b), 2, 2) = blk;
      }
    } else if (kind == "rows") {
      m = rows(body, bp, dim);
    } else {
      fail(bp, "unknown matrix form '" + kind + "'");
    }
    return m;
  }

  Matrix rows(const json& j, const std::string& ptr, Index dim) const {
    array(j, ptr);
    if (static_cast<Index>(j.size()) != dim) fail(ptr, "expected " + std::to_string(dim) + " rows");
    Matrix m(dim, dim);
    for (std::size_t r = 0; r < j.size(); ++r) {
      const std::string rp = ptr + "/" + std::to_string(r);
      const Vector row = vector(j[r], rp);
      if (row.size() != dim) fail(rp, "expected " + std::to_string(dim) + " columns");
      m.row(static_cast<Index>(r)) = row;
    }
    return m;
  }

 private:
  std::string source_;
  json root_;
  std::map<std::string, int> lines_;
};

int checked_int(const Reader& r, const json& j, const std::string& ptr) {
  const long long v = r.integer(j, ptr);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) r.fail(ptr, "out of range");
  return static_cast<int>(v);
}

void read_scenario(const Reader& r, const json& s, RunConfig& c) {
  const std::string p = "/scenario";
  r.only_keys(s, p, {"times", "step_seconds", "noise_intensity", "means", "covs", "cross"});
  auto& sc = c.scenario;
  if (s.contains("times")) {
    sc.times.clear();
    const auto& t = r.array(s["times"], p + "/times");
    for (std::size_t i = 0; i < t.size(); ++i) sc.times.push_back(checked_int(r, t[i], p + "/times/" + std::to_string(i)));
  }
  if (s.contains("step_seconds")) sc.step_seconds = r.number(s["step_seconds"], p + "/step_seconds");
  if (s.contains("noise_intensity")) c.noise_intensity = r.number(s["noise_intensity"], p + "/noise_intensity");
  if (s.contains("means")) {
    sc.means.clear();
    const auto& m = r.array(s["means"], p + "/means");
    for (std::size_t i = 0; i < m.size(); ++i) sc.means.push_back(r.vector(m[i], p + "/means/" + std::to_string(i)));
  }
  const std::size_t count = sc.times.size();
  if (sc.means.size() != count) r.fail(p + "/means", "expected one mean per waypoint time (" + std::to_string(count) + ")");
  const Index d = sc.means.empty() ? 0 : sc.means.front().size();
  if (d != 4) r.fail(p + "/means", "states must be (x, vx, y, vy)");
  for (std::size_t i = 0; i < sc.means.size(); ++i) {
    if (sc.means[i].size() != d) r.fail(p + "/means/" + std::to_string(i), "inconsistent state dimension");
  }
  if (s.contains("covs")) {
    sc.covs.clear();
    const auto& m = r.array(s["covs"], p + "/covs");
    for (std::size_t i = 0; i < m.size(); ++i) sc.covs.push_back(r.matrix(m[i], p + "/covs/" + std::to_string(i), d));
  }
  if (sc.covs.size() != count) r.fail(p + "/covs", "expected one covariance per waypoint");
  if (s.contains("cross")) {
    sc.cross.clear();
    const auto& m = r.array(s["cross"], p + "/cross");
    for (std::size_t i = 0; i < m.size(); ++i) sc.cross.push_back(r.matrix(m[i], p + "/cross/" + std::to_string(i), d));
  }
  if (sc.cross.size() + 1 != count) r.fail(p + "/cross", "expected one cross-covariance per consecutive waypoint pair");
  try {
    validate(sc);
  } catch (const Error& e) {
    r.rethrow(p, e);
  }
  if (!(sc.step_seconds > 0.0)) r.fail(p + "/step_seconds", "must be positive");
  if (!(c.noise_intensity > 0.0)) r.fail(p + "/noise_intensity", "must be positive");
}

void read_measurement(const Reader& r, const json& m, RunConfig& c) {
  const std::string p = "/measurement";
  r.only_keys(m, p, {"observe", "variance"});
  if (m.contains("observe")) {
    c.observe.clear();
    const auto& o = r.array(m["observe"], p + "/observe");
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string ip = p + "/observe/" + std::to_string(i);
      const int idx = checked_int(r, o[i], ip);
      if (idx < 0 || idx >= 4) r.fail(ip, "state index must be in [0, 3]");
      c.observe.push_back(idx);
    }
  }
  if (m.contains("variance")) {
    c.variance.clear();
    const auto& v = r.array(m["variance"], p + "/variance");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string ip = p + "/variance/" + std::to_string(i);
      const double x = r.number(v[i], ip);
      if (!(x > 0.0)) r.fail(ip, "variance must be positive");
      c.variance.push_back(x);
    }
  }
  if (c.observe.size() != c.variance.size() || c.observe.empty()) {
    r.fail(p, "observe and variance must be non-empty and of equal length");
  }
}

void read_experiment(const Reader& r, const json& e, RunConfig& c) {
  const std::string p = "/experiment";
  r.only_keys(e, p, {"cases", "runs", "master_seed", "measured_through", "last_known_waypoint", "first_target",
                     "last_target", "threads"});
  if (e.contains("cases")) {
    c.cases.clear();
    const auto& cs = r.array(e["cases"], p + "/cases");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (!cs[i].is_string()) r.fail(p + "/cases/" + std::to_string(i), "expected a case id string");
      c.cases.push_back(cs[i].get<std::string>());
    }
  }
  if (e.contains("runs")) c.runs = checked_int(r, e["runs"], p + "/runs");
  if (e.contains("master_seed")) c.master_seed = r.unsigned_integer(e["master_seed"], p + "/master_seed");
  if (e.contains("measured_through")) c.measured_through = checked_int(r, e["measured_through"], p + "/measured_through");
  if (e.contains("last_known_waypoint")) {
    c.last_known_waypoint = checked_int(r, e["last_known_waypoint"], p + "/last_known_waypoint");
  }
  if (e.contains("first_target")) c.first_target = checked_int(r, e["first_target"], p + "/first_target");
  if (e.contains("last_target")) c.last_target = checked_int(r, e["last_target"], p + "/last_target");
  if (e.contains("threads")) c.threads = checked_int(r, e["threads"], p + "/threads");
  if (c.runs < 0) r.fail(p + "/runs", "must be >= 0");
  if (c.threads < 0) r.fail(p + "/threads", "must be >= 0");
  if (c.last_known_waypoint < 1 || c.last_known_waypoint > c.scenario.last_index()) {
    r.fail(p + "/last_known_waypoint", "must name a waypoint after the first");
  }
  if (c.measured_through < 0 || c.measured_through >= c.scenario.times[1]) {
    r.fail(p + "/measured_through", "must lie before the second waypoint");
  }
  if (c.first_target < c.measured_through || c.last_target < c.first_target ||
      c.last_target > c.scenario.horizon()) {
    r.fail(p + "/last_target", "targets must satisfy measured_through <= first_target <= last_target <= horizon");
  }
}

ordered_json matrix_json(const Matrix& m) {
  const Index d = m.rows();
  ordered_json out = ordered_json::object();
  if (Matrix(m.diagonal().asDiagonal()) == m) {
    const Vector diag = m.diagonal();
    out["diag"] = std::vector<double>(diag.data(), diag.data() + d);
    return out;
  }
  bool blocky = d % 2 == 0;
  for (Index i = 0; i < d && blocky; ++i)
    for (Index j = 0; j < d; ++j)
      if (i / 2 != j / 2 && m(i, j) != 0.0) blocky = false;
  auto row_list = [](const Matrix& a) {
    ordered_json rows = ordered_json::array();
    for (Index i = 0; i < a.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  if (blocky) {
    ordered_json blocks = ordered_json::array();
    for (Index b = 0; b < d / 2; ++b) blocks.push_back(row_list(m.block(2 * b, 2 * b, 2, 2)));
    out["blocks2x2"] = blocks;
  } else {
    out["rows"] = row_list(m);
  }
  return out;
}

}  // namespace

MeasurementModel RunConfig::measurement() const {
  const Index rows = static_cast<Index>(observe.size());
  MeasurementModel m{Matrix::Zero(rows, scenario.state_dim()), Matrix::Zero(rows, rows)};
  for (Index i = 0; i < rows; ++i) {
    m.observation(i, observe[static_cast<std::size_t>(i)]) = 1.0;
    m.noise_cov(i, i) = variance[static_cast<std::size_t>(i)];
  }
  return m;
}

ExperimentSetup RunConfig::setup() const {
  ExperimentSetup s;
  s.noise_intensity = noise_intensity;
  s.measurement = measurement();
  s.measured_through = measured_through;
  s.first_target = first_target;
  s.last_target = last_target;
  s.last_known_waypoint = last_known_waypoint;
  return s;
}

RunConfig default_config() {
  RunConfig c;
  c.scenario = airliner_scenario();
  c.observe = {0, 2};
  c.variance = {100.0, 100.0};
  c.cases = {"i", "ii", "iii", "iv", "v", "vi", "vii"};
  return c;
}

static RunConfig parse_named(std::string_view text, const std::string& source) {
  const Reader r(text, source);
  const auto& root = r.root();
  r.only_keys(root, "", {"scenario", "measurement", "experiment", "output"});
  RunConfig c = default_config();
  read_scenario(r, root.contains("scenario") ? root["scenario"] : json::object(), c);
  read_measurement(r, root.contains("measurement") ? root["measurement"] : json::object(), c);
  read_experiment(r, root.contains("experiment") ? root["experiment"] : json::object(), c);
  if (root.contains("output")) {
    const auto& o = root["output"];
    r.only_keys(o, "/output", {"dir"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) r.fail("/output/dir", "expected a path string");
      c.out_dir = o["dir"].get<std::string>();
    }
  }
  return c;
}

RunConfig parse_config(std::string_view text) { return parse_named(text, ""); }

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_named(buf.str(), path.string());
}

std::string dump_config(const RunConfig& c) {
  ordered_json j;
  auto& s = j["scenario"];
  s["times"] = c.scenario.times;
  s["step_seconds"] = c.scenario.step_seconds;
  s["noise_intensity"] = c.noise_intensity;
  s["means"] = ordered_json::array();
  for (const auto& m : c.scenario.means) s["means"].push_back(std::vector<double>(m.data(), m.data() + m.size()));
  s["covs"] = ordered_json::array();
  for (const auto& m : c.scenario.covs) s["covs"].push_back(matrix_json(m));
  s["cross"] = ordered_json::array();
  for (const auto& m : c.scenario.cross) s["cross"].push_back(matrix_json(m));
  j["measurement"]["observe"] = c.observe;
  j["measurement"]["variance"] = c.variance;
  auto& e = j["experiment"];
  e["cases"] = c.cases;
  e["runs"] = c.runs;
  e["master_seed"] = c.master_seed;
  e["measured_through"] = c.measured_through;
  e["last_known_waypoint"] = c.last_known_waypoint;
  e["first_target"] = c.first_target;
  e["last_target"] = c.last_target;
  e["threads"] = c.threads;
  j["output"]["dir"] = c.out_dir.string();
  return j.dump(2) + "\n";
}

}  // namespace wpcm::cli
