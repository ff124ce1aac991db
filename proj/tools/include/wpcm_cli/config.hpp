#pragma once

// Run configuration for the wpcm command line: a JSON document with the
// sections "scenario", "measurement", "experiment" and "output". Every key is
// optional and falls back to the defaults of the airliner experiment.
//
// Matrices are objects with exactly one of
//   {"diag": [d1, ..., dn]}
//   {"blocks2x2": [[[a, b], [c, d]], ...]}   block diagonal, one block per axis
//   {"rows": [[...], ...]}

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wpcm/experiment.hpp"
#include "wpcm/filter.hpp"
#include "wpcm/waypoint.hpp"

namespace wpcm::cli {

struct RunConfig {
  WaypointScenario scenario;
  double noise_intensity = 0.01;
  std::vector<int> observe;        // state indices picked out by H
  std::vector<double> variance;    // diagonal of R
  std::vector<std::string> cases;
  int runs = 1000;
  std::uint64_t master_seed = 1;
  int measured_through = 4;
  int last_known_waypoint = 2;
  int first_target = 5;
  int last_target = 150;
  int threads = 0;                 // 0 = hardware concurrency
  std::filesystem::path out_dir = ".";

  MeasurementModel measurement() const;
  ExperimentSetup setup() const;
};

RunConfig default_config();

/// Parses a JSON config. Errors are Error(ConfigError) whose message starts
/// with "line N:".
RunConfig parse_config(std::string_view text);

/// Reads and parses a config file; IoError if it cannot be opened.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON rendering; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& config);

}  // namespace wpcm::cli
