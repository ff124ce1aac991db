#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpcm/experiment.hpp"
#include "wpcm/gaussian.hpp"
#include "wpcm/predictor.hpp"

namespace wpcm::csv {

/// Shortest fixed-precision rendering used in every export ("%.12g").
std::string format_number(double v);

// aee.csv: case_id,target_time,aee_m,log10_aee
void write_aee(std::ostream& os, std::span<const AeeSeries> series);
void write_aee(const std::filesystem::path& path, std::span<const AeeSeries> series);

// trajectories.csv: run,k,x_m,vx_mps,y_m,vy_mps
void write_trajectories(std::ostream& os, const std::vector<std::vector<Vector>>& runs);
void write_trajectories(const std::filesystem::path& path, const std::vector<std::vector<Vector>>& runs);

// estimates.csv: k,x_m,vx_mps,y_m,vy_mps,var_x,var_vx,var_y,var_vy
void write_estimates(std::ostream& os, std::span<const Gaussian> estimates);
void write_estimates(const std::filesystem::path& path, std::span<const Gaussian> estimates);

// predictions.csv: target_time,r,regime,x_m,vx_mps,y_m,vy_mps,var_x,var_y,true_x_m,true_y_m,error_m
// `truth` may be empty, in which case the truth columns are left blank.
void write_predictions(std::ostream& os, std::span<const PredictionResult> predictions, int from_time,
                       std::span<const Vector> truth);
void write_predictions(const std::filesystem::path& path, std::span<const PredictionResult> predictions,
                       int from_time, std::span<const Vector> truth);

// measurements.csv: k,z_x_m,z_y_m. Rows may skip times; skipped entries are empty.
// Values are written in shortest round-trip form, so a read returns them exactly.
// An empty input (no header, no rows) reads as no measurements.
void write_measurements(std::ostream& os, std::span<const std::optional<Vector>> z);
void write_measurements(const std::filesystem::path& path, std::span<const std::optional<Vector>> z);
std::vector<std::optional<Vector>> read_measurements(std::istream& is);
std::vector<std::optional<Vector>> read_measurements(const std::filesystem::path& path);

}  // namespace wpcm::csv
