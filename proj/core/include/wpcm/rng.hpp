#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace wpcm {

/// Source of standard-normal draws. Replicate streams are keyed by
/// (master_seed, replicate_index) so results never depend on scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  static RngStream for_replicate(std::uint64_t master_seed, std::uint64_t replicate);

  /// A stream whose every draw is exactly zero. Simulating with it yields the
  /// noise-free skeleton of a model.
  static RngStream zero();

  double standard_normal();
  Eigen::VectorXd standard_normal(Eigen::Index n);

  bool is_zero() const noexcept { return zero_; }

 private:
  RngStream() = default;

  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  bool zero_ = false;
};

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t stream) noexcept;

}  // namespace wpcm
