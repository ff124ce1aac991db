#include "wpcm/rng.hpp"

namespace wpcm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

RngStream::RngStream(std::uint64_t seed) : engine_(seed) {}

RngStream RngStream::for_replicate(std::uint64_t master_seed, std::uint64_t replicate) {
  return RngStream(mix_seed(master_seed, replicate));
}

RngStream RngStream::zero() {
  RngStream s;
  s.zero_ = true;
  return s;
}

double RngStream::standard_normal() {
  if (zero_) return 0.0;
  return normal_(engine_);
}

Eigen::VectorXd RngStream::standard_normal(Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = standard_normal();
  return z;
}

}  // namespace wpcm
