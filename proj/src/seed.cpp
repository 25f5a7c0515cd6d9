#include "pickands/seed.hpp"

#include <cmath>
#include <numbers>

namespace pickands {

namespace {

constexpr std::uint64_t kCounterStep = 0x9E3779B97F4A7C15ull;

inline double open_unit(std::uint64_t key, std::uint64_t counter) noexcept {
  const std::uint64_t bits = mix64(key + counter * kCounterStep) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

void fill_gaussian_stream(std::uint64_t key, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t p = 0; 2 * p < n; ++p) {
    const double u1 = open_unit(key, 2 * p);
    const double u2 = open_unit(key, 2 * p + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[2 * p] = r * std::cos(theta);
    if (2 * p + 1 < n) out[2 * p + 1] = r * std::sin(theta);
  }
}

SeedVector make_seed_vector(std::uint64_t master_seed, std::uint64_t rep_index, std::size_t length) {
  SeedVector seeds;
  seeds.master_seed = master_seed;
  seeds.rep_index = rep_index;
  seeds.normals.resize(static_cast<Eigen::Index>(length));
  fill_gaussian_stream(stream_key(master_seed, rep_index),
                       std::span<double>(seeds.normals.data(), length));
  return seeds;
}

}  // namespace pickands
