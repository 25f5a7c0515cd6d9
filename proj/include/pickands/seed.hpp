#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>

namespace pickands {

/// SplitMix64 finalizer: a bijective 64-bit avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Key of the Gaussian stream for one replication:
///   key = mix64(mix64(master_seed) ^ mix64(rep_index ^ 0xD1B54A32D192ED03)).
/// The key depends only on (master_seed, rep_index), never on alpha, grid
/// or worker assignment.
constexpr std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t rep_index) noexcept {
  return mix64(mix64(master_seed) ^ mix64(rep_index ^ 0xD1B54A32D192ED03ull));
}

/// Derive a sub-seed for an independent experiment (e.g. one eta column run
/// without common random numbers).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t salt) noexcept {
  return mix64(master_seed ^ mix64(salt + 0xA0761D6478BD642Full));
}

/// Counter-based standard normal stream. Variate pair p is obtained from
/// uniforms u1 = U(key, 2p) and u2 = U(key, 2p+1), where
/// U(key, c) = ((mix64(key + c * 0x9E3779B97F4A7C15) >> 11) + 0.5) * 2^-53
/// lies in (0, 1), by Box-Muller: (r cos 2 pi u2, r sin 2 pi u2),
/// r = sqrt(-2 log u1). Entry i of the output is therefore a fixed function
/// of (key, i).
void fill_gaussian_stream(std::uint64_t key, std::span<double> out);

/// The i.i.d. N(0,1) variates that drive one circulant synthesis.
struct SeedVector {
  Eigen::VectorXd normals;
  std::uint64_t rep_index = 0;
  std::uint64_t master_seed = 0;
};

SeedVector make_seed_vector(std::uint64_t master_seed, std::uint64_t rep_index, std::size_t length);

}  // namespace pickands
