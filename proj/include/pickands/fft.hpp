#pragma once

#include <Eigen/Core>

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pickands/errors.hpp"

namespace pickands {

inline bool is_power_of_two(std::size_t n) noexcept { return std::has_single_bit(n); }

/// Radix-2 decimation-in-time FFT plan. Immutable after construction, so a
/// single plan is safe to share between threads.
///
/// Conventions: forward is sum_k x_k exp(-2 pi i jk/n) with no scaling;
/// inverse uses exp(+2 pi i jk/n) and scales by 1/n.
template <typename Scalar>
class FftPlan {
public:
  using Complex = std::complex<Scalar>;

  explicit FftPlan(std::size_t n) : n_(n) {
    if (n == 0 || !is_power_of_two(n)) {
      throw ArgumentError("FFT length must be a power of two, got " + std::to_string(n));
    }
    const int bits = std::countr_zero(n);
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = static_cast<std::uint32_t>(r);
    }
    // Each twiddle is evaluated directly rather than by recurrence.
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const Scalar angle = -2 * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(n);
      twiddle_[k] = Complex(std::cos(angle), std::sin(angle));
    }
  }

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<Complex> data) const { transform(data, false); }

  void inverse(std::span<Complex> data) const {
    transform(data, true);
    const Scalar scale = Scalar(1) / Scalar(n_);
    for (auto& v : data) v *= scale;
  }

  /// Unscaled transform with the +i sign (inverse without the 1/n factor).
  void backward_unscaled(std::span<Complex> data) const { transform(data, true); }

private:
  void transform(std::span<Complex> data, bool conjugate) const {
    if (data.size() != n_) {
      throw ArgumentError("FFT input length " + std::to_string(data.size()) +
                          " does not match plan length " + std::to_string(n_));
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j = bitrev_[i];
      if (i < j) std::swap(data[i], data[j]);
    }
    // Butterflies on raw (re, im) pairs; std::complex multiplication goes
    // through the Annex G NaN checks, which dominate the runtime otherwise.
    Scalar* a = reinterpret_cast<Scalar*>(data.data());
    const Scalar sign = conjugate ? Scalar(-1) : Scalar(1);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const Complex w = twiddle_[k * stride];
          const Scalar wr = w.real();
          const Scalar wi = sign * w.imag();
          Scalar* u = a + 2 * (start + k);
          Scalar* v = a + 2 * (start + k + half);
          const Scalar tr = v[0] * wr - v[1] * wi;
          const Scalar ti = v[0] * wi + v[1] * wr;
          v[0] = u[0] - tr;
          v[1] = u[1] - ti;
          u[0] += tr;
          u[1] += ti;
        }
      }
    }
  }

  std::size_t n_;
  std::vector<std::uint32_t> bitrev_;
  std::vector<Complex> twiddle_;
};

/// Discrete Fourier transform of a power-of-two length sequence.
/// Forward is unscaled; `inverse == true` applies the 1/n factor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> dft(
    const Eigen::MatrixBase<Derived>& input, bool inverse) {
  using Complex = typename Derived::Scalar;
  using Real = typename Complex::value_type;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> out = input;
  const FftPlan<Real> plan(static_cast<std::size_t>(out.size()));
  std::span<Complex> view(out.data(), static_cast<std::size_t>(out.size()));
  if (inverse) {
    plan.inverse(view);
  } else {
    plan.forward(view);
  }
  return out;
}

}  // namespace pickands
