#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <utility>

#include "pickands/fft.hpp"
#include "pickands/seed.hpp"

namespace pickands {

/// Throws DomainError unless 0 < alpha <= 2.
void validate_alpha(double alpha);

/// Equispaced two-sided lattice t_k = (k - n_steps/2) * eta, k = 0..n_steps,
/// covering [-T, T].
struct GridSpec {
  double alpha = 1.0;
  double hurst = 0.5;
  double T = 1.0;
  double eta = 1.0;
  std::size_t n_steps = 2;

  /// Validates alpha, T > 0, eta > 0, T an integer multiple of eta and
  /// 2T/eta a power of two.
  static GridSpec make(double alpha, double T, double eta);

  std::size_t points() const noexcept { return n_steps + 1; }
  std::size_t zero_index() const noexcept { return n_steps / 2; }
  double time(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(zero_index())) * eta;
  }
  GridSpec with_alpha(double a) const { return make(a, T, eta); }
};

/// Cov(B_s, B_t) = (|s|^a + |t|^a - |t - s|^a) / 2.
double fbm_covariance(double alpha, double s, double t);

/// Unit-step fGn autocovariance ((k+1)^a - 2 k^a + |k-1|^a) / 2.
double fgn_autocov(double alpha, std::size_t k);

/// gamma(0), ..., gamma(n).
Eigen::VectorXd autocovariance_sequence(double alpha, std::size_t n);

/// First row (gamma(0), ..., gamma(n-1), gamma(n), gamma(n-1), ..., gamma(1))
/// of the 2n x 2n circulant embedding.
Eigen::VectorXd embedded_row(double alpha, std::size_t n);

struct CirculantSpectrum {
  double alpha = 1.0;
  std::size_t n_steps = 0;
  /// Eigenvalues of the circulant embedding, length 2 n_steps, after clamping.
  Eigen::VectorXd eigenvalues;
  /// Number of negative eigenvalues set to zero.
  std::size_t clamp_count = 0;
  /// Most negative raw eigenvalue (0 if none).
  double most_negative = 0.0;
  /// Per-frequency amplitude of the synthesis: sqrt(lambda_k / N) for
  /// k in {0, n}, sqrt(lambda_k / (2N)) otherwise, N = 2 n_steps.
  Eigen::VectorXd amplitudes;

  std::size_t size() const noexcept { return 2 * n_steps; }
};

/// Relative tolerance below which negative eigenvalues are treated as
/// round-off: lambda >= -kEigenTolerance * max(lambda).
inline constexpr double kEigenTolerance = 1e-8;
/// Eigenvalues with |lambda| <= kEigenNoiseFloor * max(lambda) are set to zero.
inline constexpr double kEigenNoiseFloor = 1e-12;

/// Spectrum of the circulant embedding for n_steps unit increments.
/// Throws EmbeddingError on an eigenvalue below -kEigenTolerance * max.
CirculantSpectrum circulant_spectrum(double alpha, std::size_t n_steps);

/// Process-wide cache of spectra keyed by (alpha, n) and FFT plans keyed by
/// length. Entries are immutable and handed out as shared_ptr<const>.
class SpectrumCache {
public:
  std::shared_ptr<const CirculantSpectrum> spectrum(double alpha, std::size_t n_steps);
  std::shared_ptr<const FftPlan<double>> plan(std::size_t length);

  static SpectrumCache& global();

private:
  std::shared_mutex mutex_;
  std::map<std::pair<double, std::size_t>, std::shared_ptr<const CirculantSpectrum>> spectra_;
  std::map<std::size_t, std::shared_ptr<const FftPlan<double>>> plans_;
};

/// One exact draw of n_steps unit-step fGn increments (Davies-Harte).
Eigen::VectorXd sample_unit_fgn(const CirculantSpectrum& spectrum, const SeedVector& seeds);

/// Allocation-free variant: `work` must hold 2 n_steps entries and `out`
/// n_steps entries. `plan` must have length 2 n_steps.
void sample_unit_fgn(const CirculantSpectrum& spectrum, const FftPlan<double>& plan,
                     std::span<const double> normals, std::span<std::complex<double>> work,
                     std::span<double> out);

/// Two-sided fBm on a GridSpec lattice, anchored so that B_0 = 0.
struct FbmPath {
  GridSpec grid;
  Eigen::VectorXd values;

  std::size_t zero_index() const noexcept { return grid.zero_index(); }
};

/// values[k] = eta^(alpha/2) * (S_k - S_{n/2}) with S_k the k-th partial sum
/// of the unit increments (S_0 = 0).
FbmPath build_two_sided_fbm(std::span<const double> increments, const GridSpec& grid);

/// Writes the path into `values` (length n_steps + 1).
void build_two_sided_fbm(std::span<const double> increments, const GridSpec& grid,
                         std::span<double> values);

/// Dense-factorization sampler of (B_{t_1}, ..., B_{t_m}). Independent of the
/// circulant route; meant as a test oracle and for small lattices.
class FbmCholeskyOracle {
public:
  FbmCholeskyOracle(double alpha, std::span<const double> times);

  std::size_t size() const noexcept { return static_cast<std::size_t>(covariance_.rows()); }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }

  /// Maps m i.i.d. N(0,1) variates to one draw.
  Eigen::VectorXd sample(std::span<const double> normals) const;

private:
  Eigen::MatrixXd covariance_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::VectorXd sqrt_d_;
};

Eigen::VectorXd cholesky_oracle_sample(double alpha, std::span<const double> times,
                                       std::span<const double> normals);

}  // namespace pickands
