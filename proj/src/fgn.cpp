#include "pickands/fgn.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>
#include <string>

#include "pickands/errors.hpp"

namespace pickands {

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (0, 2], got " << alpha;
    throw DomainError(msg.str());
  }
}

GridSpec GridSpec::make(double alpha, double T, double eta) {
  validate_alpha(alpha);
  if (!(T > 0.0) || !std::isfinite(T)) throw ArgumentError("horizon T must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("mesh eta must be positive");
  const double ratio = T / eta;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "T = " << T << " is not an integer multiple of eta = " << eta;
    throw ArgumentError(msg.str());
  }
  const auto steps = static_cast<std::size_t>(2.0 * rounded);
  if (!is_power_of_two(steps)) {
    std::ostringstream msg;
    msg << "2T/eta = " << steps << " must be a power of two";
    throw ArgumentError(msg.str());
  }
  GridSpec grid;
  grid.alpha = alpha;
  grid.hurst = alpha / 2.0;
  grid.T = T;
  grid.eta = eta;
  grid.n_steps = steps;
  return grid;
}

double fbm_covariance(double alpha, double s, double t) {
  return 0.5 * (std::pow(std::abs(s), alpha) + std::pow(std::abs(t), alpha) -
                std::pow(std::abs(t - s), alpha));
}

double fgn_autocov(double alpha, std::size_t k) {
  validate_alpha(alpha);
  if (k == 0) return 1.0;
  const double x = static_cast<double>(k);
  return 0.5 * (std::pow(x + 1.0, alpha) - 2.0 * std::pow(x, alpha) + std::pow(x - 1.0, alpha));
}

Eigen::VectorXd autocovariance_sequence(double alpha, std::size_t n) {
  Eigen::VectorXd gamma(static_cast<Eigen::Index>(n + 1));
  for (std::size_t k = 0; k <= n; ++k) gamma[static_cast<Eigen::Index>(k)] = fgn_autocov(alpha, k);
  return gamma;
}

Eigen::VectorXd embedded_row(double alpha, std::size_t n) {
  const Eigen::VectorXd gamma = autocovariance_sequence(alpha, n);
  const auto N = static_cast<Eigen::Index>(2 * n);
  Eigen::VectorXd row(N);
  for (Eigen::Index k = 0; k <= static_cast<Eigen::Index>(n); ++k) row[k] = gamma[k];
  for (Eigen::Index k = static_cast<Eigen::Index>(n) + 1; k < N; ++k) row[k] = gamma[N - k];
  return row;
}

CirculantSpectrum circulant_spectrum(double alpha, std::size_t n_steps) {
  validate_alpha(alpha);
  if (n_steps == 0 || !is_power_of_two(n_steps)) {
    throw ArgumentError("n_steps must be a power of two, got " + std::to_string(n_steps));
  }
  const std::size_t N = 2 * n_steps;
  const Eigen::VectorXd row = embedded_row(alpha, n_steps);

  std::vector<std::complex<double>> buf(N);
  for (std::size_t k = 0; k < N; ++k) buf[k] = row[static_cast<Eigen::Index>(k)];
  FftPlan<double>(N).forward(buf);

  CirculantSpectrum spec;
  spec.alpha = alpha;
  spec.n_steps = n_steps;
  spec.eigenvalues.resize(static_cast<Eigen::Index>(N));
  for (std::size_t k = 0; k < N; ++k) spec.eigenvalues[static_cast<Eigen::Index>(k)] = buf[k].real();

  const double max_eig = spec.eigenvalues.maxCoeff();
  const double floor = kEigenNoiseFloor * max_eig;
  const double tol = kEigenTolerance * max_eig;
  for (auto& lambda : spec.eigenvalues) {
    if (lambda < 0.0) {
      spec.most_negative = std::min(spec.most_negative, lambda);
      if (lambda < -tol) {
        std::ostringstream msg;
        msg << "circulant embedding for alpha = " << alpha << ", n = " << n_steps
            << " has eigenvalue " << lambda << " below -" << tol;
        throw EmbeddingError(msg.str());
      }
      ++spec.clamp_count;
      lambda = 0.0;
    } else if (lambda <= floor) {
      lambda = 0.0;
    }
  }

  spec.amplitudes.resize(static_cast<Eigen::Index>(N));
  const double inv_n = 1.0 / static_cast<double>(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double lambda = spec.eigenvalues[static_cast<Eigen::Index>(k)];
    const bool real_mode = (k == 0 || k == n_steps);
    spec.amplitudes[static_cast<Eigen::Index>(k)] =
        std::sqrt(lambda * inv_n * (real_mode ? 1.0 : 0.5));
  }
  return spec;
}

std::shared_ptr<const CirculantSpectrum> SpectrumCache::spectrum(double alpha, std::size_t n_steps) {
  const auto key = std::make_pair(alpha, n_steps);
  {
    std::shared_lock lock(mutex_);
    if (auto it = spectra_.find(key); it != spectra_.end()) return it->second;
  }
  auto built = std::make_shared<const CirculantSpectrum>(circulant_spectrum(alpha, n_steps));
  std::unique_lock lock(mutex_);
  return spectra_.try_emplace(key, std::move(built)).first->second;
}

std::shared_ptr<const FftPlan<double>> SpectrumCache::plan(std::size_t length) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = plans_.find(length); it != plans_.end()) return it->second;
  }
  auto built = std::make_shared<const FftPlan<double>>(length);
  std::unique_lock lock(mutex_);
  return plans_.try_emplace(length, std::move(built)).first->second;
}

SpectrumCache& SpectrumCache::global() {
  static SpectrumCache cache;
  return cache;
}

void sample_unit_fgn(const CirculantSpectrum& spectrum, const FftPlan<double>& plan,
                     std::span<const double> normals, std::span<std::complex<double>> work,
                     std::span<double> out) {
  const std::size_t n = spectrum.n_steps;
  const std::size_t N = spectrum.size();
  if (normals.size() != N) {
    throw ArgumentError("seed vector has length " + std::to_string(normals.size()) +
                        ", expected " + std::to_string(N));
  }
  if (work.size() != N || out.size() != n || plan.size() != N) {
    throw ArgumentError("workspace size does not match the spectrum");
  }
  const double* amp = spectrum.amplitudes.data();
  // normals[0] -> frequency 0, normals[1] -> frequency n, and
  // (normals[2k], normals[2k+1]) -> real/imaginary part of frequency k.
  work[0] = {amp[0] * normals[0], 0.0};
  work[n] = {amp[n] * normals[1], 0.0};
  for (std::size_t k = 1; k < n; ++k) {
    const std::complex<double> w{amp[k] * normals[2 * k], amp[k] * normals[2 * k + 1]};
    work[k] = w;
    work[N - k] = std::conj(w);
  }
  plan.backward_unscaled(work);
  for (std::size_t j = 0; j < n; ++j) out[j] = work[j].real();
}

Eigen::VectorXd sample_unit_fgn(const CirculantSpectrum& spectrum, const SeedVector& seeds) {
  const std::size_t N = spectrum.size();
  if (static_cast<std::size_t>(seeds.normals.size()) != N) {
    throw ArgumentError("seed vector has length " + std::to_string(seeds.normals.size()) +
                        ", expected " + std::to_string(N));
  }
  const auto plan = SpectrumCache::global().plan(N);
  std::vector<std::complex<double>> work(N);
  Eigen::VectorXd out(static_cast<Eigen::Index>(spectrum.n_steps));
  sample_unit_fgn(spectrum, *plan, std::span<const double>(seeds.normals.data(), N), work,
                  std::span<double>(out.data(), spectrum.n_steps));
  return out;
}

void build_two_sided_fbm(std::span<const double> increments, const GridSpec& grid,
                         std::span<double> values) {
  if (increments.size() != grid.n_steps) {
    throw ArgumentError("expected " + std::to_string(grid.n_steps) + " increments, got " +
                        std::to_string(increments.size()));
  }
  if (values.size() != grid.points()) throw ArgumentError("path buffer has the wrong length");
  double running = 0.0;
  values[0] = 0.0;
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    running += increments[k];
    values[k + 1] = running;
  }
  const double anchor = values[grid.zero_index()];
  const double scale = std::pow(grid.eta, grid.alpha / 2.0);
  for (auto& v : values) v = scale * (v - anchor);
}

FbmPath build_two_sided_fbm(std::span<const double> increments, const GridSpec& grid) {
  FbmPath path{grid, Eigen::VectorXd(static_cast<Eigen::Index>(grid.points()))};
  build_two_sided_fbm(increments, grid, std::span<double>(path.values.data(), grid.points()));
  return path;
}

FbmCholeskyOracle::FbmCholeskyOracle(double alpha, std::span<const double> times) {
  validate_alpha(alpha);
  if (times.empty() || times.size() > 4096) {
    throw ArgumentError("oracle lattice must have between 1 and 4096 points");
  }
  if (std::set<double>(times.begin(), times.end()).size() != times.size()) {
    throw ArgumentError("oracle times must be distinct");
  }
  const auto m = static_cast<Eigen::Index>(times.size());
  covariance_.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      covariance_(i, j) = fbm_covariance(alpha, times[static_cast<std::size_t>(i)],
                                         times[static_cast<std::size_t>(j)]);
      covariance_(j, i) = covariance_(i, j);
    }
  }
  ldlt_.compute(covariance_);
  if (ldlt_.info() != Eigen::Success) throw NumericalError("LDLT factorization failed");
  const Eigen::VectorXd d = ldlt_.vectorD();
  const double scale = std::max(1.0, covariance_.diagonal().maxCoeff());
  if (d.minCoeff() < -1e-9 * scale) {
    std::ostringstream msg;
    msg << "fBm covariance is not positive semidefinite (pivot " << d.minCoeff() << ")";
    throw NumericalError(msg.str());
  }
  sqrt_d_ = d.cwiseMax(0.0).cwiseSqrt();
}

Eigen::VectorXd FbmCholeskyOracle::sample(std::span<const double> normals) const {
  if (normals.size() != size()) throw ArgumentError("oracle needs one normal per lattice point");
  const Eigen::Map<const Eigen::VectorXd> z(normals.data(), static_cast<Eigen::Index>(normals.size()));
  // A = P^T L D L^T P, so x = P^T L D^{1/2} z has covariance A.
  Eigen::VectorXd y = ldlt_.matrixL() * sqrt_d_.cwiseProduct(z);
  return ldlt_.transpositionsP().transpose() * y;
}

Eigen::VectorXd cholesky_oracle_sample(double alpha, std::span<const double> times,
                                       std::span<const double> normals) {
  return FbmCholeskyOracle(alpha, times).sample(normals);
}

}  // namespace pickands
