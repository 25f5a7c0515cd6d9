#include <gtest/gtest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "oracles/oracles.hpp"
#include "pickands/errors.hpp"
#include "pickands/fgn.hpp"
#include "pickands/seed.hpp"

using namespace pickands;

namespace {

Eigen::VectorXd draw(const CirculantSpectrum& spec, std::uint64_t seed, std::uint64_t rep) {
  return sample_unit_fgn(spec, make_seed_vector(seed, rep, spec.size()));
}

/// Increment covariance of fBm at times 1..n, taken from the dense oracle.
Eigen::MatrixXd oracle_increment_covariance(double alpha, std::size_t n) {
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i + 1);
  const FbmCholeskyOracle chol(alpha, times);
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 1; i < n; ++i) d(i, i - 1) = -1.0;
  return d * chol.covariance() * d.transpose();
}

void expect_within_standard_errors(const oracle::CovarianceAccumulator& acc, const Eigen::MatrixXd& target,
                                   double k) {
  const Eigen::MatrixXd cov = acc.covariance();
  const Eigen::MatrixXd se = acc.standard_errors();
  for (Eigen::Index i = 0; i < target.rows(); ++i)
    for (Eigen::Index j = 0; j < target.cols(); ++j)
      EXPECT_LE(std::abs(cov(i, j) - target(i, j)), k * se(i, j) + 1e-15)
          << "entry (" << i << "," << j << ") empirical " << cov(i, j) << " target " << target(i, j);
}

}  // namespace

TEST(FgnAutocov, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(fgn_autocov(1.5, 0), 1.0);
  for (std::size_t k = 1; k < 10; ++k) EXPECT_DOUBLE_EQ(fgn_autocov(1.0, k), 0.0);
  EXPECT_DOUBLE_EQ(fgn_autocov(2.0, 5), 1.0);
  for (double a : {0.3, 0.9, 1.3, 1.9})
    for (std::size_t k = 0; k < 20; ++k)
      // Three terms of size k^alpha cancel; allow a few ulps of that scale.
      EXPECT_NEAR(fgn_autocov(a, k), static_cast<double>(oracle::autocov(a, static_cast<long long>(k))),
                  1e-15 * 8.0 * std::max(1.0, std::pow(static_cast<double>(k) + 1.0, a)));
}

TEST(FgnAutocov, RejectsAlphaOutsideDomain) {
  EXPECT_THROW(fgn_autocov(0.0, 1), DomainError);
  EXPECT_THROW(fgn_autocov(2.0001, 1), DomainError);
  EXPECT_THROW(fgn_autocov(-1.0, 1), DomainError);
  EXPECT_THROW(fgn_autocov(std::nan(""), 1), DomainError);
}

TEST(GridSpec, ValidatesLattice) {
  const auto g = GridSpec::make(1.0, 32.0, 1.0 / 1024.0);
  EXPECT_EQ(g.n_steps, 65536u);
  EXPECT_EQ(g.points(), 65537u);
  EXPECT_EQ(g.zero_index(), 32768u);
  EXPECT_DOUBLE_EQ(g.time(0), -32.0);
  EXPECT_DOUBLE_EQ(g.time(g.n_steps), 32.0);
  EXPECT_DOUBLE_EQ(g.hurst, 0.5);
  EXPECT_THROW(GridSpec::make(1.0, 3.0, 1.0), ArgumentError);
  EXPECT_THROW(GridSpec::make(1.0, 1.0, 0.3), ArgumentError);
  EXPECT_THROW(GridSpec::make(1.0, -1.0, 0.5), ArgumentError);
  EXPECT_THROW(GridSpec::make(2.5, 1.0, 0.5), DomainError);
}

TEST(CirculantSpectrum, ConstantRowForAlphaTwo) {
  const auto spec = circulant_spectrum(2.0, 4);
  ASSERT_EQ(spec.eigenvalues.size(), 8);
  EXPECT_NEAR(spec.eigenvalues[0], 8.0, 1e-12);
  for (Eigen::Index k = 1; k < 8; ++k) EXPECT_EQ(spec.eigenvalues[k], 0.0);
}

TEST(CirculantSpectrum, DeltaRowForAlphaOne) {
  const auto spec = circulant_spectrum(1.0, 4);
  for (Eigen::Index k = 0; k < 8; ++k) EXPECT_NEAR(spec.eigenvalues[k], 1.0, 1e-14);
  EXPECT_EQ(spec.clamp_count, 0u);
}

TEST(CirculantSpectrum, MatchesDenseEigendecomposition) {
  for (double a : {0.5, 1.5, 1.9}) {
    const auto spec = circulant_spectrum(a, 8);
    Eigen::VectorXd fast = spec.eigenvalues;
    std::sort(fast.data(), fast.data() + fast.size());
    const Eigen::VectorXd dense = oracle::dense_circulant_eigenvalues(embedded_row(a, 8));
    EXPECT_LE((fast - dense).cwiseAbs().maxCoeff(), 1e-10) << "alpha " << a;
    EXPECT_GE(fast.minCoeff(), 0.0);
  }
}

TEST(CirculantSpectrum, NonnegativeAndReconstructsRow) {
  for (int ai = 2; ai <= 20; ++ai) {
    const double a = ai / 10.0;
    for (std::size_t n = 2; n <= 4096; n *= 2) {
      const auto spec = circulant_spectrum(a, n);
      ASSERT_GE(spec.eigenvalues.minCoeff(), 0.0);
      EXPECT_GE(spec.most_negative, -kEigenTolerance * spec.eigenvalues.maxCoeff());
      Eigen::VectorXcd lambda = spec.eigenvalues.cast<std::complex<double>>();
      const Eigen::VectorXcd back = dft(lambda, true);
      const Eigen::VectorXd row = embedded_row(a, n);
      EXPECT_LE((back.real() - row).cwiseAbs().maxCoeff(), 1e-10) << "alpha " << a << " n " << n;
      EXPECT_LE(back.imag().cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(CirculantSpectrum, RejectsBadSizes) {
  EXPECT_THROW(circulant_spectrum(1.0, 6), ArgumentError);
  EXPECT_THROW(circulant_spectrum(1.0, 0), ArgumentError);
  EXPECT_THROW(circulant_spectrum(0.0, 8), DomainError);
}

TEST(SpectrumCache, ConcurrentLookupsShareOneSpectrum) {
  SpectrumCache cache;
  std::vector<std::shared_ptr<const CirculantSpectrum>> got(8);
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < got.size(); ++i)
      threads.emplace_back([&, i] { got[i] = cache.spectrum(1.3, 256); });
  }
  for (const auto& p : got) EXPECT_EQ(p.get(), got[0].get());
  EXPECT_EQ(cache.plan(512).get(), cache.plan(512).get());
}

TEST(SampleUnitFgn, AlphaTwoIncrementsAreEqual) {
  const auto spec = circulant_spectrum(2.0, 16);
  for (std::uint64_t r = 0; r < 5; ++r) {
    const auto x = draw(spec, 99, r);
    for (Eigen::Index k = 1; k < x.size(); ++k) EXPECT_NEAR(x[k], x[0], 1e-12 * (1.0 + std::abs(x[0])));
  }
}

TEST(SampleUnitFgn, RejectsWrongSeedLength) {
  const auto spec = circulant_spectrum(1.0, 8);
  EXPECT_THROW(sample_unit_fgn(spec, make_seed_vector(1, 1, 15)), ArgumentError);
}

TEST(SampleUnitFgn, BrownianIncrementsUncorrelated) {
  const auto spec = circulant_spectrum(1.0, 8);
  oracle::CovarianceAccumulator acc(8);
  for (std::uint64_t r = 0; r < 100000; ++r) acc.add(draw(spec, 2024, r));
  const double se = acc.standard_errors()(0, 1);
  EXPECT_LE(std::abs(acc.covariance()(0, 1)), 4.0 * se);
}

TEST(SampleUnitFgn, CovarianceMatchesToeplitzAndCholeskyOracle) {
  for (double a : {0.8, 1.5}) {
    const auto spec = circulant_spectrum(a, 8);
    const Eigen::MatrixXd toeplitz = oracle::toeplitz_fgn(a, 8);
    const Eigen::MatrixXd chol = oracle_increment_covariance(a, 8);
    EXPECT_LE((toeplitz - chol).cwiseAbs().maxCoeff(), 1e-12);
    oracle::CovarianceAccumulator acc(8);
    for (std::uint64_t r = 0; r < 100000; ++r) acc.add(draw(spec, 77, r));
    expect_within_standard_errors(acc, chol, 4.0);
  }
}

TEST(SampleUnitFgn, CrnSeedsIndependentOfAlpha) {
  // The same normals drive every alpha; only the spectrum differs.
  const auto seeds = make_seed_vector(5, 11, 64);
  const auto x1 = sample_unit_fgn(circulant_spectrum(1.0, 32), seeds);
  const auto x1again = sample_unit_fgn(circulant_spectrum(1.0, 32), make_seed_vector(5, 11, 64));
  EXPECT_TRUE((x1.array() == x1again.array()).all());
  const auto x15 = sample_unit_fgn(circulant_spectrum(1.5, 32), seeds);
  EXPECT_FALSE((x1.array() == x15.array()).all());
}

TEST(TwoSidedFbm, ZeroIncrementsGiveZeroPath) {
  const auto grid = GridSpec::make(1.0, 2.0, 0.5);
  const std::vector<double> zeros(grid.n_steps, 0.0);
  const auto path = build_two_sided_fbm(zeros, grid);
  EXPECT_TRUE((path.values.array() == 0.0).all());
}

TEST(TwoSidedFbm, AnchoredAtZeroExactly) {
  const auto grid = GridSpec::make(1.3, 4.0, 0.125);
  const auto spec = circulant_spectrum(1.3, grid.n_steps);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto x = draw(spec, 3, r);
    const auto path = build_two_sided_fbm(std::span<const double>(x.data(), grid.n_steps), grid);
    EXPECT_EQ(path.values[static_cast<Eigen::Index>(grid.zero_index())], 0.0);
  }
}

TEST(TwoSidedFbm, AlphaTwoPathIsLinear) {
  const auto grid = GridSpec::make(2.0, 4.0, 0.25);
  const auto spec = circulant_spectrum(2.0, grid.n_steps);
  const auto x = draw(spec, 8, 0);
  const auto path = build_two_sided_fbm(std::span<const double>(x.data(), grid.n_steps), grid);
  const double slope = path.values[static_cast<Eigen::Index>(grid.points() - 1)] / grid.T;
  for (std::size_t k = 0; k < grid.points(); ++k)
    EXPECT_NEAR(path.values[static_cast<Eigen::Index>(k)], slope * grid.time(k), 1e-9 * std::abs(slope) * grid.T);
}

TEST(TwoSidedFbm, RejectsWrongLength) {
  const auto grid = GridSpec::make(1.0, 2.0, 0.5);
  const std::vector<double> bad(3, 0.0);
  EXPECT_THROW(build_two_sided_fbm(bad, grid), ArgumentError);
}

TEST(TwoSidedFbm, CovarianceMatchesFbmIncludingMixedSigns) {
  const double a = 1.4;
  const auto grid = GridSpec::make(a, 2.0, 0.5);  // n = 8, t in {-2, ..., 2}
  const auto spec = circulant_spectrum(a, grid.n_steps);
  oracle::CovarianceAccumulator acc(static_cast<Eigen::Index>(grid.points()));
  for (std::uint64_t r = 0; r < 100000; ++r) {
    const auto x = draw(spec, 1234, r);
    acc.add(build_two_sided_fbm(std::span<const double>(x.data(), grid.n_steps), grid).values);
  }
  Eigen::MatrixXd target(grid.points(), grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i)
    for (std::size_t j = 0; j < grid.points(); ++j) target(i, j) = oracle::fbm_cov(a, grid.time(i), grid.time(j));
  expect_within_standard_errors(acc, target, 4.0);
}

TEST(CholeskyOracle, TwoPointCovariances) {
  const std::vector<double> brownian{1.0, -1.0};
  EXPECT_NEAR(FbmCholeskyOracle(1.0, brownian).covariance()(0, 1), 0.0, 1e-15);
  const std::vector<double> same_side{0.5, 1.0};
  EXPECT_NEAR(FbmCholeskyOracle(1.6, same_side).covariance()(0, 1), 0.5, 1e-15);
}

TEST(CholeskyOracle, SingleTimeVariance) {
  const std::vector<double> times{1.7};
  const FbmCholeskyOracle chol(1.2, times);
  oracle::CovarianceAccumulator acc(1);
  for (std::uint64_t r = 0; r < 100000; ++r) {
    const auto z = make_seed_vector(31, r, 1);
    acc.add(chol.sample(std::span<const double>(z.normals.data(), 1)));
  }
  EXPECT_LE(std::abs(acc.covariance()(0, 0) - std::pow(1.7, 1.2)), 4.0 * acc.standard_errors()(0, 0));
}

TEST(CholeskyOracle, SampleHasTargetCovarianceExactly) {
  // L D L^T reproduces the covariance, so the linear map applied to e_i
  // gives columns whose Gram matrix is the covariance.
  const std::vector<double> times{-2.0, -0.5, 0.0, 0.25, 1.0, 3.0};
  const FbmCholeskyOracle chol(0.7, times);
  Eigen::MatrixXd a(6, 6);
  for (int i = 0; i < 6; ++i) {
    std::vector<double> e(6, 0.0);
    e[i] = 1.0;
    a.col(i) = chol.sample(e);
  }
  EXPECT_LE((a * a.transpose() - chol.covariance()).cwiseAbs().maxCoeff(), 1e-12);
  const std::vector<double> e(6, 1.0);
  EXPECT_LE((cholesky_oracle_sample(0.7, times, e) - chol.sample(e)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(CholeskyOracle, RejectsDuplicateTimesAndBadLengths) {
  const std::vector<double> dup{1.0, 1.0};
  EXPECT_THROW(FbmCholeskyOracle(1.0, dup), ArgumentError);
  const std::vector<double> times{1.0, 2.0};
  const FbmCholeskyOracle chol(1.0, times);
  const std::vector<double> z(3, 0.0);
  EXPECT_THROW(chol.sample(z), ArgumentError);
}
