#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pickands/pathfun.hpp"

namespace pickands {

struct EstimatorConfig {
  std::vector<double> alphas{1.0};
  double T = 32.0;
  double eta = 1.0 / 1024.0;
  std::size_t reps = 500;
  std::uint64_t master_seed = 0x5EEDull;
  std::size_t workers = 1;

  /// Throws DomainError / ArgumentError on an invalid configuration.
  void validate() const;
  GridSpec grid(double alpha) const { return GridSpec::make(alpha, T, eta); }
};

/// Monte Carlo summary of one alpha. Dispersion fields are empty when only
/// one replication is available.
struct EstimateRow {
  double alpha = 0.0;
  double mean = 0.0;
  std::optional<double> sample_stddev;
  std::optional<double> std_error;
  std::optional<double> ci95_lo;
  std::optional<double> ci95_hi;
  std::size_t reps = 0;
};

/// Mean (compensated, index order) and two-pass sample standard deviation.
EstimateRow summarize(double alpha, std::span<const double> values);

/// Per-replication M/S ratios, indexed [alpha][rep]. Replication r uses the
/// seed vector derived from (master_seed, r) for every alpha.
std::vector<std::vector<double>> replicate_ratios(const EstimatorConfig& config);

/// Estimates of the discretized truncated constant, one row per alpha in
/// configuration order. Bit-identical for any worker count.
std::vector<EstimateRow> estimate_ratio(const EstimatorConfig& config);

/// eta^-1 times the fraction of replications whose lattice supremum of Z
/// is attained at the origin; binomial standard error scaled by eta^-1.
std::vector<EstimateRow> estimate_albin(const EstimatorConfig& config);

enum class SweepMode {
  SameTrace,        ///< one trace at the finest mesh, sub-sampled per eta
  IndependentRuns,  ///< a fresh simulation at each mesh with its own seed
};

struct EtaSweep {
  std::vector<double> etas;
  /// rows[a][e]: alpha index a, eta index e.
  std::vector<std::vector<EstimateRow>> rows;
  SweepMode mode = SweepMode::SameTrace;
};

/// Every eta must be config.eta times a power of two, with the coarse
/// lattice still containing the origin.
EtaSweep estimate_eta_sweep(const EstimatorConfig& config, std::span<const double> etas,
                            SweepMode mode = SweepMode::SameTrace);

/// Functionals of replication `rep` on each sub-lattice, indexed [alpha][eta].
std::vector<std::vector<PathFunctionals<double>>> sweep_replication(
    const EstimatorConfig& config, std::span<const double> etas, std::size_t rep);

struct ChangeOfMeasureResult {
  double lhs = 0.0;
  double rhs = 0.0;
  /// Standard error of the paired difference lhs_i - rhs_i.
  double combined_stderr = 0.0;
};

/// Monte Carlo check of E[e^{Z_t} F(Z)] = E[F(theta_t Z)] on a small lattice
/// with F(z) = max_s e^{z_s} / (h sum_s e^{z_s}), h the smallest spacing.
/// Both sides are driven by the same normals per replication.
ChangeOfMeasureResult change_of_measure_check(double alpha, double t, std::span<const double> lattice,
                                              std::size_t reps, std::uint64_t seed);

/// Worker count from PICKANDS_WORKERS, else the hardware concurrency.
std::size_t default_workers();

}  // namespace pickands
