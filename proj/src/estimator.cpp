#include "pickands/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "pickands/errors.hpp"

namespace pickands {

namespace {

constexpr double kZ95 = 1.96;

/// Runs fn(index, worker) for index in [0, count) on `workers` threads.
/// Each index is visited exactly once; the first exception is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i, w);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

/// Per-worker scratch space for one fine-lattice simulation.
struct Workspace {
  std::vector<double> normals;
  std::vector<std::complex<double>> fft;
  std::vector<double> increments;
  Eigen::VectorXd path;
  Eigen::VectorXd z;

  explicit Workspace(std::size_t n_steps)
      : normals(2 * n_steps), fft(2 * n_steps), increments(n_steps),
        path(static_cast<Eigen::Index>(n_steps + 1)), z(static_cast<Eigen::Index>(n_steps + 1)) {}
};

/// Shared read-only state for simulating every alpha on one lattice.
class PathSimulator {
public:
  PathSimulator(std::span<const double> alphas, double T, double eta, std::uint64_t master_seed)
      : master_seed_(master_seed) {
    for (double a : alphas) {
      grids_.push_back(GridSpec::make(a, T, eta));
      spectra_.push_back(SpectrumCache::global().spectrum(a, grids_.back().n_steps));
      drifts_.push_back(drift_vector(grids_.back()));
    }
    n_steps_ = grids_.empty() ? GridSpec::make(1.0, T, eta).n_steps : grids_.front().n_steps;
    plan_ = SpectrumCache::global().plan(2 * n_steps_);
  }

  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t alpha_count() const noexcept { return grids_.size(); }
  const GridSpec& grid(std::size_t a) const { return grids_[a]; }

  /// Draws the seed vector of replication `rep` into the workspace.
  void draw_seeds(std::size_t rep, Workspace& ws) const {
    fill_gaussian_stream(stream_key(master_seed_, rep), ws.normals);
  }

  /// Fills ws.z with the Z field for alpha index `a` from the current seeds.
  void simulate(std::size_t a, Workspace& ws) const {
    const GridSpec& g = grids_[a];
    sample_unit_fgn(*spectra_[a], *plan_, ws.normals, ws.fft, ws.increments);
    build_two_sided_fbm(ws.increments, g, std::span<double>(ws.path.data(), g.points()));
    ws.z = std::sqrt(2.0) * ws.path - drifts_[a];
    ws.z[static_cast<Eigen::Index>(g.zero_index())] = 0.0;
  }

private:
  std::uint64_t master_seed_;
  std::size_t n_steps_ = 0;
  std::vector<GridSpec> grids_;
  std::vector<std::shared_ptr<const CirculantSpectrum>> spectra_;
  std::vector<Eigen::VectorXd> drifts_;
  std::shared_ptr<const FftPlan<double>> plan_;
};

struct SubLattice {
  double eta;
  std::size_t stride;
};

std::vector<SubLattice> sub_lattices(const EstimatorConfig& config, std::span<const double> etas) {
  if (etas.empty()) throw ArgumentError("eta sweep needs at least one eta");
  const std::size_t n = config.grid(config.alphas.front()).n_steps;
  std::vector<SubLattice> out;
  for (double e : etas) {
    const double ratio = e / config.eta;
    const double rounded = std::round(ratio);
    const auto stride = static_cast<std::size_t>(rounded);
    if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9 * ratio || !is_power_of_two(stride) ||
        stride > n / 2) {
      std::ostringstream msg;
      msg << "eta = " << e << " is not a nested coarsening of the finest mesh " << config.eta
          << " (need eta / finest a power of two and at most T / finest)";
      throw ArgumentError(msg.str());
    }
    out.push_back({e, stride});
  }
  return out;
}

PathFunctionals<double> sub_lattice_functionals(const Eigen::VectorXd& z, const GridSpec& fine,
                                                const SubLattice& sub) {
  using Strided = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>>;
  const auto coarse_steps = static_cast<Eigen::Index>(fine.n_steps / sub.stride);
  const Strided view(z.data(), coarse_steps + 1, Eigen::InnerStride<>(static_cast<Eigen::Index>(sub.stride)));
  return functionals(view, sub.eta, fine.zero_index() / sub.stride);
}

}  // namespace

void EstimatorConfig::validate() const {
  if (alphas.empty()) throw ArgumentError("at least one alpha is required");
  for (double a : alphas) validate_alpha(a);
  if (reps == 0) throw ArgumentError("reps must be at least 1");
  if (workers == 0) throw ArgumentError("workers must be at least 1");
  (void)GridSpec::make(alphas.front(), T, eta);
}

std::size_t default_workers() {
  if (const char* env = std::getenv("PICKANDS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EstimateRow summarize(double alpha, std::span<const double> values) {
  if (values.empty()) throw ArgumentError("cannot summarize zero replications");
  EstimateRow row;
  row.alpha = alpha;
  row.reps = values.size();
  row.mean = compensated_total(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    CompensatedSum<double> ss;
    for (double v : values) ss.add((v - row.mean) * (v - row.mean));
    const double sd = std::sqrt(ss.value() / static_cast<double>(values.size() - 1));
    const double se = sd / std::sqrt(static_cast<double>(values.size()));
    row.sample_stddev = sd;
    row.std_error = se;
    row.ci95_lo = row.mean - kZ95 * se;
    row.ci95_hi = row.mean + kZ95 * se;
  }
  return row;
}

std::vector<std::vector<double>> replicate_ratios(const EstimatorConfig& config) {
  config.validate();
  const PathSimulator sim(config.alphas, config.T, config.eta, config.master_seed);
  std::vector<std::vector<double>> ratios(sim.alpha_count(), std::vector<double>(config.reps));
  std::vector<Workspace> spaces;
  const std::size_t workers = std::min(config.workers, config.reps);
  for (std::size_t w = 0; w < workers; ++w) spaces.emplace_back(sim.n_steps());

  parallel_for(config.reps, workers, [&](std::size_t rep, std::size_t w) {
    Workspace& ws = spaces[w];
    sim.draw_seeds(rep, ws);
    for (std::size_t a = 0; a < sim.alpha_count(); ++a) {
      sim.simulate(a, ws);
      const GridSpec& g = sim.grid(a);
      ratios[a][rep] = sub_lattice_functionals(ws.z, g, {g.eta, 1}).ratio;
    }
  });
  return ratios;
}

std::vector<EstimateRow> estimate_ratio(const EstimatorConfig& config) {
  const auto ratios = replicate_ratios(config);
  std::vector<EstimateRow> rows;
  for (std::size_t a = 0; a < ratios.size(); ++a) rows.push_back(summarize(config.alphas[a], ratios[a]));
  return rows;
}

std::vector<EstimateRow> estimate_albin(const EstimatorConfig& config) {
  config.validate();
  const PathSimulator sim(config.alphas, config.T, config.eta, config.master_seed);
  std::vector<std::vector<unsigned char>> hits(sim.alpha_count(), std::vector<unsigned char>(config.reps));
  std::vector<Workspace> spaces;
  const std::size_t workers = std::min(config.workers, config.reps);
  for (std::size_t w = 0; w < workers; ++w) spaces.emplace_back(sim.n_steps());

  parallel_for(config.reps, workers, [&](std::size_t rep, std::size_t w) {
    Workspace& ws = spaces[w];
    sim.draw_seeds(rep, ws);
    for (std::size_t a = 0; a < sim.alpha_count(); ++a) {
      sim.simulate(a, ws);
      hits[a][rep] = ws.z.maxCoeff() <= 0.0 ? 1 : 0;
    }
  });

  std::vector<EstimateRow> rows;
  const double n = static_cast<double>(config.reps);
  for (std::size_t a = 0; a < hits.size(); ++a) {
    std::size_t successes = 0;
    for (auto h : hits[a]) successes += h;
    const double p = static_cast<double>(successes) / n;
    EstimateRow row;
    row.alpha = config.alphas[a];
    row.reps = config.reps;
    row.mean = p / config.eta;
    const double sd = std::sqrt(p * (1.0 - p)) / config.eta;
    const double se = sd / std::sqrt(n);
    row.sample_stddev = sd;
    row.std_error = se;
    row.ci95_lo = row.mean - kZ95 * se;
    row.ci95_hi = row.mean + kZ95 * se;
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::vector<PathFunctionals<double>>> sweep_replication(
    const EstimatorConfig& config, std::span<const double> etas, std::size_t rep) {
  config.validate();
  const auto subs = sub_lattices(config, etas);
  const PathSimulator sim(config.alphas, config.T, config.eta, config.master_seed);
  Workspace ws(sim.n_steps());
  sim.draw_seeds(rep, ws);
  std::vector<std::vector<PathFunctionals<double>>> out(sim.alpha_count());
  for (std::size_t a = 0; a < sim.alpha_count(); ++a) {
    sim.simulate(a, ws);
    for (const auto& sub : subs) out[a].push_back(sub_lattice_functionals(ws.z, sim.grid(a), sub));
  }
  return out;
}

EtaSweep estimate_eta_sweep(const EstimatorConfig& config, std::span<const double> etas, SweepMode mode) {
  config.validate();
  const auto subs = sub_lattices(config, etas);
  EtaSweep sweep;
  sweep.etas.assign(etas.begin(), etas.end());
  sweep.mode = mode;
  sweep.rows.assign(config.alphas.size(), {});

  if (mode == SweepMode::IndependentRuns) {
    for (std::size_t e = 0; e < subs.size(); ++e) {
      EstimatorConfig column = config;
      column.eta = subs[e].eta;
      column.master_seed = derive_seed(config.master_seed, e);
      const auto rows = estimate_ratio(column);
      for (std::size_t a = 0; a < rows.size(); ++a) sweep.rows[a].push_back(rows[a]);
    }
    return sweep;
  }

  const PathSimulator sim(config.alphas, config.T, config.eta, config.master_seed);
  // ratios[a][e][rep]
  std::vector<std::vector<std::vector<double>>> ratios(
      sim.alpha_count(), std::vector<std::vector<double>>(subs.size(), std::vector<double>(config.reps)));
  std::vector<Workspace> spaces;
  const std::size_t workers = std::min(config.workers, config.reps);
  for (std::size_t w = 0; w < workers; ++w) spaces.emplace_back(sim.n_steps());

  parallel_for(config.reps, workers, [&](std::size_t rep, std::size_t w) {
    Workspace& ws = spaces[w];
    sim.draw_seeds(rep, ws);
    for (std::size_t a = 0; a < sim.alpha_count(); ++a) {
      sim.simulate(a, ws);
      for (std::size_t e = 0; e < subs.size(); ++e) {
        ratios[a][e][rep] = sub_lattice_functionals(ws.z, sim.grid(a), subs[e]).ratio;
      }
    }
  });

  for (std::size_t a = 0; a < ratios.size(); ++a) {
    for (std::size_t e = 0; e < subs.size(); ++e) {
      sweep.rows[a].push_back(summarize(config.alphas[a], ratios[a][e]));
    }
  }
  return sweep;
}

ChangeOfMeasureResult change_of_measure_check(double alpha, double t, std::span<const double> lattice,
                                              std::size_t reps, std::uint64_t seed) {
  validate_alpha(alpha);
  if (reps == 0) throw ArgumentError("reps must be at least 1");
  if (lattice.size() < 2 || lattice.size() > 64) throw ArgumentError("lattice must have 2 to 64 points");
  std::vector<double> points(lattice.begin(), lattice.end());
  std::sort(points.begin(), points.end());
  const auto locate = [&](double x) {
    const auto it = std::find_if(points.begin(), points.end(),
                                 [x](double p) { return std::abs(p - x) <= 1e-12 * std::max(1.0, std::abs(x)); });
    if (it == points.end()) {
      std::ostringstream msg;
      msg << "lattice must contain " << x;
      throw ArgumentError(msg.str());
    }
    return static_cast<std::size_t>(it - points.begin());
  };
  const std::size_t zero = locate(0.0);
  const std::size_t t_index = locate(t);

  double spacing = points.back() - points.front();
  for (std::size_t i = 1; i < points.size(); ++i) spacing = std::min(spacing, points[i] - points[i - 1]);

  // theta_t Z at s is Z at s - t, so the right-hand side needs the field on
  // the shifted lattice {s - t}.
  std::vector<double> shifted(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) shifted[i] = points[i] - points[t_index];
  const FbmCholeskyOracle oracle(alpha, points);
  const FbmCholeskyOracle shifted_oracle(alpha, shifted);

  const auto to_z = [alpha](const Eigen::VectorXd& b, std::span<const double> times) {
    Eigen::VectorXd z(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      z[i] = std::sqrt(2.0) * b[i] - std::pow(std::abs(times[static_cast<std::size_t>(i)]), alpha);
    }
    return z;
  };

  std::vector<double> lhs(reps), diff(reps), rhs(reps);
  std::vector<double> normals(points.size());
  for (std::size_t r = 0; r < reps; ++r) {
    fill_gaussian_stream(stream_key(seed, r), normals);
    const Eigen::VectorXd z = to_z(oracle.sample(normals), points);
    const Eigen::VectorXd zs = to_z(shifted_oracle.sample(normals), shifted);
    lhs[r] = std::exp(z[static_cast<Eigen::Index>(t_index)]) * functionals(z, spacing, zero).ratio;
    rhs[r] = functionals(zs, spacing, t_index).ratio;
    diff[r] = lhs[r] - rhs[r];
  }

  ChangeOfMeasureResult result;
  result.lhs = compensated_total(lhs) / static_cast<double>(reps);
  result.rhs = compensated_total(rhs) / static_cast<double>(reps);
  const EstimateRow d = summarize(0.0, diff);
  result.combined_stderr = d.std_error.value_or(0.0);
  return result;
}

}  // namespace pickands
