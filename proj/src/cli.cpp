#include "pickands/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "pickands/errors.hpp"
#include "pickands/estimator.hpp"
#include "pickands/pathfun.hpp"
#include "pickands/regress.hpp"
#include "pickands/table_io.hpp"

namespace pickands::cli {

namespace {

constexpr double kDeskT = 32.0;
constexpr double kDeskEta = 1.0 / 1024.0;
constexpr double kBoundsT = 128.0;
constexpr double kBoundsEta = 1.0 / 262144.0;

std::string trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, s.find_last_not_of(" \t") - first + 1));
}

double parse_number(std::string_view text) {
  const std::string s = trimmed(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ArgumentError("cannot parse '" + std::string(text) + "' as a number");
  }
  return v;
}

EstimatorConfig estimator_config(const RunConfig& config) {
  EstimatorConfig est;
  est.alphas = config.alphas.empty() ? default_alphas() : config.alphas;
  est.T = simulation_T(config);
  est.eta = simulation_eta(config);
  est.reps = config.reps;
  est.master_seed = config.master_seed;
  est.workers = config.workers;
  est.validate();
  return est;
}

std::vector<IntervalReport> bound_rows(const RunConfig& config, std::span<const TableRecord> records, double T,
                                       double eta) {
  config.params.validate();
  std::vector<IntervalReport> reports;
  for (const auto& rec : records) reports.push_back(try_interval(rec.estimate, rec.alpha, T, eta, config.params));
  return reports;
}

void emit_bounds(const RunConfig& config, std::span<const TableRecord> records,
                 std::span<const IntervalReport> reports, std::ostream& out) {
  if (config.format == OutputFormat::Json) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      auto j = to_json(reports[i]);
      if (records[i].sample_stddev) j["sample_stddev"] = *records[i].sample_stddev;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
  } else {
    write_bounds_csv(out, records, reports);
  }
}

struct RegressionRow {
  EtaScalingFit fit;
  double finest_eta = 0.0;
  double predicted_finest = 0.0;
  double raw_finest = 0.0;
};

void emit_regression(const RunConfig& config, std::span<const RegressionRow> rows, std::ostream& out) {
  if (config.format == OutputFormat::Json) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
      auto j = to_json(r.fit);
      j["finest_eta"] = r.finest_eta;
      j["predicted_finest"] = r.predicted_finest;
      j["raw_finest"] = r.raw_finest;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
    return;
  }
  out << "alpha,h_T_hat,c_hat,finest_eta,predicted_finest,raw_finest,r_squared,h_T_stderr,c_stderr\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_value(*v) : std::string(); };
  for (const auto& r : rows) {
    std::ostringstream eta;
    eta.precision(17);
    eta << r.finest_eta;
    out << format_alpha(r.fit.alpha) << ',' << format_value(r.fit.h_T_hat) << ',' << format_value(r.fit.c_hat) << ','
        << eta.str() << ',' << format_value(r.predicted_finest) << ',' << format_value(r.raw_finest) << ','
        << format_value(r.fit.r_squared) << ',' << opt(r.fit.h_T_stderr) << ',' << opt(r.fit.c_stderr) << '\n';
  }
}

}  // namespace

std::vector<double> default_alphas() { return parse_alpha_spec("0.70:0.05:2.00"); }

double simulation_T(const RunConfig& config) { return config.T.value_or(kDeskT); }
double simulation_eta(const RunConfig& config) { return config.eta.value_or(kDeskEta); }
double bounds_T(const RunConfig& config) { return config.T.value_or(kBoundsT); }
double bounds_eta(const RunConfig& config) { return config.eta.value_or(kBoundsEta); }

double parse_real(std::string_view text) {
  const std::string s = trimmed(text);
  if (const auto caret = s.find('^'); caret != std::string::npos) {
    return std::pow(parse_number(s.substr(0, caret)), parse_number(s.substr(caret + 1)));
  }
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const double den = parse_number(s.substr(slash + 1));
    if (den == 0.0) throw ArgumentError("division by zero in '" + s + "'");
    return parse_number(s.substr(0, slash)) / den;
  }
  return parse_number(s);
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> values;
  for (const auto& cell : split_csv_line(text)) {
    if (!cell.empty()) values.push_back(parse_real(cell));
  }
  return values;
}

std::vector<double> parse_alpha_spec(std::string_view text) {
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    const double lo = parse_real(text.substr(0, c1));
    const double step = parse_real(text.substr(c1 + 1, c2 - c1 - 1));
    const double hi = parse_real(text.substr(c2 + 1));
    if (!(step > 0.0) || hi < lo) throw ArgumentError("alpha range needs lo <= hi and a positive step");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> values;
    for (std::size_t i = 0; i < count; ++i) {
      values.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return values;
  }
  auto values = parse_real_list(text);
  if (values.empty()) throw ArgumentError("empty alpha specification");
  return values;
}

void cmd_estimate(const RunConfig& config, std::ostream& out) {
  const auto rows = estimate_ratio(estimator_config(config));
  if (config.format == OutputFormat::Json) {
    out << estimates_json(rows).dump(2) << '\n';
  } else {
    write_estimates_csv(out, rows);
  }
}

void cmd_bounds(const RunConfig& config, std::istream& in, std::ostream& out) {
  const auto records = read_table_csv(in);
  if (records.empty() && config.format == OutputFormat::Csv) return;
  const auto reports = bound_rows(config, records, bounds_T(config), bounds_eta(config));
  emit_bounds(config, records, reports, out);
}

void cmd_table(const RunConfig& config, std::ostream& out) {
  const EstimatorConfig est = estimator_config(config);
  const auto rows = estimate_ratio(est);
  std::vector<TableRecord> records;
  for (const auto& row : rows) records.push_back({row.alpha, row.mean, row.sample_stddev, {}, {}});
  const auto reports = bound_rows(config, records, est.T, est.eta);
  emit_bounds(config, records, reports, out);
}

void cmd_regress(const RunConfig& config, std::istream* points_in, std::ostream& out) {
  const FitInference inference = config.independent_runs ? FitInference::NormalTheory : FitInference::None;
  std::vector<RegressionRow> rows;

  if (points_in != nullptr) {
    const auto points = read_regression_points_csv(*points_in);
    std::vector<double> alphas;
    for (const auto& p : points) {
      if (std::find(alphas.begin(), alphas.end(), p.alpha) == alphas.end()) alphas.push_back(p.alpha);
    }
    for (double a : alphas) {
      std::vector<EtaPoint> pts;
      for (const auto& p : points) {
        if (p.alpha == a) pts.push_back({p.eta, p.estimate});
      }
      const auto finest = *std::min_element(pts.begin(), pts.end(),
                                            [](const EtaPoint& x, const EtaPoint& y) { return x.eta < y.eta; });
      RegressionRow row{fit_eta_scaling(pts, a, inference), finest.eta, 0.0, finest.estimate};
      row.predicted_finest = predict(row.fit, finest.eta);
      rows.push_back(std::move(row));
    }
    emit_regression(config, rows, out);
    return;
  }

  if (config.etas.size() < 2) throw ArgumentError("regress needs an --etas list with at least two values");
  EstimatorConfig est = estimator_config(config);
  if (!config.eta) est.eta = std::min(kDeskEta, *std::min_element(config.etas.begin(), config.etas.end()));
  std::vector<double> sweep_etas{est.eta};
  for (double e : config.etas) {
    if (e != est.eta) sweep_etas.push_back(e);
  }
  const SweepMode mode = config.independent_runs ? SweepMode::IndependentRuns : SweepMode::SameTrace;
  const EtaSweep sweep = estimate_eta_sweep(est, sweep_etas, mode);

  for (std::size_t a = 0; a < est.alphas.size(); ++a) {
    std::vector<EtaPoint> pts;
    for (std::size_t e = 0; e < sweep.etas.size(); ++e) {
      if (std::find(config.etas.begin(), config.etas.end(), sweep.etas[e]) != config.etas.end()) {
        pts.push_back({sweep.etas[e], sweep.rows[a][e].mean});
      }
    }
    RegressionRow row{fit_eta_scaling(pts, est.alphas[a], inference), est.eta, 0.0, sweep.rows[a][0].mean};
    row.predicted_finest = predict(row.fit, est.eta);
    rows.push_back(std::move(row));
  }
  emit_regression(config, rows, out);
}

IdentityCheck cmd_identity_check(const RunConfig& config, std::ostream& out) {
  const double eta = config.eta.value_or(0.5);
  const IdentityCheck check = alpha2_identity_integral(eta);
  if (config.format == OutputFormat::Json) {
    out << nlohmann::json{{"eta", eta}, {"value", check.value}, {"abs_error", check.abs_error}, {"tol", config.tol}}
               .dump(2)
        << '\n';
  } else {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.12f", check.value);
    out << "eta,value,abs_error\n";
    std::ostringstream line;
    line.precision(17);
    line << eta << ',' << buf << ',';
    std::snprintf(buf, sizeof buf, "%.3e", check.abs_error);
    out << line.str() << buf << '\n';
  }
  if (!(check.abs_error <= config.tol)) {
    std::ostringstream msg;
    msg << "identity integral deviates from 2 by " << check.abs_error << " > tol " << config.tol;
    throw NumericalError(msg.str());
  }
  return check;
}

void cmd_fgn_dump(const RunConfig& config, std::ostream& out) {
  const auto alphas = config.alphas.empty() ? std::vector<double>{1.0} : config.alphas;
  if (alphas.size() != 1) throw ArgumentError("fgn-dump takes exactly one alpha");
  const GridSpec grid = GridSpec::make(alphas.front(), simulation_T(config), simulation_eta(config));
  const auto spectrum = SpectrumCache::global().spectrum(grid.alpha, grid.n_steps);

  out << "path,t,B_t,Z_t\n";
  char buf[160];
  for (std::size_t p = 0; p < config.count; ++p) {
    const SeedVector seeds = make_seed_vector(config.master_seed, p, spectrum->size());
    const Eigen::VectorXd inc = sample_unit_fgn(*spectrum, seeds);
    const FbmPath path = build_two_sided_fbm(std::span<const double>(inc.data(), grid.n_steps), grid);
    const ZPath z = z_from_fbm(path);
    for (std::size_t k = 0; k < grid.points(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", p, grid.time(k), path.values[i], z.z_values[i]);
      out << buf;
    }
  }
}

int exit_code_for(const std::exception& error) noexcept {
  if (dynamic_cast<const NumericalError*>(&error) != nullptr) return kNumericalFailure;
  if (dynamic_cast<const std::invalid_argument*>(&error) != nullptr ||
      dynamic_cast<const std::domain_error*>(&error) != nullptr) {
    return kConfigError;
  }
  return kIoFailure;
}

}  // namespace pickands::cli
