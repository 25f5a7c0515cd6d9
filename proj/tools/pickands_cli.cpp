#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "pickands/cli.hpp"
#include "pickands/estimator.hpp"

using namespace pickands::cli;

namespace {

struct RawOptions {
  std::string alphas;
  std::string T;
  std::string eta;
  std::string etas;
  std::string out;
  std::string format = "csv";
  std::string input;
  std::size_t workers = 0;
  double eps_scale = 1.0;
};

void add_common(CLI::App& cmd, RunConfig& config, RawOptions& raw) {
  cmd.add_option("--alpha,--alphas", raw.alphas, "alpha list (1,1.5) or range lo:step:hi");
  cmd.add_option("--T", raw.T, "horizon T (accepts 2^k and a/b)");
  cmd.add_option("--eta", raw.eta, "lattice mesh eta (accepts 2^-k and a/b)");
  cmd.add_option("--reps", config.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", config.master_seed, "master seed");
  cmd.add_option("--workers", raw.workers, "worker threads (default: PICKANDS_WORKERS or all cores)");
  cmd.add_option("--out", raw.out, "output file (default: stdout)");
  cmd.add_option("--format", raw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_bound_params(CLI::App& cmd, RunConfig& config, RawOptions& raw) {
  cmd.add_option("--gamma", config.params.gamma, "window growth rate");
  cmd.add_option("--psi", config.params.psi, "decay rate of the window weights");
  cmd.add_option("--tau", config.params.tau_base, "tau for the central window");
  cmd.add_option("--eps-scale", raw.eps_scale, "multiplier on both epsilon schedules");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo estimation of Pickands' constants with error bounds"};
  app.require_subcommand(1);
  RunConfig config;
  RawOptions raw;

  auto* estimate = app.add_subcommand("estimate", "estimate H_alpha^eta(T) for each alpha");
  add_common(*estimate, config, raw);

  auto* bounds = app.add_subcommand("bounds", "lower/upper bounds from an estimates table");
  add_common(*bounds, config, raw);
  add_bound_params(*bounds, config, raw);
  bounds->add_option("input", raw.input, "estimates CSV (alpha, estimate[, sample_stddev])")->required();

  auto* table = app.add_subcommand("table", "estimate then bound, in one table");
  add_common(*table, config, raw);
  add_bound_params(*table, config, raw);

  auto* regress = app.add_subcommand("regress", "extrapolate eta -> 0 by least squares in eta^(alpha/2)");
  add_common(*regress, config, raw);
  regress->add_option("--etas", raw.etas, "comma list of meshes used in the fit");
  regress->add_flag("--independent", config.independent_runs, "fresh simulation per eta (enables standard errors)");
  regress->add_option("--input", raw.input, "fit (alpha, eta, estimate) points from a CSV instead of simulating");

  auto* identity = app.add_subcommand("identity-check", "alpha = 2 lattice integral identity (value 2)");
  identity->add_option("--eta", raw.eta, "lattice mesh eta");
  identity->add_option("--tol", config.tol, "allowed |value - 2|");
  identity->add_option("--format", raw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  identity->add_option("--out", raw.out, "output file (default: stdout)");

  auto* dump = app.add_subcommand("fgn-dump", "write sampled paths as CSV (path, t, B_t, Z_t)");
  add_common(*dump, config, raw);
  dump->add_option("--count", config.count, "number of paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (!raw.alphas.empty()) config.alphas = parse_alpha_spec(raw.alphas);
    if (!raw.T.empty()) config.T = parse_real(raw.T);
    if (!raw.eta.empty()) config.eta = parse_real(raw.eta);
    if (!raw.etas.empty()) config.etas = parse_real_list(raw.etas);
    config.workers = raw.workers > 0 ? raw.workers : pickands::default_workers();
    config.format = raw.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    config.params.eps_scale = raw.eps_scale;

    std::ofstream file;
    if (!raw.out.empty()) {
      file.open(raw.out);
      if (!file) {
        std::cerr << "error: cannot open " << raw.out << " for writing\n";
        return kIoFailure;
      }
    }
    std::ostream& out = raw.out.empty() ? std::cout : file;

    const auto open_input = [&](const std::string& path) {
      auto in = std::make_unique<std::ifstream>(path);
      if (!*in) throw std::runtime_error("cannot open " + path);
      return in;
    };

    if (estimate->parsed()) {
      cmd_estimate(config, out);
    } else if (bounds->parsed()) {
      auto in = open_input(raw.input);
      cmd_bounds(config, *in, out);
    } else if (table->parsed()) {
      cmd_table(config, out);
    } else if (regress->parsed()) {
      std::unique_ptr<std::ifstream> in;
      if (!raw.input.empty()) in = open_input(raw.input);
      cmd_regress(config, in.get(), out);
    } else if (identity->parsed()) {
      cmd_identity_check(config, out);
    } else if (dump->parsed()) {
      cmd_fgn_dump(config, out);
    }
    out.flush();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kSuccess;
}
