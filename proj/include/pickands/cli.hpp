#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pickands/bounds.hpp"
#include "pickands/identity.hpp"

namespace pickands::cli {

enum class OutputFormat { Csv, Json };

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kIoFailure = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

struct RunConfig {
  std::vector<double> alphas;
  std::optional<double> T;
  std::optional<double> eta;
  std::vector<double> etas;
  std::size_t reps = 500;
  std::uint64_t master_seed = 0x5EEDull;
  std::size_t workers = 1;
  OutputFormat format = OutputFormat::Csv;
  BoundParams params;
  std::size_t count = 1;          ///< fgn-dump: number of paths
  bool independent_runs = false;  ///< regress: fresh simulation per eta
  double tol = 1e-4;              ///< identity-check tolerance
};

/// Default grid 0.70:0.05:2.00.
std::vector<double> default_alphas();

/// Horizon and mesh for simulation commands (T = 32, eta = 2^-10 by default).
double simulation_T(const RunConfig& config);
double simulation_eta(const RunConfig& config);
/// Horizon and mesh for the bound engine (T = 128, eta = 2^-18 by default).
double bounds_T(const RunConfig& config);
double bounds_eta(const RunConfig& config);

/// Accepts decimals, fractions ("1/1024") and powers ("2^-10").
double parse_real(std::string_view text);
/// Comma-separated list of parse_real values.
std::vector<double> parse_real_list(std::string_view text);
/// "lo:step:hi" (inclusive, rounded to 12 decimals) or a comma list.
std::vector<double> parse_alpha_spec(std::string_view text);

void cmd_estimate(const RunConfig& config, std::ostream& out);
void cmd_bounds(const RunConfig& config, std::istream& in, std::ostream& out);
/// Simulates an eta sweep, or fits the points in `points_in` when non-null.
void cmd_regress(const RunConfig& config, std::istream* points_in, std::ostream& out);
IdentityCheck cmd_identity_check(const RunConfig& config, std::ostream& out);
void cmd_fgn_dump(const RunConfig& config, std::ostream& out);
void cmd_table(const RunConfig& config, std::ostream& out);

/// Maps an exception escaping a command to an ExitCode.
int exit_code_for(const std::exception& error) noexcept;

}  // namespace pickands::cli
