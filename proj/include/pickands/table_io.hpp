#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pickands/bounds.hpp"
#include "pickands/estimator.hpp"
#include "pickands/regress.hpp"

namespace pickands {

/// Marker written in place of a bound whose preconditions failed.
inline constexpr std::string_view kMissingBound = "---";

/// Fixed 7 decimals.
std::string format_value(double value);
/// At least 3 decimals, more only when needed (up to 9).
std::string format_alpha(double alpha);

/// One row of an estimates or bounds table as read back from CSV.
struct TableRecord {
  double alpha = 0.0;
  double estimate = 0.0;
  std::optional<double> sample_stddev;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
};

/// Reads a CSV with a header naming at least `alpha` and `estimate`. Empty
/// fields and "---" read as missing. Throws ArgumentError on malformed input.
std::vector<TableRecord> read_table_csv(std::istream& in);

/// Header: alpha,estimate,sample_stddev,stderr,ci95_lo,ci95_hi.
void write_estimates_csv(std::ostream& out, std::span<const EstimateRow> rows);
nlohmann::json estimates_json(std::span<const EstimateRow> rows);

/// Header: alpha,estimate,sample_stddev,lower_bound,upper_bound.
void write_bounds_csv(std::ostream& out, std::span<const TableRecord> records,
                      std::span<const IntervalReport> reports);

/// (alpha, eta, estimate) triples for the regression; header must name all three.
struct RegressionPoint {
  double alpha = 0.0;
  double eta = 0.0;
  double estimate = 0.0;
};
std::vector<RegressionPoint> read_regression_points_csv(std::istream& in);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace pickands
