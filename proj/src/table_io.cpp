#include "pickands/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "pickands/errors.hpp"

namespace pickands {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_cell(const std::string& cell, std::size_t line_no) {
  if (cell.empty() || cell == kMissingBound) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ArgumentError("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
  }
  return value;
}

std::string optional_value(const std::optional<double>& v) { return v ? format_value(*v) : std::string(); }

/// Parsed CSV body with named column lookup.
class CsvTable {
public:
  explicit CsvTable(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty() || trim(line).front() == '#') continue;
      auto cells = split_csv_line(line);
      if (header_.empty()) {
        for (std::size_t i = 0; i < cells.size(); ++i) columns_[cells[i]] = i;
        header_ = std::move(cells);
        continue;
      }
      if (cells.size() != header_.size()) {
        throw ArgumentError("line " + std::to_string(line_no) + ": expected " + std::to_string(header_.size()) +
                            " fields, found " + std::to_string(cells.size()));
      }
      rows_.push_back(std::move(cells));
      line_numbers_.push_back(line_no);
    }
  }

  bool empty_input() const { return header_.empty(); }
  bool has(const std::string& name) const { return columns_.count(name) > 0; }
  std::size_t size() const { return rows_.size(); }

  void require(const std::string& name) const {
    if (!has(name)) throw ArgumentError("input table has no '" + name + "' column");
  }

  std::optional<double> get(std::size_t row, const std::string& name) const {
    const auto it = columns_.find(name);
    if (it == columns_.end()) return std::nullopt;
    return parse_cell(rows_[row][it->second], line_numbers_[row]);
  }

  double required(std::size_t row, const std::string& name) const {
    const auto v = get(row, name);
    if (!v) throw ArgumentError("line " + std::to_string(line_numbers_[row]) + ": missing " + name);
    return *v;
  }

private:
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> line_numbers_;
};

}  // namespace

std::string format_value(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f", value);
  return buf;
}

std::string format_alpha(double alpha) {
  char buf[64];
  for (int digits = 3; digits <= 9; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*f", digits, alpha);
    if (std::abs(std::strtod(buf, nullptr) - alpha) <= 1e-12) break;
  }
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::vector<TableRecord> read_table_csv(std::istream& in) {
  const CsvTable table(in);
  std::vector<TableRecord> records;
  if (table.empty_input()) return records;
  table.require("alpha");
  table.require("estimate");
  for (std::size_t r = 0; r < table.size(); ++r) {
    TableRecord rec;
    rec.alpha = table.required(r, "alpha");
    rec.estimate = table.required(r, "estimate");
    rec.sample_stddev = table.get(r, "sample_stddev");
    rec.lower_bound = table.get(r, "lower_bound");
    rec.upper_bound = table.get(r, "upper_bound");
    records.push_back(rec);
  }
  return records;
}

std::vector<RegressionPoint> read_regression_points_csv(std::istream& in) {
  const CsvTable table(in);
  std::vector<RegressionPoint> points;
  if (table.empty_input()) return points;
  for (const char* name : {"alpha", "eta", "estimate"}) table.require(name);
  for (std::size_t r = 0; r < table.size(); ++r) {
    points.push_back({table.required(r, "alpha"), table.required(r, "eta"), table.required(r, "estimate")});
  }
  return points;
}

void write_estimates_csv(std::ostream& out, std::span<const EstimateRow> rows) {
  out << "alpha,estimate,sample_stddev,stderr,ci95_lo,ci95_hi\n";
  for (const auto& row : rows) {
    out << format_alpha(row.alpha) << ',' << format_value(row.mean) << ',' << optional_value(row.sample_stddev)
        << ',' << optional_value(row.std_error) << ',' << optional_value(row.ci95_lo) << ','
        << optional_value(row.ci95_hi) << '\n';
  }
}

nlohmann::json estimates_json(std::span<const EstimateRow> rows) {
  auto arr = nlohmann::json::array();
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  for (const auto& row : rows) {
    arr.push_back({{"alpha", row.alpha},
                   {"estimate", row.mean},
                   {"sample_stddev", opt(row.sample_stddev)},
                   {"stderr", opt(row.std_error)},
                   {"ci95_lo", opt(row.ci95_lo)},
                   {"ci95_hi", opt(row.ci95_hi)},
                   {"reps", row.reps}});
  }
  return arr;
}

void write_bounds_csv(std::ostream& out, std::span<const TableRecord> records,
                      std::span<const IntervalReport> reports) {
  if (records.size() != reports.size()) throw ArgumentError("records and reports differ in length");
  out << "alpha,estimate,sample_stddev,lower_bound,upper_bound\n";
  const auto bound = [](const std::optional<double>& v) { return v ? format_value(*v) : std::string(kMissingBound); };
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << format_alpha(records[i].alpha) << ',' << format_value(records[i].estimate) << ','
        << optional_value(records[i].sample_stddev) << ',' << bound(reports[i].lb) << ',' << bound(reports[i].ub)
        << '\n';
  }
}

}  // namespace pickands
