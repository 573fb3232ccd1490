#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svbench/results_io.hpp"
#include "svbench/scoring.hpp"

namespace svbench::report {

struct Cell {
  std::string status;
  scoring::Outcome outcome = scoring::Outcome::Unknown;
  double cpu_time_s = 0;
  std::uint64_t memory_bytes = 0;
};

struct Row {
  std::string task_name;
  std::string property_file;
  std::optional<bool> expected;
  /// One entry per tool column group; absent where the tool has no record.
  std::vector<std::optional<Cell>> cells;
};

struct ComparisonTable {
  std::vector<std::string> tools;
  std::vector<Row> rows;
  /// Footer, one per tool, from score_records.
  std::vector<scoring::CategoryResult> footers;
};

/// Rows are the union of (task, property) keys, sorted.
ComparisonTable generate_table(const std::vector<ResultSet>& result_sets, const scoring::ScoreTable& table = {});

std::string render_csv(const ComparisonTable& table);
/// Self-contained page with embedded style and a row filter.
std::string render_html(const ComparisonTable& table);

struct QuantilePoint {
  std::size_t n = 0;
  double cumulative_cpu_time_s = 0;

  bool operator==(const QuantilePoint&) const = default;
};

/// Correctly solved records only, fastest first.
std::vector<QuantilePoint> quantile_data(const ResultSet& rs);

struct ScatterPoint {
  std::string task_name;
  double cpu_a = 0;
  double cpu_b = 0;
  scoring::Outcome outcome_a = scoring::Outcome::Unknown;
  scoring::Outcome outcome_b = scoring::Outcome::Unknown;

  bool operator==(const ScatterPoint&) const = default;
};

/// Tasks present in both sets, sorted by name. Timed-out runs sit at their
/// set's CPU limit.
std::vector<ScatterPoint> scatter_data(const ResultSet& a, const ResultSet& b);

std::string render_quantile_csv(const std::vector<QuantilePoint>& points);
std::string render_scatter_csv(const std::vector<ScatterPoint>& points);

}  // namespace svbench::report
