#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svbench/error.hpp"
#include "svbench/executor.hpp"
#include "svbench/verdict.hpp"

namespace svbench::scoring {

enum class Outcome { CorrectTrue, CorrectFalse, IncorrectTrue, IncorrectFalse, Unknown };

inline constexpr std::array<Outcome, 5> kAllOutcomes = {
    Outcome::CorrectTrue, Outcome::CorrectFalse, Outcome::IncorrectTrue, Outcome::IncorrectFalse, Outcome::Unknown};

std::string_view to_string(Outcome outcome);
/// Lower-case, hyphenated; used for CSS classes and CSV cells.
std::string_view slug(Outcome outcome);
std::optional<Outcome> parse_outcome(std::string_view text);

Outcome classify(Verdict verdict, bool expected);

enum class ScoringErrc { InvalidScoreTable, DuplicateTool };
using ScoringError = Error<ScoringErrc>;

class ScoreTable {
 public:
  /// Competition defaults: +2 / +1 / 0 / -16 / -32.
  ScoreTable() = default;

  /// Rejects tables whose correct outcomes score below zero or whose
  /// incorrect outcomes score above zero.
  static ScoreTable custom(int correct_true, int correct_false, int unknown, int incorrect_false,
                           int incorrect_true);

  int points(Outcome outcome) const;

 private:
  int correct_true_ = 2;
  int correct_false_ = 1;
  int unknown_ = 0;
  int incorrect_false_ = -16;
  int incorrect_true_ = -32;
};

struct RunRecord {
  std::string task_name;
  std::string property_file;
  Verdict verdict = Verdict::Unknown;
  std::string raw_status;
  bool expected = true;
  double cpu_time_s = 0;
  double wall_time_s = 0;
  std::uint64_t peak_memory_bytes = 0;
  exec::TerminationKind termination = exec::TerminationKind::Normal;
  /// Reserved; never populated.
  std::optional<std::string> witness_path;

  bool operator==(const RunRecord&) const = default;
};

/// Outcome of a record; abnormal terminations always count as UNKNOWN.
Outcome outcome_of(const RunRecord& record);

struct OutcomeCounts {
  std::array<std::uint64_t, kAllOutcomes.size()> values{};

  std::uint64_t& operator[](Outcome o) { return values[static_cast<std::size_t>(o)]; }
  std::uint64_t operator[](Outcome o) const { return values[static_cast<std::size_t>(o)]; }
  std::uint64_t total() const;
  bool operator==(const OutcomeCounts&) const = default;
};

struct CategoryResult {
  std::string tool_name;
  std::int64_t score = 0;
  OutcomeCounts counts;
  /// CPU time of correctly answered runs.
  double total_cpu_time_s = 0;

  bool operator==(const CategoryResult&) const = default;
};

CategoryResult score_records(const std::vector<RunRecord>& records, const ScoreTable& table = {},
                             std::string tool_name = {});

/// Score descending, then CPU time ascending, then tool name.
std::vector<CategoryResult> rank(std::vector<CategoryResult> results);

}  // namespace svbench::scoring
