#include "svbench/scoring.hpp"

#include <algorithm>
#include <set>

namespace svbench::scoring {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::CorrectTrue: return "CORRECT_TRUE";
    case Outcome::CorrectFalse: return "CORRECT_FALSE";
    case Outcome::IncorrectTrue: return "INCORRECT_TRUE";
    case Outcome::IncorrectFalse: return "INCORRECT_FALSE";
    case Outcome::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view slug(Outcome outcome) {
  switch (outcome) {
    case Outcome::CorrectTrue: return "correct-true";
    case Outcome::CorrectFalse: return "correct-false";
    case Outcome::IncorrectTrue: return "incorrect-true";
    case Outcome::IncorrectFalse: return "incorrect-false";
    case Outcome::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (Outcome o : kAllOutcomes) {
    if (to_string(o) == text || slug(o) == text) return o;
  }
  return std::nullopt;
}

Outcome classify(Verdict verdict, bool expected) {
  switch (verdict) {
    case Verdict::True: return expected ? Outcome::CorrectTrue : Outcome::IncorrectTrue;
    case Verdict::False: return expected ? Outcome::IncorrectFalse : Outcome::CorrectFalse;
    case Verdict::Unknown: return Outcome::Unknown;
  }
  return Outcome::Unknown;
}

ScoreTable ScoreTable::custom(int correct_true, int correct_false, int unknown, int incorrect_false,
                              int incorrect_true) {
  if (correct_true < 0 || correct_false < 0 || incorrect_false > 0 || incorrect_true > 0) {
    throw ScoringError(ScoringErrc::InvalidScoreTable, "score table must satisfy correct >= 0 >= incorrect");
  }
  if (unknown > std::min(correct_true, correct_false) || unknown < std::max(incorrect_true, incorrect_false)) {
    throw ScoringError(ScoringErrc::InvalidScoreTable, "UNKNOWN must score between incorrect and correct answers");
  }
  ScoreTable t;
  t.correct_true_ = correct_true;
  t.correct_false_ = correct_false;
  t.unknown_ = unknown;
  t.incorrect_false_ = incorrect_false;
  t.incorrect_true_ = incorrect_true;
  return t;
}

int ScoreTable::points(Outcome outcome) const {
  switch (outcome) {
    case Outcome::CorrectTrue: return correct_true_;
    case Outcome::CorrectFalse: return correct_false_;
    case Outcome::IncorrectTrue: return incorrect_true_;
    case Outcome::IncorrectFalse: return incorrect_false_;
    case Outcome::Unknown: return unknown_;
  }
  return 0;
}

Outcome outcome_of(const RunRecord& record) {
  if (record.termination != exec::TerminationKind::Normal) return Outcome::Unknown;
  return classify(record.verdict, record.expected);
}

std::uint64_t OutcomeCounts::total() const {
  std::uint64_t sum = 0;
  for (auto v : values) sum += v;
  return sum;
}

CategoryResult score_records(const std::vector<RunRecord>& records, const ScoreTable& table, std::string tool_name) {
  CategoryResult result;
  result.tool_name = std::move(tool_name);
  // Sum in record-independent order so the float total is permutation-invariant.
  std::multiset<double> correct_times;
  for (const auto& r : records) {
    const Outcome o = outcome_of(r);
    ++result.counts[o];
    if (o == Outcome::CorrectTrue || o == Outcome::CorrectFalse) correct_times.insert(r.cpu_time_s);
  }
  for (Outcome o : kAllOutcomes) result.score += static_cast<std::int64_t>(table.points(o)) * static_cast<std::int64_t>(result.counts[o]);
  for (double t : correct_times) result.total_cpu_time_s += t;
  return result;
}

std::vector<CategoryResult> rank(std::vector<CategoryResult> results) {
  std::set<std::string> names;
  for (const auto& r : results) {
    if (!names.insert(r.tool_name).second) {
      throw ScoringError(ScoringErrc::DuplicateTool, "tool ranked twice: " + r.tool_name);
    }
  }
  std::sort(results.begin(), results.end(), [](const CategoryResult& a, const CategoryResult& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.total_cpu_time_s != b.total_cpu_time_s) return a.total_cpu_time_s < b.total_cpu_time_s;
    return a.tool_name < b.tool_name;
  });
  return results;
}

}  // namespace svbench::scoring
