#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "svbench/error.hpp"
#include "svbench/executor.hpp"
#include "svbench/scoring.hpp"

namespace svbench::report {

namespace fs = std::filesystem;

inline constexpr int kResultsFormatVersion = 1;

struct ResultSet {
  std::string tool_name;
  std::string tool_version;
  std::vector<std::string> options;
  exec::ResourceLimits limits;
  std::string host_fingerprint;
  /// ISO-8601 UTC.
  std::string started_at;
  std::vector<scoring::RunRecord> records;
  int format_version = kResultsFormatVersion;
  /// Free-form run metadata (accounting backend, core-limit mode, ...).
  std::map<std::string, std::string> metadata;

  bool operator==(const ResultSet&) const = default;
};

enum class ResultsErrc { UnsupportedFormatVersion, CorruptResults, DuplicateRecord, Io };
using ResultsError = Error<ResultsErrc>;

/// gzip-compressed lines: header object, one object per record, checksum
/// trailer. Written to a temporary file and renamed into place.
void write_results(const ResultSet& rs, const fs::path& path);
ResultSet load_results(const fs::path& path);

/// `<tool>-<stamp>.vres.gz`
std::string results_file_name(const std::string& tool_name, const std::string& stamp);

}  // namespace svbench::report
