#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svbench/benchmark.hpp"

namespace svbench::cli {

namespace fs = std::filesystem;

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kFindings = 1, kFailure = 2 };

enum class Stamp { Now, Fixed };

struct CampaignConfig {
  fs::path collection_root;
  fs::path benchmark_definition;
  fs::path adapter_dir;
  fs::path results_dir;
  unsigned parallel_slots = 1;
  /// Applied on top of the definition's own limits.
  adapters::LimitsOverride limits_override;
  bool strict_accounting = false;
  Stamp stamp = Stamp::Now;
};

struct Console {
  std::ostream& out;
  std::ostream& err;
  bool color = false;
};

int cmd_validate(const fs::path& collection_root, Console& console);
/// On success `written` (when given) receives the results file path.
int cmd_run(const CampaignConfig& config, Console& console, fs::path* written = nullptr);
int cmd_score(const std::vector<fs::path>& results_files, Console& console);
int cmd_table(const std::vector<fs::path>& results_files, const fs::path& out_dir, Console& console);
int cmd_plot(const std::vector<fs::path>& results_files, const fs::path& out_dir, Console& console);

/// Parses arguments and dispatches to a subcommand.
int run_cli(int argc, char** argv, Console& console);

}  // namespace svbench::cli
