#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svbench/adapters.hpp"
#include "svbench/executor.hpp"
#include "svbench/task_model.hpp"

namespace svbench::adapters {

struct RunSet {
  std::string name;
  /// fnmatch(3) patterns relative to the collection root, matched against `.yml` task files.
  std::vector<std::string> task_globs;
  std::vector<std::string> options;
};

/// Per-field override; unset fields keep the base value.
struct LimitsOverride {
  std::optional<double> cpu_time_s;
  std::optional<double> wall_time_s;
  std::optional<std::uint64_t> memory_bytes;
  std::optional<unsigned> cpu_cores;

  exec::ResourceLimits apply(exec::ResourceLimits base) const;
  bool operator==(const LimitsOverride&) const = default;
};

struct BenchmarkDefinition {
  std::string tool_name;
  std::vector<std::string> global_options;
  std::vector<RunSet> run_sets;
  std::optional<LimitsOverride> limits_override;
};

BenchmarkDefinition load_benchmark_definition(std::string_view text, const AdapterRegistry& registry);

struct PlannedRun {
  std::string run_set;
  /// Task file path relative to the collection root, without `.yml`.
  std::string task_id;
  task::TaskDefinition task;
  /// Relative to the collection root.
  fs::path property;
  task::ExpectedVerdict expected;
  exec::RunSpec spec;
};

struct SkippedTask {
  std::string run_set;
  fs::path task_file;
  std::string reason;
};

struct Expansion {
  std::vector<PlannedRun> runs;
  std::vector<SkippedTask> skipped;
};

/// Task files matched by a run set, relative to the root and sorted.
std::vector<fs::path> match_tasks(const RunSet& run_set, const fs::path& collection_root);

/// Plans one run per (task, supported property), ordered by run set then
/// task id. Unparsable tasks and unsupported properties are skipped, not fatal.
Expansion expand_runs(const BenchmarkDefinition& defn, const AdapterRegistry& registry,
                      const fs::path& collection_root, const exec::ResourceLimits& base_limits = {});

}  // namespace svbench::adapters
