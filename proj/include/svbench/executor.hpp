#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svbench/error.hpp"

namespace svbench::exec {

namespace fs = std::filesystem;

struct ResourceLimits {
  double cpu_time_s = 900.0;
  double wall_time_s = 900.0;
  std::uint64_t memory_bytes = 15'000'000'000ULL;
  unsigned cpu_cores = 8;

  bool operator==(const ResourceLimits&) const = default;
};

enum class ExecErrc { InvalidSpec, SupervisionUnavailable };
using ExecError = Error<ExecErrc>;

/// Throws ExecError(InvalidSpec) unless every limit is strictly positive.
void validate(const ResourceLimits& limits);

inline constexpr std::uint64_t kDefaultOutputCap = 2 * 1024 * 1024;

struct RunSpec {
  std::vector<std::string> argv;
  fs::path working_dir;
  /// The only variables visible to the tool.
  std::map<std::string, std::string> environment;
  ResourceLimits limits;
  std::uint64_t output_cap_bytes = kDefaultOutputCap;
};

struct Measurement {
  /// Summed over every process the run started.
  double cpu_time_s = 0;
  double wall_time_s = 0;
  std::uint64_t peak_memory_bytes = 0;
};

enum class TerminationKind { Normal, CpuTimeout, WallTimeout, OutOfMemory, Signaled, HarnessError };

std::string_view to_string(TerminationKind kind);
std::optional<TerminationKind> parse_termination_kind(std::string_view text);

struct TerminationReason {
  TerminationKind kind = TerminationKind::Normal;
  std::string detail;
};

enum class AccountingMode {
  /// Control groups when usable, otherwise /proc sampling.
  Auto,
  /// Control groups or ExecError(SupervisionUnavailable).
  Strict,
  /// Always sample the process tree through /proc.
  Sampling,
};

struct ExecOptions {
  AccountingMode accounting = AccountingMode::Auto;
  /// Pin the process tree to these CPUs; empty means unpinned.
  std::vector<int> cpu_set;
};

struct RunResult {
  /// Absent when the tool was killed by a signal or never started.
  std::optional<int> exit_code;
  std::string output;
  bool output_truncated = false;
  Measurement measurement;
  TerminationReason reason;
  /// "cgroup2" or "proc-sampling".
  std::string accounting_backend;
  /// How the core limit was applied: "pinned:<cpus>", "quota:<n>" or "unenforced".
  std::string core_limit_mode;
};

/// Whether the strict (control-group) accounting backend is usable on this host.
bool strict_accounting_available();

/// Runs one tool invocation to completion under `spec.limits`.
///
/// Stdout and stderr are captured interleaved. The whole process tree is
/// terminated (SIGTERM, then SIGKILL after a 1 s grace) on the first limit
/// that fires, and no process started by the run survives the call. Spawn
/// failures are reported as HarnessError results rather than thrown.
RunResult execute_run(const RunSpec& spec, const ExecOptions& options = {});

struct BatchOptions {
  unsigned parallel_slots = 1;
  AccountingMode accounting = AccountingMode::Auto;
  /// Pin each slot to a disjoint core set when the host has enough cores.
  bool pin_cores = true;
};

/// Core sets for `slots` concurrent runs of `cores_per_run` each, or empty
/// when the host cannot supply disjoint sets.
std::vector<std::vector<int>> plan_core_sets(unsigned slots, unsigned cores_per_run,
                                             const std::vector<int>& host_cpus);

/// CPUs this process may run on.
std::vector<int> available_cpus();

/// Results are in input order; a failing run never aborts the batch.
std::vector<RunResult> run_batch(const std::vector<RunSpec>& specs, const BatchOptions& options);

}  // namespace svbench::exec
