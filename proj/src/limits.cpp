#include <cmath>

#include "svbench/executor.hpp"

namespace svbench::exec {

void validate(const ResourceLimits& limits) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0; };
  if (!positive(limits.cpu_time_s)) throw ExecError(ExecErrc::InvalidSpec, "cpu_time_s must be positive");
  if (!positive(limits.wall_time_s)) throw ExecError(ExecErrc::InvalidSpec, "wall_time_s must be positive");
  if (limits.memory_bytes == 0) throw ExecError(ExecErrc::InvalidSpec, "memory_bytes must be positive");
  if (limits.cpu_cores == 0) throw ExecError(ExecErrc::InvalidSpec, "cpu_cores must be positive");
}

std::string_view to_string(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::Normal: return "NORMAL";
    case TerminationKind::CpuTimeout: return "CPU_TIMEOUT";
    case TerminationKind::WallTimeout: return "WALL_TIMEOUT";
    case TerminationKind::OutOfMemory: return "OUT_OF_MEMORY";
    case TerminationKind::Signaled: return "SIGNALED";
    case TerminationKind::HarnessError: return "HARNESS_ERROR";
  }
  return "HARNESS_ERROR";
}

std::optional<TerminationKind> parse_termination_kind(std::string_view text) {
  for (auto k : {TerminationKind::Normal, TerminationKind::CpuTimeout, TerminationKind::WallTimeout,
                 TerminationKind::OutOfMemory, TerminationKind::Signaled, TerminationKind::HarnessError}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

}  // namespace svbench::exec
