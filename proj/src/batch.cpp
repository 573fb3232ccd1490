#include <sched.h>

#include <atomic>
#include <thread>

#include "svbench/executor.hpp"

namespace svbench::exec {

std::vector<int> available_cpus() {
  std::vector<int> cpus;
  cpu_set_t set;
  CPU_ZERO(&set);
  if (sched_getaffinity(0, sizeof set, &set) == 0) {
    for (int c = 0; c < CPU_SETSIZE; ++c) {
      if (CPU_ISSET(c, &set)) cpus.push_back(c);
    }
  }
  return cpus;
}

std::vector<std::vector<int>> plan_core_sets(unsigned slots, unsigned cores_per_run,
                                             const std::vector<int>& host_cpus) {
  if (slots == 0 || cores_per_run == 0) return {};
  if (static_cast<std::size_t>(slots) * cores_per_run > host_cpus.size()) return {};
  std::vector<std::vector<int>> sets(slots);
  for (unsigned s = 0; s < slots; ++s) {
    sets[s].assign(host_cpus.begin() + s * cores_per_run, host_cpus.begin() + (s + 1) * cores_per_run);
  }
  return sets;
}

std::vector<RunResult> run_batch(const std::vector<RunSpec>& specs, const BatchOptions& options) {
  if (options.parallel_slots == 0) throw ExecError(ExecErrc::InvalidSpec, "parallel_slots must be at least 1");
  std::vector<RunResult> results(specs.size());
  if (specs.empty()) return results;

  const unsigned slots = static_cast<unsigned>(std::min<std::size_t>(options.parallel_slots, specs.size()));
  // Runs in one batch may ask for different core counts; plan with the largest.
  unsigned cores = 1;
  for (const auto& s : specs) cores = std::max(cores, s.limits.cpu_cores);
  const auto core_sets = options.pin_cores ? plan_core_sets(slots, cores, available_cpus())
                                           : std::vector<std::vector<int>>{};

  std::atomic<std::size_t> next{0};
  auto worker = [&](unsigned slot) {
    ExecOptions exec_options;
    exec_options.accounting = options.accounting;
    if (!core_sets.empty()) exec_options.cpu_set = core_sets[slot];
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        results[i] = execute_run(specs[i], exec_options);
      } catch (const std::exception& e) {
        results[i].reason = {TerminationKind::HarnessError, e.what()};
        results[i].core_limit_mode = "unenforced";
      }
    }
  };

  std::vector<std::jthread> threads;
  threads.reserve(slots);
  for (unsigned s = 0; s < slots; ++s) threads.emplace_back(worker, s);
  threads.clear();  // joins
  return results;
}

}  // namespace svbench::exec
