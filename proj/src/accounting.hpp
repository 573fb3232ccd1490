#pragma once

#include <sys/types.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svbench/executor.hpp"

namespace svbench::exec::detail {

struct ProcInfo {
  pid_t pid = 0;
  pid_t ppid = 0;
  pid_t pgrp = 0;
  pid_t session = 0;
  char state = '?';
  std::uint64_t utime_ticks = 0;
  std::uint64_t stime_ticks = 0;
  std::uint64_t start_ticks = 0;
  std::uint64_t rss_pages = 0;

  bool alive() const { return state != 'Z' && state != 'X' && state != 'x'; }
};

std::optional<ProcInfo> read_proc(pid_t pid);
std::vector<ProcInfo> scan_proc();

struct Sample {
  double cpu_time_s = 0;
  std::uint64_t rss_bytes = 0;
  std::size_t live_processes = 0;
};

/// Tracks one run's process tree. Not thread-safe; owned by one supervisor.
class Accounting {
 public:
  virtual ~Accounting() = default;
  virtual std::string_view name() const = 0;
  /// Called in the parent once the child exists but before it execs.
  virtual void attach(pid_t root) = 0;
  virtual Sample sample() = 0;
  virtual void signal_all(int sig) = 0;
  /// Returns the mode string ("quota:<n>") when a CPU quota was applied.
  virtual std::optional<std::string> apply_core_quota(unsigned /*cores*/) { return std::nullopt; }
  /// True when the kernel killed a process for exceeding a memory limit we set.
  virtual bool memory_limit_hit() { return false; }
  virtual bool apply_memory_limit(std::uint64_t /*bytes*/) { return false; }
};

/// Sums the tree rooted at the session via periodic /proc scans. Processes
/// that live shorter than one sampling interval may be missed.
class SamplingAccounting final : public Accounting {
 public:
  std::string_view name() const override { return "proc-sampling"; }
  void attach(pid_t root) override { root_ = root; }
  Sample sample() override;
  void signal_all(int sig) override;

 private:
  struct Key {
    pid_t pid;
    std::uint64_t start;
    auto operator<=>(const Key&) const = default;
  };
  pid_t root_ = 0;
  std::vector<std::pair<Key, std::uint64_t>> seen_ticks_;
  std::vector<pid_t> live_;
};

/// A dedicated cgroup v2 directory: exact CPU usage of every member, dead or alive.
class CgroupAccounting final : public Accounting {
 public:
  /// Throws ExecError(SupervisionUnavailable) when no writable cgroup2 hierarchy exists.
  CgroupAccounting();
  ~CgroupAccounting() override;
  CgroupAccounting(const CgroupAccounting&) = delete;
  CgroupAccounting& operator=(const CgroupAccounting&) = delete;

  std::string_view name() const override { return "cgroup2"; }
  void attach(pid_t root) override;
  Sample sample() override;
  void signal_all(int sig) override;
  std::optional<std::string> apply_core_quota(unsigned cores) override;
  bool apply_memory_limit(std::uint64_t bytes) override;
  bool memory_limit_hit() override;

 private:
  std::vector<pid_t> members() const;
  std::string dir_;
};

std::unique_ptr<Accounting> make_accounting(AccountingMode mode);

}  // namespace svbench::exec::detail
