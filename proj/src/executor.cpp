#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <cstdlib>
#include <thread>

#include "accounting.hpp"
#include "svbench/executor.hpp"

namespace svbench::exec {
namespace {

using Clock = std::chrono::steady_clock;
using namespace std::chrono_literals;

constexpr auto kSampleInterval = 100ms;
constexpr auto kKillGrace = 1s;
constexpr auto kReapDeadline = 5s;
constexpr auto kDrainDeadline = 1s;

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
  int fds[2];
  if (pipe2(fds, O_CLOEXEC) != 0) throw std::runtime_error(std::string("pipe2: ") + std::strerror(errno));
  return {Fd(fds[0]), Fd(fds[1])};
}

std::optional<std::string> resolve_executable(const RunSpec& spec) {
  const std::string& name = spec.argv.front();
  auto runnable = [](const fs::path& p) { return fs::is_regular_file(p) && access(p.c_str(), X_OK) == 0; };
  if (name.find('/') != std::string::npos) {
    fs::path p(name);
    if (p.is_relative() && !spec.working_dir.empty()) p = spec.working_dir / p;
    if (runnable(p)) return fs::absolute(p).string();
    return std::nullopt;
  }
  std::string path;
  if (auto it = spec.environment.find("PATH"); it != spec.environment.end()) {
    path = it->second;
  } else if (const char* env = std::getenv("PATH")) {
    path = env;
  }
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t colon = path.find(':', start);
    std::string dir = path.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    fs::path candidate = fs::path(dir.empty() ? "." : dir) / name;
    if (runnable(candidate)) return fs::absolute(candidate).string();
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  return std::nullopt;
}

std::string describe_cpus(const std::vector<int>& cpus) {
  std::string s;
  for (std::size_t i = 0; i < cpus.size(); ++i) s += (i ? "," : "") + std::to_string(cpus[i]);
  return s;
}

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

RunResult harness_error(std::string detail, std::string_view backend = {}) {
  RunResult r;
  r.reason = {TerminationKind::HarnessError, std::move(detail)};
  r.accounting_backend = std::string(backend);
  r.core_limit_mode = "unenforced";
  return r;
}

// Stage codes reported through the exec-status pipe.
enum : int { kStageChdir = 1, kStageExec = 2, kStageAffinity = 3, kStageStdin = 4 };

class OutputSink {
 public:
  explicit OutputSink(std::uint64_t cap) : cap_(cap) {}
  void append(const char* data, std::size_t n) {
    std::size_t room = text_.size() < cap_ ? static_cast<std::size_t>(cap_ - text_.size()) : 0;
    std::size_t take = std::min(room, n);
    text_.append(data, take);
    if (take < n) truncated_ = true;
  }
  /// Reads until EAGAIN; returns false on EOF.
  bool drain(int fd) {
    char buf[65536];
    while (true) {
      ssize_t n = ::read(fd, buf, sizeof buf);
      if (n > 0) {
        append(buf, static_cast<std::size_t>(n));
        continue;
      }
      if (n == 0) return false;
      if (errno == EINTR) continue;
      return !(errno != EAGAIN && errno != EWOULDBLOCK);
    }
  }
  std::string finish(bool& truncated) {
    truncated = truncated_;
    if (truncated_) text_ += "\n[svbench: output truncated at " + std::to_string(cap_) + " bytes]\n";
    return std::move(text_);
  }

 private:
  std::uint64_t cap_;
  std::string text_;
  bool truncated_ = false;
};

}  // namespace

RunResult execute_run(const RunSpec& spec, const ExecOptions& options) {
  validate(spec.limits);
  std::unique_ptr<detail::Accounting> acct = detail::make_accounting(options.accounting);
  const std::string backend(acct->name());

  if (spec.argv.empty()) return harness_error("empty argv", backend);
  auto executable = resolve_executable(spec);
  if (!executable) return harness_error("spawn failed: executable not found: " + spec.argv.front(), backend);

  // Everything the child needs is built before fork.
  std::vector<std::string> env_strings;
  for (const auto& [k, v] : spec.environment) env_strings.push_back(k + "=" + v);
  std::vector<char*> argv, envp;
  for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  for (auto& e : env_strings) envp.push_back(e.data());
  envp.push_back(nullptr);
  const std::string workdir = spec.working_dir.empty() ? std::string(".") : spec.working_dir.string();
  cpu_set_t cpus;
  CPU_ZERO(&cpus);
  for (int c : options.cpu_set) CPU_SET(c, &cpus);
  const bool pin = !options.cpu_set.empty();

  auto [out_r, out_w] = make_pipe();
  auto [go_r, go_w] = make_pipe();
  auto [status_r, status_w] = make_pipe();

  pid_t pid = fork();
  if (pid < 0) return harness_error(std::string("fork: ") + std::strerror(errno), backend);
  if (pid == 0) {
    setsid();
    char go = 0;
    while (::read(go_r.get(), &go, 1) < 0 && errno == EINTR) {
    }
    auto report = [&](int stage) {
      int msg[2] = {stage, errno};
      [[maybe_unused]] auto n = ::write(status_w.get(), msg, sizeof msg);
      _exit(127);
    };
    if (pin && sched_setaffinity(0, sizeof cpus, &cpus) != 0) report(kStageAffinity);
    if (chdir(workdir.c_str()) != 0) report(kStageChdir);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull < 0 || dup2(devnull, 0) < 0) report(kStageStdin);
    dup2(out_w.get(), 1);
    dup2(out_w.get(), 2);
    execve(executable->c_str(), argv.data(), envp.data());
    report(kStageExec);
  }

  out_w.reset();
  go_r.reset();
  status_w.reset();

  RunResult result;
  result.accounting_backend = backend;
  if (pin) {
    result.core_limit_mode = "pinned:" + describe_cpus(options.cpu_set);
  } else {
    result.core_limit_mode = "unenforced";
  }

  auto abort_child = [&](const std::string& why) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    auto r = harness_error(why, backend);
    r.core_limit_mode = result.core_limit_mode;
    return r;
  };

  bool memory_enforced_by_kernel = false;
  try {
    acct->attach(pid);
    if (!pin) {
      if (auto quota = acct->apply_core_quota(spec.limits.cpu_cores)) result.core_limit_mode = *quota;
    }
    memory_enforced_by_kernel = acct->apply_memory_limit(spec.limits.memory_bytes);
  } catch (const std::exception& e) {
    return abort_child(std::string("supervision setup failed: ") + e.what());
  }

  const Clock::time_point start = Clock::now();
  char go = 1;
  if (::write(go_w.get(), &go, 1) != 1) return abort_child("cannot release child");
  go_w.reset();

  int msg[2] = {0, 0};
  ssize_t got;
  do {
    got = ::read(status_r.get(), msg, sizeof msg);
  } while (got < 0 && errno == EINTR);
  if (got == static_cast<ssize_t>(sizeof msg)) {
    waitpid(pid, nullptr, 0);
    const char* stage = msg[0] == kStageExec ? "exec" : msg[0] == kStageChdir ? "chdir" : msg[0] == kStageAffinity ? "sched_setaffinity" : "stdin";
    auto r = harness_error(std::string("spawn failed: ") + stage + ": " + std::strerror(msg[1]), backend);
    r.core_limit_mode = result.core_limit_mode;
    return r;
  }
  status_r.reset();

  fcntl(out_r.get(), F_SETFL, fcntl(out_r.get(), F_GETFL) | O_NONBLOCK);
  OutputSink sink(spec.output_cap_bytes);
  bool output_open = true;

  const auto& limits = spec.limits;
  std::optional<TerminationKind> limit_fired;
  Clock::time_point fired_at{};
  bool hard_killed = false;
  bool main_exited = false;
  int status = 0;
  rusage usage{};
  Clock::time_point end = start;
  double cpu = 0;
  std::uint64_t peak = 0;
  Clock::time_point next_sample = start;

  auto take_sample = [&] {
    detail::Sample s = acct->sample();
    cpu = std::max(cpu, s.cpu_time_s);
    peak = std::max(peak, s.rss_bytes);
    return s;
  };

  try {
    while (!main_exited) {
      auto now = Clock::now();
      auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next_sample - now);
      int timeout = static_cast<int>(std::clamp<std::int64_t>(wait.count(), 0, 100));
      if (output_open) {
        pollfd pfd{out_r.get(), POLLIN, 0};
        if (poll(&pfd, 1, timeout) > 0) output_open = sink.drain(out_r.get());
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(timeout));
      }

      pid_t r = wait4(pid, &status, WNOHANG, &usage);
      now = Clock::now();
      if (r == pid) {
        main_exited = true;
        end = now;
      }
      if (now >= next_sample || main_exited) {
        take_sample();
        next_sample = now + kSampleInterval;
      }

      if (!limit_fired && !main_exited) {
        if (cpu >= limits.cpu_time_s) {
          limit_fired = TerminationKind::CpuTimeout;
        } else if (seconds(now - start) >= limits.wall_time_s) {
          limit_fired = TerminationKind::WallTimeout;
        } else if (peak > limits.memory_bytes) {
          limit_fired = TerminationKind::OutOfMemory;
        }
        if (limit_fired) {
          fired_at = now;
          acct->signal_all(SIGTERM);
        }
      }
      if (limit_fired && !hard_killed && now - fired_at >= kKillGrace) {
        acct->signal_all(SIGKILL);
        hard_killed = true;
      }
    }

    // The tool is gone; nothing it started may outlive the run.
    const auto reap_deadline = Clock::now() + kReapDeadline;
    while (true) {
      detail::Sample s = take_sample();
      if (s.live_processes == 0) break;
      acct->signal_all(SIGKILL);
      if (Clock::now() >= reap_deadline) break;
      std::this_thread::sleep_for(10ms);
    }

    const auto drain_deadline = Clock::now() + kDrainDeadline;
    while (output_open && Clock::now() < drain_deadline) {
      pollfd pfd{out_r.get(), POLLIN, 0};
      if (poll(&pfd, 1, 50) > 0) output_open = sink.drain(out_r.get());
    }
  } catch (const std::exception& e) {
    acct->signal_all(SIGKILL);
    if (!main_exited) waitpid(pid, nullptr, 0);
    return harness_error(std::string("supervision failed: ") + e.what(), backend);
  }

  const double rusage_cpu = static_cast<double>(usage.ru_utime.tv_sec + usage.ru_stime.tv_sec) +
                            static_cast<double>(usage.ru_utime.tv_usec + usage.ru_stime.tv_usec) / 1e6;
  cpu = std::max(cpu, rusage_cpu);
  peak = std::max<std::uint64_t>(peak, static_cast<std::uint64_t>(usage.ru_maxrss) * 1024ULL);

  if (!limit_fired && memory_enforced_by_kernel && acct->memory_limit_hit()) {
    limit_fired = TerminationKind::OutOfMemory;
  }

  result.output = sink.finish(result.output_truncated);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);

  Measurement& m = result.measurement;
  m.cpu_time_s = std::min(cpu, limits.cpu_time_s);
  m.wall_time_s = std::min(seconds(end - start), limits.wall_time_s + seconds(kKillGrace));
  m.peak_memory_bytes = peak;

  if (limit_fired) {
    result.reason.kind = *limit_fired;
    switch (*limit_fired) {
      case TerminationKind::CpuTimeout:
        m.cpu_time_s = limits.cpu_time_s;
        result.reason.detail = "cpu time limit reached";
        break;
      case TerminationKind::WallTimeout:
        m.wall_time_s = limits.wall_time_s;
        result.reason.detail = "wall time limit reached";
        break;
      default:
        result.reason.detail = "memory limit exceeded";
        break;
    }
  } else if (WIFSIGNALED(status)) {
    result.reason = {TerminationKind::Signaled, std::string("killed by signal ") + std::to_string(WTERMSIG(status)) +
                                                    " (" + strsignal(WTERMSIG(status)) + ")"};
  } else {
    result.reason = {TerminationKind::Normal, {}};
  }
  return result;
}

}  // namespace svbench::exec
