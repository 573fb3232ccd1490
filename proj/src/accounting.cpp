#include "accounting.hpp"

#include <dirent.h>
#include <signal.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace svbench::exec::detail {
namespace {

std::uint64_t clock_ticks() {
  static const std::uint64_t ticks = static_cast<std::uint64_t>(sysconf(_SC_CLK_TCK));
  return ticks;
}

std::uint64_t page_size() {
  static const std::uint64_t size = static_cast<std::uint64_t>(sysconf(_SC_PAGESIZE));
  return size;
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& value) {
  std::ofstream out(path);
  if (!out) return false;
  out << value;
  out.flush();
  return static_cast<bool>(out);
}

template <typename T>
bool parse_num(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p != s.data();
}

}  // namespace

std::optional<ProcInfo> read_proc(pid_t pid) {
  auto text = slurp("/proc/" + std::to_string(pid) + "/stat");
  if (!text) return std::nullopt;
  std::size_t close = text->rfind(')');
  if (close == std::string::npos) return std::nullopt;

  // Fields from 3 (state) onwards, split on spaces.
  std::vector<std::string_view> f;
  std::string_view rest(*text);
  rest.remove_prefix(close + 2);
  while (!rest.empty()) {
    std::size_t sp = rest.find(' ');
    f.push_back(rest.substr(0, sp));
    if (sp == std::string_view::npos) break;
    rest.remove_prefix(sp + 1);
  }
  // state=3 ... rss=24, so index = field - 3.
  if (f.size() < 22 || f[0].empty()) return std::nullopt;
  ProcInfo info;
  info.pid = pid;
  info.state = f[0][0];
  long long rss = 0;
  if (!parse_num(f[1], info.ppid) || !parse_num(f[2], info.pgrp) || !parse_num(f[3], info.session) ||
      !parse_num(f[11], info.utime_ticks) || !parse_num(f[12], info.stime_ticks) ||
      !parse_num(f[19], info.start_ticks) || !parse_num(f[21], rss)) {
    return std::nullopt;
  }
  info.rss_pages = rss > 0 ? static_cast<std::uint64_t>(rss) : 0;
  return info;
}

std::vector<ProcInfo> scan_proc() {
  std::vector<ProcInfo> out;
  DIR* dir = opendir("/proc");
  if (!dir) return out;
  while (dirent* ent = readdir(dir)) {
    pid_t pid = 0;
    std::string_view name(ent->d_name);
    if (!parse_num(name, pid) || std::to_string(pid) != name) continue;
    if (auto info = read_proc(pid)) out.push_back(*info);
  }
  closedir(dir);
  return out;
}

Sample SamplingAccounting::sample() {
  Sample s;
  if (root_ <= 0) return s;
  const std::vector<ProcInfo> all = scan_proc();

  // Session/group members plus anything descended from them.
  std::map<pid_t, const ProcInfo*> members;
  for (const auto& p : all) {
    if (p.pid == root_ || p.session == root_ || p.pgrp == root_) members.emplace(p.pid, &p);
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& p : all) {
      if (!members.count(p.pid) && members.count(p.ppid)) {
        members.emplace(p.pid, &p);
        grew = true;
      }
    }
  }

  live_.clear();
  for (const auto& [pid, p] : members) {
    Key key{pid, p->start_ticks};
    std::uint64_t ticks = p->utime_ticks + p->stime_ticks;
    auto it = std::find_if(seen_ticks_.begin(), seen_ticks_.end(), [&](const auto& e) { return e.first == key; });
    if (it == seen_ticks_.end()) {
      seen_ticks_.emplace_back(key, ticks);
    } else {
      it->second = std::max(it->second, ticks);
    }
    if (p->alive()) {
      live_.push_back(pid);
      s.rss_bytes += p->rss_pages * page_size();
    }
  }
  std::uint64_t total = 0;
  for (const auto& e : seen_ticks_) total += e.second;
  s.cpu_time_s = static_cast<double>(total) / static_cast<double>(clock_ticks());
  s.live_processes = live_.size();
  return s;
}

void SamplingAccounting::signal_all(int sig) {
  if (root_ <= 0) return;
  kill(-root_, sig);
  for (pid_t pid : live_) kill(pid, sig);
}

namespace {

// Mount point of the cgroup2 hierarchy joined with this process's cgroup path.
std::optional<std::string> cgroup2_base() {
  auto mountinfo = slurp("/proc/self/mountinfo");
  auto self = slurp("/proc/self/cgroup");
  if (!mountinfo || !self) return std::nullopt;

  std::string mount_point, mount_root;
  std::istringstream lines(*mountinfo);
  for (std::string line; std::getline(lines, line);) {
    std::size_t dash = line.find(" - ");
    if (dash == std::string::npos) continue;
    std::istringstream tail(line.substr(dash + 3));
    std::string fstype;
    tail >> fstype;
    if (fstype != "cgroup2") continue;
    std::istringstream head(line.substr(0, dash));
    std::string id, parent, dev;
    head >> id >> parent >> dev >> mount_root >> mount_point;
    break;
  }
  if (mount_point.empty()) return std::nullopt;

  std::string path;
  std::istringstream cg(*self);
  for (std::string line; std::getline(cg, line);) {
    if (line.rfind("0::", 0) == 0) path = line.substr(3);
  }
  if (path.empty()) return std::nullopt;
  // Paths are relative to the mount's root when the hierarchy is bind-mounted.
  if (mount_root != "/" && path.rfind(mount_root, 0) == 0) path = path.substr(mount_root.size());
  if (path == "/") path.clear();
  return mount_point + path;
}

std::atomic<unsigned> cgroup_counter{0};

}  // namespace

CgroupAccounting::CgroupAccounting() {
  auto base = cgroup2_base();
  if (!base) throw ExecError(ExecErrc::SupervisionUnavailable, "no cgroup2 hierarchy mounted");
  dir_ = *base + "/svbench-" + std::to_string(getpid()) + "-" + std::to_string(cgroup_counter++);
  if (mkdir(dir_.c_str(), 0755) != 0) {
    throw ExecError(ExecErrc::SupervisionUnavailable,
                    "cannot create cgroup " + dir_ + ": " + std::strerror(errno));
  }
}

CgroupAccounting::~CgroupAccounting() {
  for (int attempt = 0; attempt < 50; ++attempt) {
    signal_all(SIGKILL);
    if (rmdir(dir_.c_str()) == 0 || errno == ENOENT) return;
    usleep(20'000);
  }
}

void CgroupAccounting::attach(pid_t root) {
  if (!write_file(dir_ + "/cgroup.procs", std::to_string(root))) {
    throw ExecError(ExecErrc::SupervisionUnavailable, "cannot move process into " + dir_);
  }
}

std::vector<pid_t> CgroupAccounting::members() const {
  std::vector<pid_t> pids;
  auto text = slurp(dir_ + "/cgroup.procs");
  if (!text) return pids;
  std::istringstream in(*text);
  for (pid_t pid; in >> pid;) pids.push_back(pid);
  return pids;
}

Sample CgroupAccounting::sample() {
  Sample s;
  if (auto stat = slurp(dir_ + "/cpu.stat")) {
    std::istringstream in(*stat);
    std::string key;
    std::uint64_t value = 0;
    while (in >> key >> value) {
      if (key == "usage_usec") s.cpu_time_s = static_cast<double>(value) / 1e6;
    }
  }
  std::optional<std::uint64_t> cg_memory;
  if (auto current = slurp(dir_ + "/memory.current")) {
    std::uint64_t v = 0;
    if (parse_num(std::string_view(*current), v)) cg_memory = v;
  }
  for (pid_t pid : members()) {
    auto info = read_proc(pid);
    if (!info || !info->alive()) continue;
    ++s.live_processes;
    s.rss_bytes += info->rss_pages * page_size();
  }
  if (cg_memory) s.rss_bytes = std::max(s.rss_bytes, *cg_memory);
  return s;
}

void CgroupAccounting::signal_all(int sig) {
  if (sig == SIGKILL && access((dir_ + "/cgroup.kill").c_str(), W_OK) == 0) write_file(dir_ + "/cgroup.kill", "1");
  for (pid_t pid : members()) kill(pid, sig);
}

std::optional<std::string> CgroupAccounting::apply_core_quota(unsigned cores) {
  const std::string file = dir_ + "/cpu.max";
  if (access(file.c_str(), W_OK) != 0) return std::nullopt;
  if (!write_file(file, std::to_string(cores * 100000ULL) + " 100000")) return std::nullopt;
  return "quota:" + std::to_string(cores);
}

bool CgroupAccounting::apply_memory_limit(std::uint64_t bytes) {
  const std::string file = dir_ + "/memory.max";
  if (access(file.c_str(), W_OK) != 0) return false;
  write_file(dir_ + "/memory.swap.max", "0");
  return write_file(file, std::to_string(bytes));
}

bool CgroupAccounting::memory_limit_hit() {
  auto events = slurp(dir_ + "/memory.events");
  if (!events) return false;
  std::istringstream in(*events);
  std::string key;
  std::uint64_t value = 0;
  while (in >> key >> value) {
    if (key == "oom_kill" && value > 0) return true;
  }
  return false;
}

std::unique_ptr<Accounting> make_accounting(AccountingMode mode) {
  switch (mode) {
    case AccountingMode::Sampling:
      return std::make_unique<SamplingAccounting>();
    case AccountingMode::Strict:
      return std::make_unique<CgroupAccounting>();
    case AccountingMode::Auto:
      try {
        return std::make_unique<CgroupAccounting>();
      } catch (const ExecError&) {
        return std::make_unique<SamplingAccounting>();
      }
  }
  return std::make_unique<SamplingAccounting>();
}

}  // namespace svbench::exec::detail

namespace svbench::exec {

bool strict_accounting_available() {
  try {
    detail::CgroupAccounting probe;
    return true;
  } catch (const ExecError&) {
    return false;
  }
}

}  // namespace svbench::exec
