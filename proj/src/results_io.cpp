#include "svbench/results_io.hpp"

#include <unistd.h>
#include <zlib.h>

#include <cstdio>
#include <json.hpp>
#include <set>

namespace svbench::report {
namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "svbench-results";

json limits_to_json(const exec::ResourceLimits& l) {
  return {{"cpu_time_s", l.cpu_time_s},
          {"wall_time_s", l.wall_time_s},
          {"memory_bytes", l.memory_bytes},
          {"cpu_cores", l.cpu_cores}};
}

exec::ResourceLimits limits_from_json(const json& j) {
  exec::ResourceLimits l;
  l.cpu_time_s = j.at("cpu_time_s").get<double>();
  l.wall_time_s = j.at("wall_time_s").get<double>();
  l.memory_bytes = j.at("memory_bytes").get<std::uint64_t>();
  l.cpu_cores = j.at("cpu_cores").get<unsigned>();
  return l;
}

json record_to_json(const scoring::RunRecord& r) {
  json j = {{"task", r.task_name},
            {"property", r.property_file},
            {"verdict", to_string(r.verdict)},
            {"status", r.raw_status},
            {"expected", r.expected},
            {"cpu_time_s", r.cpu_time_s},
            {"wall_time_s", r.wall_time_s},
            {"peak_memory_bytes", r.peak_memory_bytes},
            {"termination", exec::to_string(r.termination)}};
  if (r.witness_path) j["witness"] = *r.witness_path;
  return j;
}

[[noreturn]] void corrupt(const std::string& why) { throw ResultsError(ResultsErrc::CorruptResults, why); }

scoring::RunRecord record_from_json(const json& j) {
  scoring::RunRecord r;
  r.task_name = j.at("task").get<std::string>();
  r.property_file = j.at("property").get<std::string>();
  auto verdict = parse_verdict(j.at("verdict").get<std::string>());
  if (!verdict) corrupt("unknown verdict in record");
  r.verdict = *verdict;
  r.raw_status = j.at("status").get<std::string>();
  r.expected = j.at("expected").get<bool>();
  r.cpu_time_s = j.at("cpu_time_s").get<double>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.peak_memory_bytes = j.at("peak_memory_bytes").get<std::uint64_t>();
  auto term = exec::parse_termination_kind(j.at("termination").get<std::string>());
  if (!term) corrupt("unknown termination kind in record");
  r.termination = *term;
  if (j.contains("witness")) r.witness_path = j.at("witness").get<std::string>();
  return r;
}

void check_unique(const std::vector<scoring::RunRecord>& records) {
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& r : records) {
    if (!keys.emplace(r.task_name, r.property_file).second) {
      throw ResultsError(ResultsErrc::DuplicateRecord,
                         "duplicate record for " + r.task_name + " / " + r.property_file);
    }
  }
}

std::string checksum_of(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return std::string("crc32:") + buf;
}

}  // namespace

std::string results_file_name(const std::string& tool_name, const std::string& stamp) {
  return tool_name + "-" + stamp + ".vres.gz";
}

void write_results(const ResultSet& rs, const fs::path& path) {
  check_unique(rs.records);

  json header = {{"format", kFormatTag},
                 {"format_version", rs.format_version},
                 {"tool", rs.tool_name},
                 {"version", rs.tool_version},
                 {"options", rs.options},
                 {"limits", limits_to_json(rs.limits)},
                 {"host", rs.host_fingerprint},
                 {"started_at", rs.started_at},
                 {"metadata", rs.metadata}};
  std::string body = header.dump() + "\n";
  for (const auto& r : rs.records) body += record_to_json(r).dump() + "\n";
  json trailer = {{"checksum", checksum_of(body)}, {"records", rs.records.size()}};
  const std::string content = body + trailer.dump() + "\n";

  const fs::path tmp = path.string() + ".tmp-" + std::to_string(getpid());
  gzFile gz = gzopen(tmp.c_str(), "wb");
  if (!gz) throw ResultsError(ResultsErrc::Io, "cannot open " + tmp.string() + " for writing");
  const int written = gzwrite(gz, content.data(), static_cast<unsigned>(content.size()));
  const int closed = gzclose(gz);
  if (written != static_cast<int>(content.size()) || closed != Z_OK) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw ResultsError(ResultsErrc::Io, "failed writing " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ResultsError(ResultsErrc::Io, "cannot move results into " + path.string());
  }
}

ResultSet load_results(const fs::path& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (!gz) throw ResultsError(ResultsErrc::Io, "cannot open " + path.string());
  std::string content;
  char buf[65536];
  int n;
  while ((n = gzread(gz, buf, sizeof buf)) > 0) content.append(buf, static_cast<std::size_t>(n));
  int errnum = Z_OK;
  gzerror(gz, &errnum);
  gzclose(gz);
  if (n < 0 || (errnum != Z_OK && errnum != Z_STREAM_END)) corrupt("compressed stream is damaged: " + path.string());

  std::vector<std::string> lines;
  for (std::size_t pos = 0; pos < content.size();) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) corrupt("results file ends mid-line");
    lines.push_back(content.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() < 2) corrupt("results file lacks header or checksum");

  ResultSet rs;
  try {
    const json header = json::parse(lines.front());
    if (header.value("format", "") != kFormatTag) corrupt("not a results file: " + path.string());
    rs.format_version = header.at("format_version").get<int>();
    if (rs.format_version != kResultsFormatVersion) {
      throw ResultsError(ResultsErrc::UnsupportedFormatVersion,
                         "unsupported results format version " + std::to_string(rs.format_version));
    }

    const json trailer = json::parse(lines.back());
    std::string body;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) body += lines[i] + "\n";
    if (!trailer.contains("checksum") || trailer.at("checksum").get<std::string>() != checksum_of(body)) {
      corrupt("checksum mismatch in " + path.string());
    }
    if (trailer.at("records").get<std::size_t>() != lines.size() - 2) corrupt("record count mismatch");

    rs.tool_name = header.at("tool").get<std::string>();
    rs.tool_version = header.at("version").get<std::string>();
    rs.options = header.at("options").get<std::vector<std::string>>();
    rs.limits = limits_from_json(header.at("limits"));
    rs.host_fingerprint = header.at("host").get<std::string>();
    rs.started_at = header.at("started_at").get<std::string>();
    rs.metadata = header.at("metadata").get<std::map<std::string, std::string>>();
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) rs.records.push_back(record_from_json(json::parse(lines[i])));
  } catch (const json::exception& e) {
    corrupt(std::string("malformed results file: ") + e.what());
  }
  check_unique(rs.records);
  return rs;
}

}  // namespace svbench::report
