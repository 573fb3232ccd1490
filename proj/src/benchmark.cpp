#include "svbench/benchmark.hpp"

#include <fnmatch.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "svbench/property.hpp"

namespace svbench::adapters {
namespace {

[[noreturn]] void malformed(const std::string& msg) { throw AdapterError(AdapterErrc::MalformedDefinition, msg); }

std::vector<std::string> options_list(const YAML::Node& node, const char* where) {
  std::vector<std::string> out;
  if (!node) return out;
  if (!node.IsSequence()) malformed(std::string(where) + " must be a list of strings");
  for (const auto& item : node) {
    if (!item.IsScalar()) malformed(std::string(where) + " entries must be strings");
    out.push_back(item.as<std::string>());
  }
  return out;
}

void check_glob(const std::string& glob) {
  if (glob.empty()) malformed("empty task glob");
  if (glob.front() == '/') malformed("task glob must be relative to the collection root: " + glob);
  for (const auto& part : fs::path(glob)) {
    if (part == "..") malformed("task glob leaves the collection root: " + glob);
  }
  int depth = 0;
  for (char c : glob) {
    if (c == '[') ++depth;
    if (c == ']' && depth > 0) --depth;
  }
  if (depth != 0) malformed("unbalanced '[' in task glob: " + glob);
}

LimitsOverride parse_limits(const YAML::Node& node) {
  if (!node.IsMap()) malformed("limits must be a mapping");
  LimitsOverride o;
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (key == "cpu_time_s") {
      o.cpu_time_s = kv.second.as<double>();
    } else if (key == "wall_time_s") {
      o.wall_time_s = kv.second.as<double>();
    } else if (key == "memory_bytes") {
      o.memory_bytes = kv.second.as<std::uint64_t>();
    } else if (key == "cpu_cores") {
      o.cpu_cores = kv.second.as<unsigned>();
    } else {
      malformed("unknown limit '" + key + "'");
    }
  }
  try {
    exec::validate(o.apply({}));
  } catch (const exec::ExecError& e) {
    malformed(std::string("invalid limits: ") + e.what());
  }
  return o;
}

const std::map<std::string, std::string> kDefaultEnvironment = {
    {"PATH", "/usr/local/sbin:/usr/local/bin:/usr/sbin:/usr/bin:/sbin:/bin"},
    {"LC_ALL", "C"},
};

}  // namespace

exec::ResourceLimits LimitsOverride::apply(exec::ResourceLimits base) const {
  if (cpu_time_s) base.cpu_time_s = *cpu_time_s;
  if (wall_time_s) base.wall_time_s = *wall_time_s;
  if (memory_bytes) base.memory_bytes = *memory_bytes;
  if (cpu_cores) base.cpu_cores = *cpu_cores;
  return base;
}

BenchmarkDefinition load_benchmark_definition(std::string_view text, const AdapterRegistry& registry) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    malformed(std::string("invalid YAML: ") + e.what());
  }
  if (!doc.IsMap()) malformed("benchmark definition must be a mapping");

  BenchmarkDefinition defn;
  try {
    if (!doc["tool"] || !doc["tool"].IsScalar()) malformed("missing tool");
    defn.tool_name = doc["tool"].as<std::string>();
    defn.global_options = options_list(doc["options"], "options");
    if (doc["limits"]) defn.limits_override = parse_limits(doc["limits"]);

    const YAML::Node sets = doc["run_sets"];
    if (!sets || !sets.IsSequence()) malformed("run_sets must be a list");
    for (const auto& node : sets) {
      if (!node.IsMap()) malformed("run set must be a mapping");
      RunSet rs;
      if (!node["name"] || !node["name"].IsScalar()) malformed("run set lacks a name");
      rs.name = node["name"].as<std::string>();
      rs.task_globs = options_list(node["tasks"], "tasks");
      if (rs.task_globs.empty()) malformed("run set " + rs.name + " has no task globs");
      for (const auto& g : rs.task_globs) check_glob(g);
      rs.options = options_list(node["options"], "run set options");
      defn.run_sets.push_back(std::move(rs));
    }
    if (defn.run_sets.empty()) malformed("benchmark definition has no run sets");
  } catch (const YAML::Exception& e) {
    malformed(std::string("invalid benchmark definition: ") + e.what());
  }

  if (!registry.find(defn.tool_name)) {
    throw AdapterError(AdapterErrc::UnknownTool, "no adapter registered for tool '" + defn.tool_name + "'");
  }
  return defn;
}

std::vector<fs::path> match_tasks(const RunSet& run_set, const fs::path& collection_root) {
  std::vector<fs::path> candidates;
  if (!fs::is_directory(collection_root)) return candidates;
  for (const auto& entry : fs::recursive_directory_iterator(collection_root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".yml") {
      candidates.push_back(entry.path().lexically_relative(collection_root));
    }
  }
  std::vector<fs::path> matched;
  for (const auto& rel : candidates) {
    const std::string s = rel.generic_string();
    for (const auto& glob : run_set.task_globs) {
      if (fnmatch(glob.c_str(), s.c_str(), FNM_PATHNAME) == 0) {
        matched.push_back(rel);
        break;
      }
    }
  }
  std::sort(matched.begin(), matched.end());
  return matched;
}

Expansion expand_runs(const BenchmarkDefinition& defn, const AdapterRegistry& registry,
                      const fs::path& collection_root, const exec::ResourceLimits& base_limits) {
  const ToolAdapter* adapter = registry.find(defn.tool_name);
  if (!adapter) throw AdapterError(AdapterErrc::UnknownTool, "no adapter registered for tool '" + defn.tool_name + "'");

  const fs::path root = fs::absolute(collection_root).lexically_normal();
  const exec::ResourceLimits limits = defn.limits_override ? defn.limits_override->apply(base_limits) : base_limits;
  std::map<std::string, std::string> environment = kDefaultEnvironment;
  for (const auto& [k, v] : adapter->environment) environment[k] = v;

  Expansion out;
  for (const RunSet& rs : defn.run_sets) {
    std::vector<std::string> options = defn.global_options;
    options.insert(options.end(), rs.options.begin(), rs.options.end());

    for (const fs::path& rel : match_tasks(rs, root)) {
      task::TaskDefinition task;
      try {
        task = task::load_task_file(root / rel, root);
      } catch (const task::TaskError& e) {
        out.skipped.push_back({rs.name, rel, e.what()});
        continue;
      }
      fs::path id = rel;
      id.replace_extension();
      for (const auto& expected : task.properties) {
        const fs::path prp = task.resolve(expected.property_file);
        const fs::path prp_rel = prp.lexically_relative(root);
        std::ifstream in(prp);
        std::ostringstream text;
        text << in.rdbuf();
        try {
          task::parse_property(text.str());
        } catch (const task::PropertyError& e) {
          out.skipped.push_back({rs.name, rel, prp_rel.generic_string() + ": " + e.what()});
          continue;
        }

        PlannedRun run;
        run.run_set = rs.name;
        run.task_id = id.generic_string();
        run.property = prp_rel;
        run.expected = expected;
        try {
          run.spec.argv = build_cmdline(*adapter, task, prp, options, root);
        } catch (const AdapterError& e) {
          out.skipped.push_back({rs.name, rel, e.what()});
          continue;
        }
        run.spec.working_dir = root;
        run.spec.environment = environment;
        run.spec.limits = limits;
        run.task = task;
        out.runs.push_back(std::move(run));
      }
    }
  }

  std::stable_sort(out.runs.begin(), out.runs.end(), [](const PlannedRun& a, const PlannedRun& b) {
    return std::tie(a.run_set, a.task_id, a.property) < std::tie(b.run_set, b.task_id, b.property);
  });
  return out;
}

}  // namespace svbench::adapters
