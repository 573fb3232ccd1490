#include "svbench/task_model.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace svbench::task {
namespace {

[[noreturn]] void malformed(const std::string& msg) { throw TaskError(TaskErrc::MalformedTask, msg); }

bool escapes(const fs::path& root, const fs::path& p) {
  fs::path rel = p.lexically_normal().lexically_relative(root.lexically_normal());
  if (rel.empty()) return true;
  return *rel.begin() == "..";
}

fs::path normalized_relative(const std::string& raw, const char* key) {
  if (raw.empty()) malformed(std::string(key) + " entry is empty");
  fs::path p(raw);
  if (p.is_absolute()) malformed(std::string(key) + " entry must be relative: " + raw);
  return p.lexically_normal();
}

void check_inside(const ParseOptions& options, const fs::path& resolved, const fs::path& rel) {
  if (options.collection_root && escapes(fs::absolute(*options.collection_root), fs::absolute(resolved))) {
    throw TaskError(TaskErrc::PathEscapesRoot, "path escapes the collection root: " + rel.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TaskDefinition parse_task_definition(std::string_view text, const fs::path& base_dir, const ParseOptions& options) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    malformed(std::string("invalid YAML: ") + e.what());
  }
  if (!doc.IsMap()) malformed("task definition must be a mapping");

  TaskDefinition task;
  task.name = options.name.empty() ? "task" : options.name;
  task.base_dir = base_dir;

  try {
    const YAML::Node version = doc["format_version"];
    if (!version || !version.IsScalar()) malformed("missing format_version");
    task.format_version = version.as<std::string>();

    const YAML::Node inputs = doc["input_files"];
    if (!inputs) malformed("missing input_files");
    std::vector<std::string> raw_inputs;
    if (inputs.IsScalar()) {
      raw_inputs.push_back(inputs.as<std::string>());
    } else if (inputs.IsSequence()) {
      for (const auto& item : inputs) {
        if (!item.IsScalar()) malformed("input_files entries must be strings");
        raw_inputs.push_back(item.as<std::string>());
      }
    } else {
      malformed("input_files must be a list of strings");
    }
    if (raw_inputs.empty()) malformed("input_files is empty");

    for (const auto& raw : raw_inputs) {
      fs::path rel = normalized_relative(raw, "input_files");
      fs::path resolved = task.resolve(rel);
      check_inside(options, resolved, rel);
      if (!fs::exists(resolved)) throw TaskError(TaskErrc::MissingInputFile, "input file not found: " + raw);
      task.input_files.push_back(rel);
    }

    const YAML::Node props = doc["properties"];
    if (!props || !props.IsSequence()) malformed("properties must be a list");
    std::set<fs::path> seen;
    for (const auto& prop : props) {
      if (!prop.IsMap()) malformed("property entries must be mappings");
      const YAML::Node file = prop["property_file"];
      if (!file || !file.IsScalar()) malformed("property entry lacks property_file");
      const YAML::Node verdict = prop["expected_verdict"];
      if (!verdict || !verdict.IsScalar()) malformed("property entry lacks expected_verdict");

      ExpectedVerdict ev;
      ev.property_file = normalized_relative(file.as<std::string>(), "property_file");
      try {
        ev.holds = verdict.as<bool>();
      } catch (const YAML::Exception&) {
        malformed("expected_verdict must be a boolean");
      }
      fs::path resolved = task.resolve(ev.property_file);
      check_inside(options, resolved, ev.property_file);
      if (!fs::is_regular_file(resolved)) {
        throw TaskError(TaskErrc::MissingInputFile, "property file not found: " + ev.property_file.string());
      }
      if (!seen.insert(ev.property_file).second) {
        throw TaskError(TaskErrc::DuplicateProperty, "property listed twice: " + ev.property_file.string());
      }
      task.properties.push_back(std::move(ev));
    }
    if (task.properties.empty()) malformed("properties is empty");
  } catch (const YAML::Exception& e) {
    malformed(std::string("invalid task definition: ") + e.what());
  }
  return task;
}

TaskDefinition load_task_file(const fs::path& yml, const std::optional<fs::path>& collection_root) {
  std::ifstream in(yml, std::ios::binary);
  if (!in) throw TaskError(TaskErrc::MissingInputFile, "cannot read task file: " + yml.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ParseOptions options{yml.stem().string(), collection_root};
  return parse_task_definition(ss.str(), yml.parent_path(), options);
}

std::vector<fs::path> expand_input_files(const TaskDefinition& task) {
  std::set<fs::path> files;
  for (const auto& rel : task.input_files) {
    fs::path resolved = task.resolve(rel);
    if (fs::is_directory(resolved)) {
      for (const auto& entry : fs::recursive_directory_iterator(resolved)) {
        if (entry.is_regular_file()) files.insert(entry.path().lexically_normal());
      }
    } else if (fs::exists(resolved)) {
      files.insert(resolved);
    }
  }
  return {files.begin(), files.end()};
}

std::vector<fs::path> expand_java_sources(const TaskDefinition& task) {
  std::vector<fs::path> out;
  for (auto& f : expand_input_files(task)) {
    if (f.extension() == ".java") out.push_back(std::move(f));
  }
  return out;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::MissingEntryPoint: return "MissingEntryPoint";
    case Rule::MissingLicenseHeader: return "MissingLicenseHeader";
    case Rule::ForbiddenBinaryDependency: return "ForbiddenBinaryDependency";
    case Rule::NondeterminismOutsideVerifier: return "NondeterminismOutsideVerifier";
  }
  return "?";
}

std::string_view to_string(Severity severity) { return severity == Severity::Error ? "error" : "warning"; }

namespace {

const std::regex& main_method_re() {
  static const std::regex re(
      R"((public\s+static|static\s+public)\s+(final\s+)?void\s+main\s*\(\s*(final\s+)?String\s*(\[\s*\]|\.\.\.))"
      R"(|(public\s+static|static\s+public)\s+(final\s+)?void\s+main\s*\(\s*(final\s+)?String\s+\w+\s*\[\s*\])");
  return re;
}
const std::regex& main_class_re() {
  static const std::regex re(R"(\bclass\s+Main\b)");
  return re;
}
const std::regex& package_re() {
  static const std::regex re(R"((^|\n)\s*package\s+[\w.]+\s*;)");
  return re;
}
const std::regex& random_re() {
  static const std::regex re(R"(\bRandom\b)");
  return re;
}
const std::regex& verifier_package_re() {
  static const std::regex re(R"((^|\n)\s*package\s+org\.sosy_lab\.sv_benchmarks\s*;)");
  return re;
}

// Drops comments and string literals so keyword scans see only code.
std::string strip_comments(const std::string& src) {
  std::string out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size();) {
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (src.compare(i, 2, "/*") == 0) {
      std::size_t end = src.find("*/", i + 2);
      i = end == std::string::npos ? src.size() : end + 2;
      out += ' ';
    } else if (src[i] == '"') {
      ++i;
      while (i < src.size() && src[i] != '"' && src[i] != '\n') i += (src[i] == '\\') ? 2 : 1;
      ++i;
      out += "\"\"";
    } else {
      out += src[i++];
    }
  }
  return out;
}

// The leading run of comments, if the file opens with one.
std::string leading_comment_block(const std::string& src) {
  std::string block;
  std::size_t i = 0;
  while (true) {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    if (src.compare(i, 2, "//") == 0) {
      std::size_t end = src.find('\n', i);
      end = end == std::string::npos ? src.size() : end;
      block += src.substr(i, end - i) + "\n";
      i = end;
    } else if (src.compare(i, 2, "/*") == 0) {
      std::size_t end = src.find("*/", i + 2);
      end = end == std::string::npos ? src.size() : end + 2;
      block += src.substr(i, end - i) + "\n";
      i = end;
    } else {
      return block;
    }
  }
}

bool has_license_marker(const std::string& block) {
  std::string lower(block);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower.find("copyright") != std::string::npos || lower.find("license") != std::string::npos ||
         lower.find("licence") != std::string::npos || lower.find("spdx-license-identifier") != std::string::npos;
}

bool is_binary_archive(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".jar" || ext == ".class";
}

}  // namespace

std::vector<Violation> validate_task(const TaskDefinition& task) {
  std::vector<Violation> violations;

  std::set<fs::path> binaries;
  for (const auto& rel : task.input_files) {
    if (is_binary_archive(rel)) binaries.insert(task.resolve(rel));
  }
  const std::vector<fs::path> files = expand_input_files(task);
  for (const auto& f : files) {
    if (is_binary_archive(f)) binaries.insert(f);
  }

  std::optional<fs::path> entry_file;
  std::optional<std::string> entry_source;
  std::vector<std::pair<fs::path, std::string>> sources;
  for (const auto& f : files) {
    if (f.extension() != ".java") continue;
    std::string src = read_file(f);
    std::string code = strip_comments(src);
    if (!entry_file && std::regex_search(code, main_class_re()) && std::regex_search(code, main_method_re()) &&
        !std::regex_search(code, package_re())) {
      entry_file = f;
      entry_source = src;
    }
    sources.emplace_back(f, std::move(code));
  }

  if (!entry_file) {
    violations.push_back({Rule::MissingEntryPoint, Severity::Error, task.base_dir,
                          "no input file declares class Main with public static void main(String[]) "
                          "in the root package"});
  } else if (!has_license_marker(leading_comment_block(*entry_source))) {
    violations.push_back({Rule::MissingLicenseHeader, Severity::Error, *entry_file,
                          "entry file does not begin with a copyright/license comment"});
  }

  for (const auto& b : binaries) {
    violations.push_back({Rule::ForbiddenBinaryDependency, Severity::Error, b,
                          "binary archives (.jar, .class) are not permitted as dependencies"});
  }

  for (const auto& [path, code] : sources) {
    if (std::regex_search(code, verifier_package_re())) continue;
    if (std::regex_search(code, random_re())) {
      violations.push_back({Rule::NondeterminismOutsideVerifier, Severity::Warning, path,
                            "uses Random outside org.sosy_lab.sv_benchmarks.Verifier"});
    }
  }
  return violations;
}

}  // namespace svbench::task
