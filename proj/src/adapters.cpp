#include "svbench/adapters.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace svbench::adapters {
namespace {

[[noreturn]] void malformed(const std::string& msg) { throw AdapterError(AdapterErrc::MalformedAdapter, msg); }

std::vector<std::string> string_list(const YAML::Node& node, const char* key) {
  if (!node || !node.IsSequence()) malformed(std::string(key) + " must be a list of strings");
  std::vector<std::string> out;
  for (const auto& item : node) {
    if (!item.IsScalar()) malformed(std::string(key) + " entries must be strings");
    out.push_back(item.as<std::string>());
  }
  return out;
}

std::string resolve_relative(const std::string& value, const fs::path& dir) {
  if (value.find('/') == std::string::npos || fs::path(value).is_absolute() || dir.empty()) return value;
  return (fs::absolute(dir) / value).lexically_normal().string();
}

std::string root_relative(const fs::path& path, const fs::path& root) {
  fs::path abs_root = fs::absolute(root).lexically_normal();
  fs::path rel = fs::absolute(path).lexically_normal().lexically_relative(abs_root);
  if (rel.empty() || *rel.begin() == "..") {
    throw AdapterError(AdapterErrc::PathEscapesRoot, "path outside the collection root: " + path.string());
  }
  return rel.generic_string();
}

enum class Placeholder { InputFiles, InputDirs, PropertyFile, Options };

std::optional<Placeholder> lookup_placeholder(std::string_view name) {
  if (name == "INPUT_FILES") return Placeholder::InputFiles;
  if (name == "INPUT_DIRS") return Placeholder::InputDirs;
  if (name == "PROPERTY_FILE") return Placeholder::PropertyFile;
  if (name == "OPTIONS") return Placeholder::Options;
  return std::nullopt;
}

}  // namespace

AnswerRule::AnswerRule(Kind kind, std::string matcher, Verdict verdict)
    : kind_(kind), matcher_(std::move(matcher)), verdict_(verdict) {
  if (matcher_.empty()) malformed("answer rule matcher is empty");
  if (verdict_ == Verdict::Unknown) malformed("answer rule verdict must be TRUE or FALSE");
  if (kind_ == Kind::Pattern) {
    try {
      pattern_.emplace(matcher_, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      malformed("invalid answer pattern '" + matcher_ + "': " + e.what());
    }
  }
}

bool AnswerRule::matches(std::string_view output) const {
  if (kind_ == Kind::Literal) return output.find(matcher_) != std::string_view::npos;
  while (!output.empty()) {
    std::size_t nl = output.find('\n');
    std::string_view line = output.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (std::regex_match(line.begin(), line.end(), *pattern_)) return true;
    if (nl == std::string_view::npos) break;
    output.remove_prefix(nl + 1);
  }
  return false;
}

ToolAdapter parse_adapter(std::string_view text, const fs::path& descriptor_dir) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    malformed(std::string("invalid YAML: ") + e.what());
  }
  if (!doc.IsMap()) malformed("adapter descriptor must be a mapping");

  ToolAdapter adapter;
  try {
    if (!doc["tool_name"] || !doc["tool_name"].IsScalar()) malformed("missing tool_name");
    adapter.tool_name = doc["tool_name"].as<std::string>();
    if (adapter.tool_name.empty()) malformed("tool_name is empty");
    if (!doc["executable"] || !doc["executable"].IsScalar()) malformed("missing executable");
    adapter.executable = resolve_relative(doc["executable"].as<std::string>(), descriptor_dir);
    adapter.cmdline_template = string_list(doc["cmdline_template"], "cmdline_template");

    const YAML::Node rules = doc["answer_rules"];
    if (!rules || !rules.IsSequence()) malformed("answer_rules must be a list");
    for (const auto& rule : rules) {
      if (!rule.IsMap()) malformed("answer rule must be a mapping");
      const bool literal = static_cast<bool>(rule["literal"]);
      const bool pattern = static_cast<bool>(rule["pattern"]);
      if (literal == pattern) malformed("answer rule needs exactly one of literal/pattern");
      auto verdict = rule["verdict"] ? parse_verdict(rule["verdict"].as<std::string>()) : std::nullopt;
      if (!verdict) malformed("answer rule verdict must be TRUE or FALSE");
      adapter.answer_rules.emplace_back(literal ? AnswerRule::Kind::Literal : AnswerRule::Kind::Pattern,
                                        (literal ? rule["literal"] : rule["pattern"]).as<std::string>(), *verdict);
    }

    if (doc["version_probe"]) adapter.version_probe = string_list(doc["version_probe"], "version_probe");
    if (doc["wrapper_script"]) {
      adapter.wrapper_script = resolve_relative(doc["wrapper_script"].as<std::string>(), descriptor_dir);
    }
    if (const YAML::Node env = doc["environment"]) {
      if (!env.IsMap()) malformed("environment must be a mapping");
      for (const auto& kv : env) adapter.environment[kv.first.as<std::string>()] = kv.second.as<std::string>();
    }
  } catch (const YAML::Exception& e) {
    malformed(std::string("invalid adapter descriptor: ") + e.what());
  }
  return adapter;
}

AdapterRegistry::AdapterRegistry(std::vector<ToolAdapter> adapters) {
  for (auto& a : adapters) {
    std::string name = a.tool_name;
    if (!adapters_.emplace(name, std::move(a)).second) malformed("duplicate adapter for tool " + name);
  }
}

AdapterRegistry AdapterRegistry::load_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) malformed("adapter directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".yml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ToolAdapter> adapters;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      adapters.push_back(parse_adapter(ss.str(), f.parent_path()));
    } catch (const AdapterError& e) {
      throw AdapterError(e.kind(), f.filename().string() + ": " + e.what());
    }
  }
  return AdapterRegistry(std::move(adapters));
}

const ToolAdapter* AdapterRegistry::find(std::string_view tool_name) const {
  auto it = adapters_.find(tool_name);
  return it == adapters_.end() ? nullptr : &it->second;
}

std::vector<std::string> AdapterRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : adapters_) out.push_back(name);
  return out;
}

std::vector<std::string> build_cmdline(const ToolAdapter& adapter, const task::TaskDefinition& task,
                                       const fs::path& property_file, const std::vector<std::string>& options,
                                       const fs::path& collection_root) {
  std::vector<std::string> argv;
  if (adapter.wrapper_script) argv.push_back(*adapter.wrapper_script);
  argv.push_back(adapter.executable);

  for (const std::string& token : adapter.cmdline_template) {
    // Split the token into literal text and {NAME} placeholders.
    std::string expanded;
    std::optional<Placeholder> whole;
    std::size_t pos = 0;
    bool only_placeholder = false;
    while (pos < token.size()) {
      std::size_t open = token.find('{', pos);
      if (open == std::string::npos) {
        expanded += token.substr(pos);
        break;
      }
      std::size_t close = token.find('}', open);
      if (close == std::string::npos) {
        throw AdapterError(AdapterErrc::UnknownPlaceholder, "unterminated placeholder in '" + token + "'");
      }
      expanded += token.substr(pos, open - pos);
      std::string name = token.substr(open + 1, close - open - 1);
      auto ph = lookup_placeholder(name);
      if (!ph) throw AdapterError(AdapterErrc::UnknownPlaceholder, "unknown placeholder {" + name + "}");
      if (*ph == Placeholder::PropertyFile) {
        expanded += root_relative(property_file, collection_root);
      } else if (open == 0 && close + 1 == token.size()) {
        whole = ph;
        only_placeholder = true;
      } else {
        throw AdapterError(AdapterErrc::UnknownPlaceholder,
                           "list placeholder {" + name + "} must form a whole token in '" + token + "'");
      }
      pos = close + 1;
    }

    if (!only_placeholder) {
      argv.push_back(std::move(expanded));
      continue;
    }
    switch (*whole) {
      case Placeholder::InputFiles: {
        auto sources = task::expand_java_sources(task);
        if (sources.empty()) {
          throw AdapterError(AdapterErrc::EmptyExpansion, "task " + task.name + " has no .java input files");
        }
        for (const auto& s : sources) argv.push_back(root_relative(s, collection_root));
        break;
      }
      case Placeholder::InputDirs:
        for (const auto& rel : task.input_files) {
          fs::path resolved = task.resolve(rel);
          if (fs::is_directory(resolved)) argv.push_back(root_relative(resolved, collection_root));
        }
        break;
      case Placeholder::Options:
        argv.insert(argv.end(), options.begin(), options.end());
        break;
      case Placeholder::PropertyFile:
        break;
    }
  }
  return argv;
}

Answer determine_answer(const ToolAdapter& adapter, std::optional<int> /*exit_code*/, std::string_view output,
                        const exec::TerminationReason& reason) {
  using exec::TerminationKind;
  switch (reason.kind) {
    case TerminationKind::CpuTimeout:
    case TerminationKind::WallTimeout:
      return {Verdict::Unknown, "timeout"};
    case TerminationKind::OutOfMemory:
      return {Verdict::Unknown, "out of memory"};
    case TerminationKind::Signaled:
    case TerminationKind::HarnessError:
      return {Verdict::Unknown, "crash"};
    case TerminationKind::Normal:
      break;
  }
  for (const auto& rule : adapter.answer_rules) {
    if (rule.matches(output)) return {rule.verdict(), rule.verdict() == Verdict::True ? "true" : "false"};
  }
  return {Verdict::Unknown, "unrecognized output"};
}

}  // namespace svbench::adapters
