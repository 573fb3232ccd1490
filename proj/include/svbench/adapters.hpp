#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "svbench/error.hpp"
#include "svbench/executor.hpp"
#include "svbench/task_model.hpp"
#include "svbench/verdict.hpp"

namespace svbench::adapters {

namespace fs = std::filesystem;

/// Maps tool output to an answer. A literal matches as a substring anywhere
/// in the output; a pattern must match one whole output line.
class AnswerRule {
 public:
  enum class Kind { Literal, Pattern };

  AnswerRule(Kind kind, std::string matcher, Verdict verdict);

  Kind kind() const noexcept { return kind_; }
  const std::string& matcher() const noexcept { return matcher_; }
  Verdict verdict() const noexcept { return verdict_; }

  bool matches(std::string_view output) const;

 private:
  Kind kind_;
  std::string matcher_;
  Verdict verdict_;
  std::optional<std::regex> pattern_;
};

struct ToolAdapter {
  std::string tool_name;
  /// Absolute path, path relative to the descriptor, or a PATH lookup name.
  std::string executable;
  /// Tokens after the executable. `{INPUT_FILES}`, `{INPUT_DIRS}` and
  /// `{OPTIONS}` must stand alone; `{PROPERTY_FILE}` may be embedded.
  std::vector<std::string> cmdline_template;
  /// First match wins.
  std::vector<AnswerRule> answer_rules;
  std::optional<std::vector<std::string>> version_probe;
  /// When set, argv becomes `[wrapper_script, executable, ...]`.
  std::optional<std::string> wrapper_script;
  /// Extra variables exported to the tool.
  std::map<std::string, std::string> environment;
};

enum class AdapterErrc {
  MalformedAdapter,
  UnknownPlaceholder,
  EmptyExpansion,
  PathEscapesRoot,
  MalformedDefinition,
  UnknownTool,
};
using AdapterError = Error<AdapterErrc>;

/// Parses one descriptor document. Relative executable and wrapper paths
/// are resolved against `descriptor_dir`.
ToolAdapter parse_adapter(std::string_view text, const fs::path& descriptor_dir = {});

/// Immutable after construction.
class AdapterRegistry {
 public:
  AdapterRegistry() = default;
  explicit AdapterRegistry(std::vector<ToolAdapter> adapters);

  /// Every `*.yml` descriptor in `dir`.
  static AdapterRegistry load_dir(const fs::path& dir);

  const ToolAdapter* find(std::string_view tool_name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ToolAdapter, std::less<>> adapters_;
};

/// Substitutes the adapter's template. Every path is emitted relative to
/// `collection_root`, which is also the run's working directory.
std::vector<std::string> build_cmdline(const ToolAdapter& adapter, const task::TaskDefinition& task,
                                       const fs::path& property_file, const std::vector<std::string>& options,
                                       const fs::path& collection_root);

struct Answer {
  Verdict verdict = Verdict::Unknown;
  std::string raw_status;

  bool operator==(const Answer&) const = default;
};

/// Total: abnormal terminations take precedence over any answer rule.
Answer determine_answer(const ToolAdapter& adapter, std::optional<int> exit_code, std::string_view output,
                        const exec::TerminationReason& reason);

}  // namespace svbench::adapters
