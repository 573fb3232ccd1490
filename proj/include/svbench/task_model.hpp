#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svbench/error.hpp"

namespace svbench::task {

namespace fs = std::filesystem;

struct ExpectedVerdict {
  /// true: the specification is satisfied.
  bool holds = true;
  /// Relative to the task's base directory, lexically normalized.
  fs::path property_file;

  bool operator==(const ExpectedVerdict&) const = default;
};

struct TaskDefinition {
  std::string name;
  fs::path base_dir;
  /// Relative to base_dir, lexically normalized, in document order.
  std::vector<fs::path> input_files;
  std::vector<ExpectedVerdict> properties;
  std::string format_version;

  fs::path resolve(const fs::path& relative) const { return (base_dir / relative).lexically_normal(); }

  bool operator==(const TaskDefinition&) const = default;
};

enum class TaskErrc { MalformedTask, MissingInputFile, DuplicateProperty, PathEscapesRoot };
using TaskError = Error<TaskErrc>;

struct ParseOptions {
  /// Task name; defaults to "task" when empty.
  std::string name;
  /// When set, every referenced path must stay inside this directory.
  std::optional<fs::path> collection_root;
};

TaskDefinition parse_task_definition(std::string_view text, const fs::path& base_dir,
                                     const ParseOptions& options = {});

/// Reads a `.yml` task file; the task name is the file stem.
TaskDefinition load_task_file(const fs::path& yml, const std::optional<fs::path>& collection_root = {});

/// All regular files reachable from the task's input entries. Directories
/// are walked recursively. Sorted lexicographically, no duplicates.
std::vector<fs::path> expand_input_files(const TaskDefinition& task);

/// `expand_input_files` restricted to `.java` sources.
std::vector<fs::path> expand_java_sources(const TaskDefinition& task);

enum class Severity { Error, Warning };

enum class Rule {
  MissingEntryPoint,
  MissingLicenseHeader,
  ForbiddenBinaryDependency,
  NondeterminismOutsideVerifier,
};

std::string_view to_string(Rule rule);
std::string_view to_string(Severity severity);

struct Violation {
  Rule rule;
  Severity severity;
  fs::path location;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Convention checks over the task's sources, by textual inspection only.
std::vector<Violation> validate_task(const TaskDefinition& task);

}  // namespace svbench::task
