#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "svbench/error.hpp"

namespace svbench::task {

/// One task's metadata line: `set_name,is_safe,loc`.
struct ManifestItem {
  std::string set_name;
  bool is_safe = false;
  std::uint64_t loc = 0;
};

struct ManifestEntry {
  std::string set_name;
  std::uint64_t total = 0;
  std::uint64_t safe = 0;
  std::uint64_t unsafe = 0;
  /// Mean lines of code, rounded half-up.
  std::uint64_t avg_loc = 0;

  bool operator==(const ManifestEntry&) const = default;
};

enum class ManifestErrc { EmptyManifest, MalformedManifest };
using ManifestError = Error<ManifestErrc>;

std::vector<ManifestItem> parse_manifest_csv(std::string_view text);

/// One row per set in first-appearance order, followed by a `total` row.
std::vector<ManifestEntry> summarize_manifest(const std::vector<ManifestItem>& items);

}  // namespace svbench::task
