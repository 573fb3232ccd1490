#pragma once

#include <optional>
#include <string_view>

namespace svbench {

/// Answer of a verification run.
enum class Verdict { True, False, Unknown };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "TRUE";
    case Verdict::False: return "FALSE";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<Verdict> parse_verdict(std::string_view text);

}  // namespace svbench
