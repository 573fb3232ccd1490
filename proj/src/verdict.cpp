#include "svbench/verdict.hpp"

namespace svbench {

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "TRUE") return Verdict::True;
  if (text == "FALSE") return Verdict::False;
  if (text == "UNKNOWN") return Verdict::Unknown;
  return std::nullopt;
}

}  // namespace svbench
