#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "svbench/error.hpp"

namespace svbench::task {

enum class TemporalOperator { Globally };
enum class Proposition { Assert };

/// A parsed `.prp` clause: `CHECK( init(<type>.<method>()), LTL(G assert) )`.
struct PropertySpec {
  std::string entry_type;
  std::string entry_method;
  TemporalOperator temporal_operator = TemporalOperator::Globally;
  Proposition proposition = Proposition::Assert;

  bool operator==(const PropertySpec&) const = default;
};

enum class PropertyErrc { MalformedProperty, UnsupportedFormula };

class PropertyError : public Error<PropertyErrc> {
 public:
  PropertyError(PropertyErrc kind, std::size_t offset, const std::string& what)
      : Error(kind, what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  /// Byte offset into the input where parsing stopped.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

PropertySpec parse_property(std::string_view text);

/// Canonical text form; `parse_property(render(p)) == p`.
std::string render(const PropertySpec& spec);

}  // namespace svbench::task
