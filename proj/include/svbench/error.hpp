#pragma once

#include <stdexcept>
#include <string>

namespace svbench {

/// Exception carrying a module-specific error kind.
///
/// Each module defines an `enum class` of failure kinds and aliases
/// `Error<ThatEnum>`; callers branch on `kind()` rather than on message text.
template <typename Kind>
class Error : public std::runtime_error {
 public:
  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace svbench
