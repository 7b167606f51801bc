#pragma once

#include <stdexcept>
#include <string>

namespace qec {

/// Reported failure from one of the library modules. The message is
/// prefixed with the module tag, e.g. "gf2: dimension mismatch".
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace qec
