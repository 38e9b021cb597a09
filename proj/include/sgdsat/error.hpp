#pragma once

#include <stdexcept>
#include <string>

namespace sgdsat {

/// Failure with a stable machine-readable code, e.g. "invalid_argument",
/// "svd_no_convergence", "divergence", "budget_exceeded",
/// "hypothesis_violation", "inadmissible_stepsize", "bad_config".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail("invalid_argument", message);
}

}  // namespace sgdsat
