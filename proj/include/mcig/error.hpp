#pragma once

#include <stdexcept>
#include <string>

namespace mcig {

enum class ErrorCode {
  Precondition,  // malformed input or configuration
  Domain,        // parameter outside a generator's domain
  Degenerate,    // family or sample violates the linear-independence assumptions
  NotSpd,        // Hessian failed the positive-definiteness check
  NoSolution,    // gradient inversion did not converge
  NonFinite,     // a cached or intermediate quantity is not finite
  Algorithm,     // clustering or other iterative procedure failed
};

[[nodiscard]] const char *to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace mcig
