#include "mcig/error.hpp"

#include <fmt/format.h>

namespace mcig {

const char *to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::Precondition:
    return "precondition";
  case ErrorCode::Domain:
    return "domain";
  case ErrorCode::Degenerate:
    return "degenerate";
  case ErrorCode::NotSpd:
    return "not-spd";
  case ErrorCode::NoSolution:
    return "no-solution";
  case ErrorCode::NonFinite:
    return "non-finite";
  case ErrorCode::Algorithm:
    return "algorithm";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(fmt::format("[{}] {}", to_string(code), message)),
      code_(code) {}

} // namespace mcig
