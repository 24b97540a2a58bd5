#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ramify {

// Failure classes; each maps onto one CLI exit code.
enum class ErrorCode {
  malformed_input = 1,
  infeasible = 2,
  inconsistent = 3,
  cap_exceeded = 4,
};

// Base of every library error. `reason` is a short machine-readable token
// (e.g. "non-increasing-filtration"), `location` names the offending input.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string reason, std::string message,
        std::string location = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        reason_(std::move(reason)),
        location_(std::move(location)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& reason() const noexcept { return reason_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  std::string reason_;
  std::string location_;
};

inline Error malformed(std::string reason, std::string message,
                       std::string location = {}) {
  return {ErrorCode::malformed_input, std::move(reason), std::move(message),
          std::move(location)};
}

inline Error infeasible(std::string reason, std::string message,
                        std::string location = {}) {
  return {ErrorCode::infeasible, std::move(reason), std::move(message),
          std::move(location)};
}

}  // namespace ramify
