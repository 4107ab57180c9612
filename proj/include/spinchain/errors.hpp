#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinchain {

enum class ErrorCode {
  domain,         // argument outside the mathematical domain
  configuration,  // invalid parameters or config file
  numerical,      // iteration failed to converge
  stiffness,      // explicit integrator step underflow
  size,           // problem too large for a brute-force routine
  internal,       // invariant broken; a bug
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain_error";
    case ErrorCode::configuration: return "configuration_error";
    case ErrorCode::numerical: return "numerical_error";
    case ErrorCode::stiffness: return "stiffness_error";
    case ErrorCode::size: return "size_error";
    case ErrorCode::internal: return "internal_error";
  }
  return "unknown_error";
}

/// Base exception for everything thrown by the library. The code is stable
/// and machine-readable; the CLI maps it to its exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::configuration, what) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorCode::numerical, what) {}
};
struct StiffnessError : Error {
  explicit StiffnessError(const std::string& what) : Error(ErrorCode::stiffness, what) {}
};
struct SizeError : Error {
  explicit SizeError(const std::string& what) : Error(ErrorCode::size, what) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& what) : Error(ErrorCode::internal, what) {}
};

}  // namespace spinchain
