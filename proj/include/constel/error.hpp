#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace constel {

enum class ErrorKind {
  invalid_input,
  no_sun_sync_solution,
  infeasible,
  parse,
  validation,
  out_of_range,
  uncoverable_demand,
  io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::no_sun_sync_solution: return "no_sun_sync_solution";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::uncoverable_demand: return "uncoverable_demand";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Single exception type for every library failure; `kind()` is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace constel
