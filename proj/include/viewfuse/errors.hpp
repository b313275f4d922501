#pragma once

// Error taxonomy shared by the library and the CLI exit-code mapping:
// validation = 1, io = 2, numeric = 3.

#include <stdexcept>
#include <string>
#include <utility>

namespace viewfuse {

enum class ErrorKind { validation = 1, io = 2, numeric = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

[[noreturn]] inline void throw_validation(const std::string& message) {
  throw Error(ErrorKind::validation, message);
}

[[noreturn]] inline void throw_io(const std::string& message) {
  throw Error(ErrorKind::io, message);
}

[[noreturn]] inline void throw_numeric(const std::string& message) {
  throw Error(ErrorKind::numeric, message);
}

}  // namespace viewfuse
