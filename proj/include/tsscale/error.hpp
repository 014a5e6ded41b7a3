#pragma once

#include <stdexcept>
#include <string>

namespace tsscale {

/// Failure classes. Each maps onto one CLI exit code.
enum class ErrorKind {
  config,     // 2
  ingestion,  // 3
  numerical,  // 4
  internal,   // 5
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

int exit_code(ErrorKind kind) noexcept;
const char* to_string(ErrorKind kind) noexcept;

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tsscale
