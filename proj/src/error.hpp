#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace citequal {

// Error categories, mirrored by the C API status codes.
enum class ErrorKind {
  invalid_argument,
  parse,
  domain,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace citequal
