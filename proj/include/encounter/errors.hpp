#pragma once

#include <stdexcept>
#include <string>

namespace encounter {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  Degenerate,
  NoOverlap,
  OutOfRange,
  MissingData,
  InsufficientData,
  InvalidK,
  NoJunction,
  InsufficientClusters,
  Internal,
};

/// Exception carrying a stable error code; the C API maps codes 1:1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace encounter
