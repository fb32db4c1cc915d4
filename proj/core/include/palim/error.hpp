#pragma once

#include <stdexcept>
#include <string>

namespace palim {

/// Failure categories. The CLI maps `domain` to exit code 1 and the rest to 2.
enum class ErrorCode {
  io,                // file could not be opened, read or written
  format,            // bytes are not a supported image/index/manifest
  invalid_argument,  // precondition violated by the caller
  domain,            // well-formed input with no answer (e.g. no foreground)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void throw_error(ErrorCode code, const std::string& what);

}  // namespace palim
