#pragma once

#include <stdexcept>
#include <string>

namespace arena {

/// Failure categories. The CLI maps each one to a distinct exit status.
enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kIo,
  kMalformedLog,
  kLayoutGeneration,
  kUnreachable,
  kVersionMismatch,
  kInsufficientData,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arena
