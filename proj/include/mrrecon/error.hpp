#pragma once

#include <stdexcept>
#include <string>

namespace mrrecon {

enum class ErrorCode {
  kParse = 1,
  kBounds,
  kConfig,
  kInvariant,
  kInvalidArgument,
  kIo,
};

const char* to_string(ErrorCode code);

// Single exception type for the engine; the code drives C API status values
// and CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mrrecon
