#pragma once

#include <stdexcept>
#include <string>

namespace qag {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse,
  Validation,
  Version,
  Budget,
  Partition,
  Io,
};

// Base for every failure the library reports. The C API maps `code()` onto
// its status enum, so new codes must be mirrored in qag.h.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Error invalid_argument(const std::string& what) {
  return Error(ErrorCode::InvalidArgument, what);
}

}  // namespace qag
