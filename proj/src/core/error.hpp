#pragma once

#include <stdexcept>
#include <string>

namespace cutfem {

/// Failure categories. The numeric values are part of the C ABI (see cutfem.h).
enum class ErrorCode : int {
  InvalidArgument = 1,
  InvalidGeometry = 2,
  Coverage = 3,
  Unsupported = 4,
  Solver = 5,
  Config = 6,
  Io = 7,
  Internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace cutfem
