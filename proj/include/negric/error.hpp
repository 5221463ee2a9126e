#pragma once

#include <stdexcept>
#include <string>

namespace negric {

/// Failure categories surfaced by the library. The CLI maps these onto exit codes.
enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  NotNilpotent,
  NotDerivation,
  JacobiViolated,
  Singular,
  NilpotentExtension,
  Infeasible,
  SearchExhausted,
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace negric
