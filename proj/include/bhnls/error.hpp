#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bhnls {

enum class ErrorKind {
  InvalidParameter,
  NonFiniteInput,
  GridMismatch,
  EigenFailure,
  ResolutionInsufficient,
  NegativeArgument,
  RootBracketing,
  Overflow,
  OutOfRange,
  ZeroField,
  SupportOverflow,
  ConfigParse,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library error carrying a machine-readable kind. Every precondition
/// violation in the public API surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bhnls
