#include "bhnls/error.hpp"

namespace bhnls {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::NonFiniteInput: return "non-finite-input";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::EigenFailure: return "eigendecomposition-failure";
    case ErrorKind::ResolutionInsufficient: return "resolution-insufficient";
    case ErrorKind::NegativeArgument: return "negative-argument";
    case ErrorKind::RootBracketing: return "root-bracketing-failure";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::ZeroField: return "zero-field";
    case ErrorKind::SupportOverflow: return "support-overflow";
    case ErrorKind::ConfigParse: return "config-parse";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace bhnls
