#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slts {

enum class ErrorCode {
  InvalidArgument,
  ZeroTimeStep,
  NonFinite,
  ParseError,
  DimMismatch,
  EmptyDataset,
  TooLarge,
  EmptyLandmarks,
  CountOutOfRange,
  SingleClass,
  LengthMismatch,
  Empty,
  NonPositiveInput,
  TooFewRows,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroTimeStep: return "ZeroTimeStep";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::EmptyLandmarks: return "EmptyLandmarks";
    case ErrorCode::CountOutOfRange: return "CountOutOfRange";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace detail
}  // namespace slts
