#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xp {

enum class ErrorCode {
  Overflow,
  ParseError,
  NonHolderIndex,
  BorderlineIndex,
  ScaleOverflow,
  DegenerateCondition,
  IndeterminateTheta,
  ThetaOutOfRange,
  JetOrderExceeded,
  UnknownFamily,
  BadParams,
  GridTooCoarse,
  OracleTooLarge,
  ZeroFunction,
  IntegralDiverges,
  InvalidBase,
  InvalidInstance,
  InternalBorderline,
  InvalidCertificate,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonHolderIndex: return "NonHolderIndex";
    case ErrorCode::BorderlineIndex: return "BorderlineIndex";
    case ErrorCode::ScaleOverflow: return "ScaleOverflow";
    case ErrorCode::DegenerateCondition: return "DegenerateCondition";
    case ErrorCode::IndeterminateTheta: return "IndeterminateTheta";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::JetOrderExceeded: return "JetOrderExceeded";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::IntegralDiverges: return "IntegralDiverges";
    case ErrorCode::InvalidBase: return "InvalidBase";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::InternalBorderline: return "InternalBorderline";
    case ErrorCode::InvalidCertificate: return "InvalidCertificate";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xp
