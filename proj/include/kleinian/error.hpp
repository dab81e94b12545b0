#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kleinian {

enum class ErrorCode {
  SingularMatrix,
  IdentityMap,
  UnknownLetter,
  EmptyPresentation,
  EllipticOnly,
  EmptyWindow,
  NoTangentTriple,
  OverlappingCircles,
  InvalidArgument,
  InvalidStructure,
  MetricDegenerate,
  UnknownPoint,
  UnknownVertex,
  ParseError,
  UnknownKey,
  RangeError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::IdentityMap: return "IdentityMap";
    case ErrorCode::UnknownLetter: return "UnknownLetter";
    case ErrorCode::EmptyPresentation: return "EmptyPresentation";
    case ErrorCode::EllipticOnly: return "EllipticOnly";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoTangentTriple: return "NoTangentTriple";
    case ErrorCode::OverlappingCircles: return "OverlappingCircles";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::MetricDegenerate: return "MetricDegenerate";
    case ErrorCode::UnknownPoint: return "UnknownPoint";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kleinian
