#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace exes {

enum class ErrorCode {
  kParseError,
  kDanglingEdge,
  kDuplicateNode,
  kSelfLoop,
  kUnknownNode,
  kUnknownSkill,
  kInvalidArgument,
  kOverlayConflict,
  kInfeasibleParameters,
  kDimensionTooLarge,
  kEmptyVocabulary,
  kNoCandidates,
  kDirectionMismatch,
  kTimeout,
  kOracleUnavailable,
  kInsufficientPopulation,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the engine; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace exes
