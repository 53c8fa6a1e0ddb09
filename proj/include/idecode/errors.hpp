#pragma once

#include <stdexcept>
#include <string>

namespace idecode {

enum class ErrorCode {
  ShapeMismatch,
  NonFinite,
  IncompatibleShape,
  WrongModelKind,
  InvalidDistribution,
  EmptyTrainingSet,
  KTooLarge,
  InvalidN,
  EmptyVector,
  EmptyCalibration,
  NonFiniteScore,
  InvalidEpsilon,
  TooFewScores,
  EmptyInput,
  EmptyPool,
  OffGridValue,
  SchemaViolation,
  DuplicateId,
  FingerprintMismatch,
  ConfigError,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace idecode
