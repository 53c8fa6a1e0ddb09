#include "idecode/tensor.hpp"

#include <cmath>

namespace idecode {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::IncompatibleShape: return "IncompatibleShape";
    case ErrorCode::WrongModelKind: return "WrongModelKind";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::EmptyCalibration: return "EmptyCalibration";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::TooFewScores: return "TooFewScores";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::OffGridValue: return "OffGridValue";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Tensor make_tensor(std::vector<std::int64_t> shape, std::vector<double> data) {
  std::int64_t expected = 1;
  for (auto d : shape) {
    if (d <= 0) throw Error(ErrorCode::ShapeMismatch, "non-positive dimension");
    expected *= d;
  }
  if (expected != static_cast<std::int64_t>(data.size())) {
    throw Error(ErrorCode::ShapeMismatch,
                "data length " + std::to_string(data.size()) +
                    " does not match shape product " + std::to_string(expected));
  }
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFinite, "tensor element is not finite");
    }
  }
  return Tensor{std::move(shape), std::move(data)};
}

Tensor make_vector(std::vector<double> data) {
  const auto len = static_cast<std::int64_t>(data.size());
  return make_tensor({len}, std::move(data));
}

}  // namespace idecode
