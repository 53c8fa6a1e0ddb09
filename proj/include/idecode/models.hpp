#pragma once

#include <map>
#include <string>
#include <vector>

#include "idecode/tensor.hpp"

namespace idecode::models {

enum class ModelId {
  AnnulusInvariant,
  AnglePredictor,
  RotationClassSoftmax,
  ExternalScores,
};

// Synthetic models that are equivariant on the annulus r_lo <= |x| <= r_hi
// by construction and break equivariance outside it. noise_sigma > 0 adds
// deterministic per-input Gaussian output noise (a pure function of the
// input bits and noise_seed), so evaluate stays reproducible.
struct Model {
  ModelId model_id = ModelId::AnnulusInvariant;
  double r_lo = 0.5;
  double r_hi = 1.5;
  double beta = 50.0;  // softmax sharpness inside the annulus
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

// AnnulusInvariant: 2-vector -> (|x|) on the annulus, (x_1) outside.
// Throws IncompatibleShape / WrongModelKind.
Tensor evaluate(const Model& m, const Tensor& x);

// Auxiliary-task heads. AnglePredictor recovers the applied rotation angle
// in [0, 2pi) when x is on the annulus and returns (0) outside.
// RotationClassSoftmax scores the four quarter-turn classes with
// softmax(-beta * d_c), beta = 0 (uniform) outside the annulus.
Tensor predict_transform(const Model& m, const Tensor& x, const Tensor& gx);

struct ScoreRecord {
  std::string id;
  std::string split;  // cal | test_id | test_ood
  std::vector<double> scores;
};

using ScoreTable = std::map<std::string, std::vector<double>>;

// Builds the id -> score-vector table consumed by the conformal stage in
// place of model evaluation. Throws SchemaViolation when a record's length
// disagrees with n, DuplicateId on repeated ids.
ScoreTable ingest_external(const std::vector<ScoreRecord>& records,
                           std::size_t n);

}  // namespace idecode::models
