#pragma once

#include <string>

#include "idecode/ncm.hpp"
#include "idecode/rng.hpp"

namespace idecode::conformal {

enum class AggregateKind { Sum };

// The n base scores for one datapoint together with the transforms that
// produced them.
struct ScoreVector {
  std::vector<double> scores;
  std::vector<transforms::TransformInstance> transforms;
  std::string point_id;
};

// Sorted aggregated calibration scores plus the configuration fingerprint;
// the unit of persistence.
struct CalibrationArtifact {
  std::vector<double> sorted_scores;  // ascending, finite
  int n = 1;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t seed = 0;
  int format_version = 1;

  int k() const { return static_cast<int>(sorted_scores.size()); }
};

struct PValue {
  double value = 1.0;  // in (0, 1]
  bool smoothed = false;
};

struct DetectionResult {
  PValue p;
  double epsilon = 0.0;
  bool is_ood = false;
};

// Scores x under n transforms sampled IID from Q_G, one derived substream
// per transform index. Throws InvalidN when n < 1.
ScoreVector score_vector(const ncm::NcmConfig& cfg, const models::Model& m,
                         const transforms::TransformFamily& family,
                         const Tensor& x, int n, const RngStream& rng);

double aggregate(AggregateKind kind, const ScoreVector& v);

// Hash of the (family, ncm, model, aggregation) configuration; artifacts
// built under different configurations never compare equal.
std::uint64_t config_fingerprint(const transforms::TransformFamily& family,
                                 const ncm::NcmConfig& cfg,
                                 const models::Model& m, AggregateKind f_kind);

// Scores every calibration point with substream root.derive(j), aggregates
// and sorts. Throws EmptyCalibration.
CalibrationArtifact calibrate(const std::vector<Tensor>& points,
                              const ncm::NcmConfig& cfg,
                              const models::Model& m,
                              const transforms::TransformFamily& family, int n,
                              std::uint64_t seed, const RngStream& root,
                              std::uint64_t fingerprint);

// Assembles an artifact from already-aggregated scores (the external-score
// ingestion path and the resampling experiments).
CalibrationArtifact artifact_from_scores(std::vector<double> aggregated, int n,
                                         std::uint64_t fingerprint,
                                         std::uint64_t seed);

// (|{calibration scores >= test}| + 1) / (k + 1), ties by exact float
// equality, count by binary search.
PValue p_value(const CalibrationArtifact& art, double test_score);

// (|{> test}| + u * (|{= test}| + 1)) / (k + 1); an exact zero is floored
// to the smallest positive normal double so the value stays in (0, 1].
PValue p_value_smoothed(const CalibrationArtifact& art, double test_score,
                        double u);

// OOD iff p < epsilon, strict.
DetectionResult detect(const CalibrationArtifact& art, double test_score,
                       double epsilon);

// Classical full-CAD p-value; the last entry is the test score.
PValue cad_p_value(const std::vector<double>& all_scores);

}  // namespace idecode::conformal
