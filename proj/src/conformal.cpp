#include "idecode/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idecode::conformal {

namespace {

void absorb_u64(std::uint64_t& h, std::uint64_t v) {
  h = mix64(h ^ mix64(v));
}

void absorb_f64(std::uint64_t& h, double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof bits);
  absorb_u64(h, bits);
}

void require_finite_score(double s) {
  if (!std::isfinite(s))
    throw Error(ErrorCode::NonFiniteScore, "test score is not finite");
}

}  // namespace

ScoreVector score_vector(const ncm::NcmConfig& cfg, const models::Model& m,
                         const transforms::TransformFamily& family,
                         const Tensor& x, int n, const RngStream& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidN, "n must be >= 1");
  ScoreVector v;
  v.scores.reserve(n);
  v.transforms.reserve(n);
  for (int i = 0; i < n; ++i) {
    RngStream sub = rng.derive(static_cast<std::uint64_t>(i));
    auto g = transforms::sample_transform(family, sub);
    v.scores.push_back(ncm::base_ncm(cfg, m, x, g));
    v.transforms.push_back(std::move(g));
  }
  return v;
}

double aggregate(AggregateKind kind, const ScoreVector& v) {
  if (v.scores.empty()) throw Error(ErrorCode::EmptyVector, "empty score vector");
  switch (kind) {
    case AggregateKind::Sum: {
      double sum = 0.0;
      for (double s : v.scores) sum += s;
      return sum;
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown aggregation");
}

std::uint64_t config_fingerprint(const transforms::TransformFamily& family,
                                 const ncm::NcmConfig& cfg,
                                 const models::Model& m,
                                 AggregateKind f_kind) {
  std::uint64_t h = 0x1dec0dee1dec0deeULL;
  absorb_u64(h, static_cast<std::uint64_t>(family.family_id));
  absorb_u64(h, static_cast<std::uint64_t>(family.output_rule));
  absorb_f64(h, family.angle_min);
  absorb_f64(h, family.angle_max);
  absorb_f64(h, family.scale_min);
  absorb_f64(h, family.scale_max);
  absorb_f64(h, family.corner_jitter);
  absorb_f64(h, family.mask_fraction);
  absorb_u64(h, static_cast<std::uint64_t>(cfg.ncm_kind));
  absorb_u64(h, static_cast<std::uint64_t>(cfg.loss_kind));
  absorb_u64(h, static_cast<std::uint64_t>(cfg.k));
  absorb_u64(h, static_cast<std::uint64_t>(m.model_id));
  absorb_f64(h, m.r_lo);
  absorb_f64(h, m.r_hi);
  absorb_f64(h, m.beta);
  absorb_f64(h, m.noise_sigma);
  absorb_u64(h, m.noise_seed);
  absorb_u64(h, static_cast<std::uint64_t>(f_kind));
  return h;
}

CalibrationArtifact calibrate(const std::vector<Tensor>& points,
                              const ncm::NcmConfig& cfg,
                              const models::Model& m,
                              const transforms::TransformFamily& family, int n,
                              std::uint64_t seed, const RngStream& root,
                              std::uint64_t fingerprint) {
  if (points.empty())
    throw Error(ErrorCode::EmptyCalibration, "calibration set is empty");
  std::vector<double> scores;
  scores.reserve(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto v = score_vector(cfg, m, family, points[j], n, root.derive(j));
    scores.push_back(aggregate(AggregateKind::Sum, v));
  }
  return artifact_from_scores(std::move(scores), n, fingerprint, seed);
}

CalibrationArtifact artifact_from_scores(std::vector<double> aggregated, int n,
                                         std::uint64_t fingerprint,
                                         std::uint64_t seed) {
  if (aggregated.empty())
    throw Error(ErrorCode::EmptyCalibration, "no calibration scores");
  for (double s : aggregated) require_finite_score(s);
  std::sort(aggregated.begin(), aggregated.end());
  CalibrationArtifact art;
  art.sorted_scores = std::move(aggregated);
  art.n = n;
  art.config_fingerprint = fingerprint;
  art.seed = seed;
  return art;
}

PValue p_value(const CalibrationArtifact& art, double test_score) {
  require_finite_score(test_score);
  const auto& s = art.sorted_scores;
  const auto ge = s.end() - std::lower_bound(s.begin(), s.end(), test_score);
  return PValue{static_cast<double>(ge + 1) / static_cast<double>(art.k() + 1),
                false};
}

PValue p_value_smoothed(const CalibrationArtifact& art, double test_score,
                        double u) {
  require_finite_score(test_score);
  const auto& s = art.sorted_scores;
  const auto gt = s.end() - std::upper_bound(s.begin(), s.end(), test_score);
  const auto eq = std::upper_bound(s.begin(), s.end(), test_score) -
                  std::lower_bound(s.begin(), s.end(), test_score);
  double v = (static_cast<double>(gt) + u * static_cast<double>(eq + 1)) /
             static_cast<double>(art.k() + 1);
  if (v <= 0.0) v = std::numeric_limits<double>::min();
  return PValue{v, true};
}

DetectionResult detect(const CalibrationArtifact& art, double test_score,
                       double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorCode::InvalidEpsilon, "epsilon must lie in (0, 1)");
  const PValue p = p_value(art, test_score);
  return DetectionResult{p, epsilon, p.value < epsilon};
}

PValue cad_p_value(const std::vector<double>& all_scores) {
  if (all_scores.size() < 2)
    throw Error(ErrorCode::TooFewScores, "need at least one score plus test");
  const double test = all_scores.back();
  require_finite_score(test);
  std::size_t ge = 0;
  for (std::size_t i = 0; i + 1 < all_scores.size(); ++i) {
    require_finite_score(all_scores[i]);
    if (all_scores[i] >= test) ++ge;
  }
  return PValue{static_cast<double>(ge + 1) /
                    static_cast<double>(all_scores.size()),
                false};
}

}  // namespace idecode::conformal
