#include "idecode/models.hpp"

#include <cmath>
#include <cstring>

#include "idecode/rng.hpp"

namespace idecode::models {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void require_vec2(const Tensor& x) {
  if (x.shape.size() != 1 || x.shape[0] != 2)
    throw Error(ErrorCode::IncompatibleShape, "expected a 2-vector");
}

bool in_annulus(const Model& m, const Tensor& x) {
  const double r = x.vec().norm();
  return r >= m.r_lo && r <= m.r_hi;
}

// Gaussian noise keyed on (noise_seed, input bits, output index); the same
// input always receives the same noise.
double output_noise(const Model& m, const Tensor& x, std::uint64_t index) {
  if (m.noise_sigma == 0.0) return 0.0;
  std::uint64_t key = mix64(m.noise_seed);
  for (double v : x.data) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    key = mix64(key ^ mix64(bits));
  }
  key = mix64(key ^ mix64(index));
  const double u1 =
      1.0 - static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(mix64(key + 1) >> 11) * 0x1.0p-53;
  return m.noise_sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(kTwoPi * u2);
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

}  // namespace

Tensor evaluate(const Model& m, const Tensor& x) {
  if (m.model_id != ModelId::AnnulusInvariant)
    throw Error(ErrorCode::WrongModelKind,
                "evaluate is defined for AnnulusInvariant only");
  require_vec2(x);
  const double base = in_annulus(m, x) ? x.vec().norm() : x.data[0];
  return make_vector({base + output_noise(m, x, 0)});
}

Tensor predict_transform(const Model& m, const Tensor& x, const Tensor& gx) {
  require_vec2(x);
  require_vec2(gx);
  switch (m.model_id) {
    case ModelId::AnglePredictor: {
      if (!in_annulus(m, x)) return make_vector({0.0});
      const double delta = std::atan2(gx.data[1], gx.data[0]) -
                           std::atan2(x.data[1], x.data[0]);
      return make_vector({wrap_angle(delta)});
    }
    case ModelId::RotationClassSoftmax: {
      const double beta = in_annulus(m, x) ? m.beta : 0.0;
      // d_c = squared distance of gx to x rotated by c quarter turns.
      const double rx[4] = {x.data[0], -x.data[1], -x.data[0], x.data[1]};
      const double ry[4] = {x.data[1], x.data[0], -x.data[1], -x.data[0]};
      Eigen::Vector4d logits;
      for (int c = 0; c < 4; ++c) {
        const double dx = gx.data[0] - rx[c], dy = gx.data[1] - ry[c];
        logits(c) = -beta * (dx * dx + dy * dy);
      }
      const Eigen::Vector4d shifted =
          (logits.array() - logits.maxCoeff()).exp();
      const Eigen::Vector4d probs = shifted / shifted.sum();
      return make_vector({probs(0), probs(1), probs(2), probs(3)});
    }
    default:
      throw Error(ErrorCode::WrongModelKind,
                  "predict_transform needs AnglePredictor or "
                  "RotationClassSoftmax");
  }
}

ScoreTable ingest_external(const std::vector<ScoreRecord>& records,
                           std::size_t n) {
  ScoreTable table;
  for (const auto& rec : records) {
    if (rec.scores.size() != n)
      throw Error(ErrorCode::SchemaViolation,
                  "record '" + rec.id + "' has " +
                      std::to_string(rec.scores.size()) +
                      " scores, header declares " + std::to_string(n));
    for (double s : rec.scores)
      if (!std::isfinite(s))
        throw Error(ErrorCode::NonFiniteScore,
                    "record '" + rec.id + "' has a non-finite score");
    if (!table.emplace(rec.id, rec.scores).second)
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + rec.id + "'");
  }
  return table;
}

}  // namespace idecode::models
