#pragma once

#include "idecode/models.hpp"
#include "idecode/transforms.hpp"

namespace idecode::ncm {

enum class NcmKind { EquivarianceError, AuxiliaryTask, KnnDistance };
enum class LossKind { SquaredError, CrossEntropy, KlDivergence };

struct NcmConfig {
  NcmKind ncm_kind = NcmKind::EquivarianceError;
  LossKind loss_kind = LossKind::SquaredError;
  int k = 1;  // KnnDistance only
};

// Sum of squared element differences.
double loss_squared_error(const Tensor& a, const Tensor& b);

// -log(probs[hot]); probabilities are clamped to [1e-12, 1] before the log.
double loss_cross_entropy(const Tensor& probs, const Tensor& onehot);

// KL(p || q) with the 0 * log 0 = 0 convention; q must be strictly positive.
double loss_kl(const Tensor& p, const Tensor& q);

// The per-transform nonconformity score.
//   EquivarianceError: L(M(g(x)), M(x))        invariance rule
//   AuxiliaryTask:     L(M_aux(x, g(x)), enc(g))
double base_ncm(const NcmConfig& cfg, const models::Model& m, const Tensor& x,
                const transforms::TransformInstance& g);

// Mean Euclidean distance from x to its k nearest training points,
// distance ties broken by insertion order.
double base_ncm_knn(const std::vector<Tensor>& train_features, const Tensor& x,
                    int k);

}  // namespace idecode::ncm
