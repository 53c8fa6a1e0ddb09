#include "idecode/ncm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace idecode::ncm {

namespace {

constexpr double kLogClamp = 1e-12;

void require_same_shape(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape)
    throw Error(ErrorCode::IncompatibleShape, "tensor shapes differ");
}

void require_distribution(const Tensor& p, bool strictly_positive) {
  double sum = 0.0;
  for (double v : p.data) {
    if (v < 0.0 || (strictly_positive && v <= 0.0))
      throw Error(ErrorCode::InvalidDistribution,
                  "probability vector has an invalid entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidDistribution,
                "probabilities do not sum to 1");
}

int hot_index(const Tensor& onehot) {
  int hot = -1;
  for (std::size_t i = 0; i < onehot.data.size(); ++i) {
    if (onehot.data[i] == 1.0) {
      if (hot >= 0)
        throw Error(ErrorCode::InvalidDistribution, "multiple hot entries");
      hot = static_cast<int>(i);
    } else if (onehot.data[i] != 0.0) {
      throw Error(ErrorCode::InvalidDistribution, "not a one-hot vector");
    }
  }
  if (hot < 0)
    throw Error(ErrorCode::InvalidDistribution, "one-hot vector has no hot entry");
  return hot;
}

}  // namespace

double loss_squared_error(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b);
  return (a.vec() - b.vec()).squaredNorm();
}

double loss_cross_entropy(const Tensor& probs, const Tensor& onehot) {
  require_same_shape(probs, onehot);
  require_distribution(probs, /*strictly_positive=*/false);
  const int hot = hot_index(onehot);
  return -std::log(std::clamp(probs.data[hot], kLogClamp, 1.0));
}

double loss_kl(const Tensor& p, const Tensor& q) {
  require_same_shape(p, q);
  require_distribution(p, /*strictly_positive=*/false);
  require_distribution(q, /*strictly_positive=*/true);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    if (p.data[i] > 0.0) sum += p.data[i] * std::log(p.data[i] / q.data[i]);
  }
  return sum;
}

double base_ncm(const NcmConfig& cfg, const models::Model& m, const Tensor& x,
                const transforms::TransformInstance& g) {
  auto loss = [&](const Tensor& a, const Tensor& b) {
    switch (cfg.loss_kind) {
      case LossKind::SquaredError: return loss_squared_error(a, b);
      case LossKind::CrossEntropy: return loss_cross_entropy(a, b);
      case LossKind::KlDivergence: return loss_kl(a, b);
    }
    throw Error(ErrorCode::ConfigError, "unknown loss kind");
  };
  switch (cfg.ncm_kind) {
    case NcmKind::EquivarianceError:
      return loss(models::evaluate(m, transforms::apply(g, x)),
                  models::evaluate(m, x));
    case NcmKind::AuxiliaryTask:
      return loss(models::predict_transform(m, x, transforms::apply(g, x)),
                  transforms::encode_params(g));
    case NcmKind::KnnDistance:
      throw Error(ErrorCode::ConfigError,
                  "KnnDistance scores come from base_ncm_knn");
  }
  throw Error(ErrorCode::ConfigError, "unknown ncm kind");
}

double base_ncm_knn(const std::vector<Tensor>& train_features, const Tensor& x,
                    int k) {
  if (train_features.empty())
    throw Error(ErrorCode::EmptyTrainingSet, "no training features");
  if (k < 1 || static_cast<std::size_t>(k) > train_features.size())
    throw Error(ErrorCode::KTooLarge,
                "k = " + std::to_string(k) + " exceeds training size " +
                    std::to_string(train_features.size()));
  std::vector<double> dist(train_features.size());
  for (std::size_t i = 0; i < train_features.size(); ++i) {
    require_same_shape(train_features[i], x);
    dist[i] = (train_features[i].vec() - x.vec()).norm();
  }
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += dist[order[i]];
  return sum / k;
}

}  // namespace idecode::ncm
