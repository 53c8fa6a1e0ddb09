#pragma once

#include "idecode/tensor.hpp"

namespace idecode::synthetic {

enum class SyntheticKind { AnnulusId, RingOod };

// Points r * (cos t, sin t), t uniform, r ~ Normal(radius_mean, radius_sd).
// The iD defaults keep essentially all mass inside the [0.5, 1.5] annulus.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::AnnulusId;
  std::size_t count = 0;
  double radius_mean = 1.0;
  double radius_sd = 0.1;
  std::uint64_t seed = 0;
};

std::vector<Tensor> generate(const SyntheticSpec& spec);

// Brute-force counterparts of the main implementations. They share no code
// with the paths they check.

// Linear-scan conformal p-value over an unsorted calibration list.
double oracle_p_value(const std::vector<double>& cal_scores, double test);

// All-pairs AUROC with half credit for ties.
double oracle_auroc(const std::vector<double>& id_p,
                    const std::vector<double>& ood_p);

}  // namespace idecode::synthetic
