#pragma once

#include <Eigen/Dense>

#include "idecode/rng.hpp"
#include "idecode/tensor.hpp"

namespace idecode::transforms {

enum class FamilyId {
  Identity,
  Rotation2D,
  RotationGrid90,
  RotationRangeClass,
  Projective,
  TimeFreqMask,
};

enum class OutputRule { IdentityOutput, ParamsTarget };

// A transformation family G with its uniform sampling distribution Q_G.
// Ranges below are the parameter domain; defaults follow the projective
// recipe (scale in [0.8, 1.2], quarter-turn grid rotation, corner jitter
// up to +/-0.125 of the side length) and full-circle planar rotation.
struct TransformFamily {
  FamilyId family_id = FamilyId::Identity;
  OutputRule output_rule = OutputRule::IdentityOutput;

  // Rotation2D, radians.
  double angle_min = 0.0;
  double angle_max = 6.283185307179586;

  // Projective.
  double scale_min = 0.8;
  double scale_max = 1.2;
  double corner_jitter = 0.125;

  // TimeFreqMask: mask length uniform in [0, mask_fraction * axis_length].
  double mask_fraction = 0.2;
};

// One sampled g: family tag, raw parameter vector, and the paired output
// rule. Parameter layout per family:
//   Identity           : ()
//   Rotation2D         : (theta)                      radians
//   RotationGrid90     : (class)                      class in {0,1,2,3}
//   RotationRangeClass : (class, angle_deg)           integer degrees
//   Projective         : (scale, class, dx0,dy0,...,dx3,dy3)
//   TimeFreqMask       : (t0, t_len, f0, f_len)       fractions of the axis
struct TransformInstance {
  FamilyId family_id = FamilyId::Identity;
  std::vector<double> params;
  OutputRule output_rule = OutputRule::IdentityOutput;
};

// Draws one instance uniformly from the family's parameter domain.
// Deterministic given the stream state.
TransformInstance sample_transform(const TransformFamily& family,
                                   RngStream& rng);

// g(x). Vector families act on 2-vectors; grid families act on rank-2
// tensors (warped grids use bilinear interpolation with zero padding) and
// preserve shape. Throws IncompatibleShape.
Tensor apply(const TransformInstance& g, const Tensor& x);

// g'(y): identity for the invariance rule, encode_params(g) for the
// auxiliary-task rule (output independent of y).
Tensor output_transform(const TransformInstance& g, const Tensor& y);

// Canonical flat encoding of g: 3x3 homography (bottom-right 1) for
// Projective, 4-way one-hot for the class families ordered
// (0,90,180,270 degrees), (theta) for Rotation2D, mask bounds for
// TimeFreqMask, empty for Identity.
Tensor encode_params(const TransformInstance& g);

// Composed 3x3 homography in unit-square coordinates: scale about the
// center, then grid rotation, then the corner-displacement homography
// fitted by the 4-point direct linear solve.
Eigen::Matrix3d projective_matrix(const TransformInstance& g);

// True iff the instance's params lie inside the family's declared domain.
bool params_in_domain(const TransformFamily& family,
                      const TransformInstance& g);

}  // namespace idecode::transforms
