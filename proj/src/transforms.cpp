#include "idecode/transforms.hpp"

#include <cmath>

namespace idecode::transforms {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kDegToRad = 0.017453292519943295;

// Quarter-turn cos/sin, exact.
constexpr int kCos[4] = {1, 0, -1, 0};
constexpr int kSin[4] = {0, 1, 0, -1};

// Integer-degree range per rotation class.
constexpr int kClassLo[4] = {-10, 80, 170, 260};
constexpr int kClassHi[4] = {10, 100, 190, 280};

void require_vec2(const Tensor& x) {
  if (x.shape.size() != 1 || x.shape[0] != 2)
    throw Error(ErrorCode::IncompatibleShape, "expected a 2-vector");
}

void require_grid(const Tensor& x) {
  if (x.shape.size() != 2)
    throw Error(ErrorCode::IncompatibleShape, "expected a rank-2 grid");
}

Tensor rotate_vec2(const Tensor& x, double theta) {
  require_vec2(x);
  const double c = std::cos(theta), s = std::sin(theta);
  return make_vector({c * x.data[0] - s * x.data[1],
                      s * x.data[0] + c * x.data[1]});
}

// Exact quarter-turn of a 2-vector, counterclockwise.
Tensor quarter_turn_vec2(const Tensor& x, int cls) {
  const double c = kCos[cls], s = kSin[cls];
  return make_vector({c * x.data[0] - s * x.data[1],
                      s * x.data[0] + c * x.data[1]});
}

// One clockwise quarter-turn of a square grid: out[r][c] = in[n-1-c][r].
Tensor quarter_turn_grid_once(const Tensor& x) {
  const auto n = x.rows();
  Tensor out = x;
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t c = 0; c < n; ++c) out.at(r, c) = x.at(n - 1 - c, r);
  return out;
}

double bilinear(const Tensor& img, double y, double x) {
  const auto h = img.rows(), w = img.cols();
  const auto x0 = static_cast<std::int64_t>(std::floor(x));
  const auto y0 = static_cast<std::int64_t>(std::floor(y));
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  auto px = [&](std::int64_t r, std::int64_t c) -> double {
    if (r < 0 || r >= h || c < 0 || c >= w) return 0.0;  // zero padding
    return img.at(r, c);
  };
  return (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x0 + 1)) +
         fy * ((1 - fx) * px(y0 + 1, x0) + fx * px(y0 + 1, x0 + 1));
}

Tensor rotate_grid(const Tensor& x, double theta) {
  const auto h = x.rows(), w = x.cols();
  const double cy = 0.5 * static_cast<double>(h - 1);
  const double cx = 0.5 * static_cast<double>(w - 1);
  const double c = std::cos(theta), s = std::sin(theta);
  Tensor out = x;
  for (std::int64_t r = 0; r < h; ++r) {
    for (std::int64_t cc = 0; cc < w; ++cc) {
      // Inverse map: rotate the destination point back into the source.
      const double dx = static_cast<double>(cc) - cx;
      const double dy = static_cast<double>(r) - cy;
      const double sx = c * dx + s * dy + cx;
      const double sy = -s * dx + c * dy + cy;
      out.at(r, cc) = bilinear(x, sy, sx);
    }
  }
  return out;
}

// Homography sending the unit-square corners to corners + offsets,
// fitted by the standard 4-point direct linear solve.
Eigen::Matrix3d corner_homography(const double* offsets) {
  bool all_zero = true;
  for (int i = 0; i < 8; ++i)
    if (offsets[i] != 0.0) all_zero = false;
  if (all_zero) return Eigen::Matrix3d::Identity();

  const double src[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = src[i][0], y = src[i][1];
    const double xd = x + offsets[2 * i], yd = y + offsets[2 * i + 1];
    a.row(2 * i) << x, y, 1, 0, 0, 0, -xd * x, -xd * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -yd * x, -yd * y;
    b(2 * i) = xd;
    b(2 * i + 1) = yd;
  }
  const Eigen::Matrix<double, 8, 1> h = a.colPivHouseholderQr().solve(b);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return m;
}

Tensor warp_grid(const Tensor& x, const Eigen::Matrix3d& m) {
  const auto h = x.rows(), w = x.cols();
  const Eigen::Matrix3d inv = m.inverse();
  Tensor out = x;
  for (std::int64_t r = 0; r < h; ++r) {
    for (std::int64_t c = 0; c < w; ++c) {
      const double u = (static_cast<double>(c) + 0.5) / static_cast<double>(w);
      const double v = (static_cast<double>(r) + 0.5) / static_cast<double>(h);
      const Eigen::Vector3d s = inv * Eigen::Vector3d(u, v, 1.0);
      const double su = s(0) / s(2), sv = s(1) / s(2);
      const double sx = su * static_cast<double>(w) - 0.5;
      const double sy = sv * static_cast<double>(h) - 0.5;
      out.at(r, c) = bilinear(x, sy, sx);
    }
  }
  return out;
}

Tensor apply_mask(const Tensor& x, const std::vector<double>& p) {
  require_grid(x);
  const auto rows = x.rows(), cols = x.cols();
  const double mean = x.vec().mean();
  auto band = [](double start_frac, double len_frac, std::int64_t axis)
      -> std::pair<std::int64_t, std::int64_t> {
    auto len = static_cast<std::int64_t>(std::llround(len_frac * axis));
    auto start = static_cast<std::int64_t>(std::floor(start_frac * axis));
    start = std::min(start, axis - len);
    return {start, start + len};
  };
  const auto [t0, t1] = band(p[0], p[1], rows);
  const auto [f0, f1] = band(p[2], p[3], cols);
  Tensor out = x;
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      if ((r >= t0 && r < t1) || (c >= f0 && c < f1)) out.at(r, c) = mean;
  return out;
}

Tensor one_hot4(int cls) {
  std::vector<double> v(4, 0.0);
  v[cls] = 1.0;
  return make_vector(std::move(v));
}

}  // namespace

TransformInstance sample_transform(const TransformFamily& family,
                                   RngStream& rng) {
  TransformInstance g;
  g.family_id = family.family_id;
  g.output_rule = family.output_rule;
  switch (family.family_id) {
    case FamilyId::Identity:
      break;
    case FamilyId::Rotation2D:
      g.params = {family.angle_min +
                  rng.next_f64() * (family.angle_max - family.angle_min)};
      break;
    case FamilyId::RotationGrid90:
      g.params = {static_cast<double>(rng.next_below(4))};
      break;
    case FamilyId::RotationRangeClass: {
      const auto cls = static_cast<int>(rng.next_below(4));
      const auto span =
          static_cast<std::uint64_t>(kClassHi[cls] - kClassLo[cls] + 1);
      const double angle =
          static_cast<double>(kClassLo[cls] + static_cast<int>(rng.next_below(span)));
      g.params = {static_cast<double>(cls), angle};
      break;
    }
    case FamilyId::Projective: {
      g.params.push_back(family.scale_min +
                         rng.next_f64() * (family.scale_max - family.scale_min));
      g.params.push_back(static_cast<double>(rng.next_below(4)));
      for (int i = 0; i < 8; ++i)
        g.params.push_back((2.0 * rng.next_f64() - 1.0) * family.corner_jitter);
      break;
    }
    case FamilyId::TimeFreqMask:
      g.params = {rng.next_f64(), rng.next_f64() * family.mask_fraction,
                  rng.next_f64(), rng.next_f64() * family.mask_fraction};
      break;
  }
  return g;
}

Tensor apply(const TransformInstance& g, const Tensor& x) {
  switch (g.family_id) {
    case FamilyId::Identity:
      return x;
    case FamilyId::Rotation2D:
      return rotate_vec2(x, g.params[0]);
    case FamilyId::RotationGrid90: {
      const int cls = static_cast<int>(g.params[0]);
      if (x.shape.size() == 1 && x.shape[0] == 2)
        return quarter_turn_vec2(x, cls);
      require_grid(x);
      if (x.rows() != x.cols())
        throw Error(ErrorCode::IncompatibleShape,
                    "quarter-turn grid must be square");
      Tensor out = x;
      for (int i = 0; i < cls; ++i) out = quarter_turn_grid_once(out);
      return out;
    }
    case FamilyId::RotationRangeClass: {
      const double theta = g.params[1] * kDegToRad;
      if (x.shape.size() == 1 && x.shape[0] == 2)
        return rotate_vec2(x, theta);
      require_grid(x);
      return rotate_grid(x, theta);
    }
    case FamilyId::Projective:
      require_grid(x);
      return warp_grid(x, projective_matrix(g));
    case FamilyId::TimeFreqMask:
      return apply_mask(x, g.params);
  }
  throw Error(ErrorCode::IncompatibleShape, "unknown family");
}

Tensor output_transform(const TransformInstance& g, const Tensor& y) {
  if (g.output_rule == OutputRule::IdentityOutput) return y;
  return encode_params(g);
}

Eigen::Matrix3d projective_matrix(const TransformInstance& g) {
  const double s = g.params[0];
  const int cls = static_cast<int>(g.params[1]);
  const Eigen::Vector2d center(0.5, 0.5);

  auto about_center = [&](const Eigen::Matrix2d& lin) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m.topLeftCorner<2, 2>() = lin;
    m.topRightCorner<2, 1>() = center - lin * center;
    return m;
  };
  const Eigen::Matrix3d scale =
      about_center(Eigen::Matrix2d{{s, 0.0}, {0.0, s}});
  const Eigen::Matrix3d rot = about_center(
      Eigen::Matrix2d{{static_cast<double>(kCos[cls]),
                       static_cast<double>(-kSin[cls])},
                      {static_cast<double>(kSin[cls]),
                       static_cast<double>(kCos[cls])}});
  const Eigen::Matrix3d disp = corner_homography(g.params.data() + 2);
  return disp * rot * scale;
}

Tensor encode_params(const TransformInstance& g) {
  switch (g.family_id) {
    case FamilyId::Identity:
      return Tensor{{0}, {}};
    case FamilyId::Rotation2D:
      return make_vector({g.params[0]});
    case FamilyId::RotationGrid90:
      return one_hot4(static_cast<int>(g.params[0]));
    case FamilyId::RotationRangeClass:
      return one_hot4(static_cast<int>(g.params[0]));
    case FamilyId::Projective: {
      Eigen::Matrix3d m = projective_matrix(g);
      m /= m(2, 2);
      std::vector<double> flat(9);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) flat[3 * r + c] = m(r, c);
      return make_vector(std::move(flat));
    }
    case FamilyId::TimeFreqMask:
      return make_vector({g.params[0], g.params[1], g.params[2], g.params[3]});
  }
  throw Error(ErrorCode::IncompatibleShape, "unknown family");
}

bool params_in_domain(const TransformFamily& family,
                      const TransformInstance& g) {
  if (g.family_id != family.family_id) return false;
  const auto& p = g.params;
  switch (family.family_id) {
    case FamilyId::Identity:
      return p.empty();
    case FamilyId::Rotation2D:
      return p.size() == 1 && p[0] >= family.angle_min &&
             p[0] <= family.angle_max;
    case FamilyId::RotationGrid90:
      return p.size() == 1 && p[0] >= 0 && p[0] <= 3 &&
             p[0] == std::floor(p[0]);
    case FamilyId::RotationRangeClass: {
      if (p.size() != 2) return false;
      const int cls = static_cast<int>(p[0]);
      return p[0] == std::floor(p[0]) && cls >= 0 && cls <= 3 &&
             p[1] == std::floor(p[1]) && p[1] >= kClassLo[cls] &&
             p[1] <= kClassHi[cls];
    }
    case FamilyId::Projective: {
      if (p.size() != 10) return false;
      if (p[0] < family.scale_min || p[0] > family.scale_max) return false;
      if (p[1] != std::floor(p[1]) || p[1] < 0 || p[1] > 3) return false;
      for (int i = 2; i < 10; ++i)
        if (std::abs(p[i]) > family.corner_jitter) return false;
      return true;
    }
    case FamilyId::TimeFreqMask:
      return p.size() == 4 && p[0] >= 0 && p[0] < 1 && p[2] >= 0 && p[2] < 1 &&
             p[1] >= 0 && p[1] <= family.mask_fraction && p[3] >= 0 &&
             p[3] <= family.mask_fraction;
  }
  return false;
}

}  // namespace idecode::transforms
