#include <doctest.h>

#include <cmath>

#include "idecode/transforms.hpp"

using namespace idecode;
using namespace idecode::transforms;

namespace {
const double kPi = 3.141592653589793;
}

TEST_CASE("identity sampling and application") {
  TransformFamily fam;
  RngStream rng(1);
  const auto g = sample_transform(fam, rng);
  CHECK(g.params.empty());
  const Tensor x = make_tensor({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(apply(g, x) == x);
  CHECK(encode_params(g).data.empty());
}

TEST_CASE("quarter-turn index map on a 2x2 grid") {
  TransformInstance g{FamilyId::RotationGrid90, {1.0},
                      OutputRule::IdentityOutput};
  const Tensor x = make_tensor({2, 2}, {1, 2, 3, 4});
  const Tensor y = apply(g, x);
  CHECK(y.data == std::vector<double>{3, 1, 4, 2});
}

TEST_CASE("four quarter-turns restore the grid exactly") {
  RngStream rng(3);
  Tensor x = make_tensor({5, 5}, std::vector<double>(25));
  for (auto& v : x.data) v = rng.next_f64();
  TransformInstance g{FamilyId::RotationGrid90, {1.0},
                      OutputRule::IdentityOutput};
  Tensor y = x;
  for (int i = 0; i < 4; ++i) y = apply(g, y);
  CHECK(y == x);
}

TEST_CASE("rotation by pi flips a unit vector") {
  TransformInstance g{FamilyId::Rotation2D, {kPi}, OutputRule::IdentityOutput};
  const Tensor y = apply(g, make_vector({1, 0}));
  CHECK(y.data[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(y.data[1]) < 1e-12);
}

TEST_CASE("planar rotation preserves the norm") {
  TransformFamily fam;
  fam.family_id = FamilyId::Rotation2D;
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    RngStream sub = rng.derive(i);
    const auto g = sample_transform(fam, sub);
    const Tensor x = make_vector({4.0 * sub.next_f64() - 2.0,
                                  4.0 * sub.next_f64() - 2.0});
    CHECK(apply(g, x).vec().norm() ==
          doctest::Approx(x.vec().norm()).epsilon(1e-10));
  }
}

TEST_CASE("grid-90 sampling is uniform over the four classes") {
  TransformFamily fam;
  fam.family_id = FamilyId::RotationGrid90;
  RngStream rng(17);
  int counts[4] = {0, 0, 0, 0};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    RngStream sub = rng.derive(i);
    ++counts[static_cast<int>(sample_transform(fam, sub).params[0])];
  }
  for (int c : counts) {
    const double freq = static_cast<double>(c) / draws;
    CHECK(freq == doctest::Approx(0.25).epsilon(0.04));
    CHECK(std::abs(freq - 0.25) < 0.01);
  }
}

TEST_CASE("rotation-range classes land in their declared degree windows") {
  TransformFamily fam;
  fam.family_id = FamilyId::RotationRangeClass;
  RngStream rng(23);
  const int lo[4] = {-10, 80, 170, 260};
  for (int i = 0; i < 5000; ++i) {
    RngStream sub = rng.derive(i);
    const auto g = sample_transform(fam, sub);
    const int cls = static_cast<int>(g.params[0]);
    CHECK(cls >= 0);
    CHECK(cls <= 3);
    CHECK(g.params[1] >= lo[cls]);
    CHECK(g.params[1] <= lo[cls] + 20);
    CHECK(g.params[1] == std::floor(g.params[1]));
    CHECK(params_in_domain(fam, g));
  }
}

TEST_CASE("projective sampling stays in its domain") {
  TransformFamily fam;
  fam.family_id = FamilyId::Projective;
  RngStream rng(29);
  for (int i = 0; i < 5000; ++i) {
    RngStream sub = rng.derive(i);
    CHECK(params_in_domain(fam, sample_transform(fam, sub)));
  }
}

TEST_CASE("pure unit-scale projective encodes the identity homography") {
  TransformInstance g{FamilyId::Projective,
                      {1.0, 0.0, 0, 0, 0, 0, 0, 0, 0, 0},
                      OutputRule::IdentityOutput};
  const Tensor enc = encode_params(g);
  const std::vector<double> id9 = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  REQUIRE(enc.data.size() == 9);
  for (int i = 0; i < 9; ++i)
    CHECK(enc.data[i] == doctest::Approx(id9[i]).epsilon(1e-12));
}

TEST_CASE("identity projective warp reproduces the grid") {
  TransformInstance g{FamilyId::Projective,
                      {1.0, 0.0, 0, 0, 0, 0, 0, 0, 0, 0},
                      OutputRule::IdentityOutput};
  RngStream rng(31);
  Tensor x = make_tensor({8, 8}, std::vector<double>(64));
  for (auto& v : x.data) v = rng.next_f64();
  const Tensor y = apply(g, x);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    CHECK(y.data[i] == doctest::Approx(x.data[i]).epsilon(1e-9));
}

TEST_CASE("corner homography maps the displaced corners") {
  TransformInstance g{FamilyId::Projective,
                      {1.0, 0.0, 0.05, -0.03, 0.0, 0.1, -0.08, 0.02, 0.04, 0.0},
                      OutputRule::IdentityOutput};
  const Eigen::Matrix3d m = projective_matrix(g);
  const double src[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const double off[8] = {0.05, -0.03, 0.0, 0.1, -0.08, 0.02, 0.04, 0.0};
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d mapped = m * Eigen::Vector3d(src[i][0], src[i][1], 1);
    CHECK(mapped(0) / mapped(2) ==
          doctest::Approx(src[i][0] + off[2 * i]).epsilon(1e-9));
    CHECK(mapped(1) / mapped(2) ==
          doctest::Approx(src[i][1] + off[2 * i + 1]).epsilon(1e-9));
  }
}

TEST_CASE("one-hot encodings follow the (0,90,180,270) ordering") {
  TransformInstance g{FamilyId::RotationGrid90, {2.0},
                      OutputRule::IdentityOutput};
  CHECK(encode_params(g).data == std::vector<double>{0, 0, 1, 0});
  TransformInstance r{FamilyId::RotationRangeClass, {2.0, 185.0},
                      OutputRule::ParamsTarget};
  CHECK(encode_params(r).data == std::vector<double>{0, 0, 1, 0});
}

TEST_CASE("output transform rules") {
  const Tensor y = make_vector({0.3, 0.7});
  TransformInstance id_rule{FamilyId::Rotation2D, {1.25},
                            OutputRule::IdentityOutput};
  CHECK(output_transform(id_rule, y) == y);
  TransformInstance params_rule{FamilyId::Rotation2D, {1.25},
                                OutputRule::ParamsTarget};
  CHECK(output_transform(params_rule, y).data == std::vector<double>{1.25});
}

TEST_CASE("time-frequency mask replaces bands with the mean") {
  TransformInstance g{FamilyId::TimeFreqMask, {0.0, 0.2, 0.5, 0.2},
                      OutputRule::IdentityOutput};
  Tensor x = make_tensor({10, 10}, std::vector<double>(100, 0.0));
  for (std::size_t i = 0; i < 100; ++i) x.data[i] = static_cast<double>(i);
  const double mean = x.vec().mean();
  const Tensor y = apply(g, x);
  // Rows [0,2) and columns [5,7) carry the mean, the rest is untouched.
  for (std::int64_t r = 0; r < 10; ++r) {
    for (std::int64_t c = 0; c < 10; ++c) {
      if (r < 2 || (c >= 5 && c < 7))
        CHECK(y.at(r, c) == mean);
      else
        CHECK(y.at(r, c) == x.at(r, c));
    }
  }
}

TEST_CASE("masks of zero length change nothing") {
  TransformInstance g{FamilyId::TimeFreqMask, {0.3, 0.0, 0.6, 0.0},
                      OutputRule::IdentityOutput};
  const Tensor x = make_tensor({4, 4}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12,
                                        13, 14, 15, 16});
  CHECK(apply(g, x) == x);
}

TEST_CASE("sampled parameters always satisfy the family domain") {
  RngStream rng(41);
  for (auto id : {FamilyId::Identity, FamilyId::Rotation2D,
                  FamilyId::RotationGrid90, FamilyId::RotationRangeClass,
                  FamilyId::Projective, FamilyId::TimeFreqMask}) {
    TransformFamily fam;
    fam.family_id = id;
    for (int i = 0; i < 2000; ++i) {
      RngStream sub = rng.derive(static_cast<int>(id) * 10000 + i);
      const auto g = sample_transform(fam, sub);
      CHECK(params_in_domain(fam, g));
      const Tensor enc = encode_params(g);
      for (double v : enc.data) CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("incompatible shapes are rejected") {
  TransformInstance rot{FamilyId::Rotation2D, {0.5}, OutputRule::IdentityOutput};
  CHECK_THROWS_AS(apply(rot, make_vector({1, 2, 3})), Error);
  TransformInstance grid{FamilyId::RotationGrid90, {1.0},
                         OutputRule::IdentityOutput};
  CHECK_THROWS_AS(apply(grid, make_tensor({2, 3}, {1, 2, 3, 4, 5, 6})), Error);
}
