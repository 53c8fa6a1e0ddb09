#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "idecode/conformal.hpp"
#include "idecode/synthetic.hpp"

using namespace idecode;
using namespace idecode::conformal;

namespace {

CalibrationArtifact art_from(std::vector<double> scores) {
  return artifact_from_scores(std::move(scores), 1, 0, 0);
}

}  // namespace

TEST_CASE("score vector length and validation") {
  ncm::NcmConfig cfg;
  models::Model m;
  transforms::TransformFamily fam;
  fam.family_id = transforms::FamilyId::Rotation2D;
  const Tensor x = make_vector({1, 0});
  CHECK(score_vector(cfg, m, fam, x, 1, RngStream(1)).scores.size() == 1);
  const auto v = score_vector(cfg, m, fam, x, 5, RngStream(1));
  CHECK(v.scores.size() == 5);
  for (double s : v.scores) CHECK(s == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(score_vector(cfg, m, fam, x, 0, RngStream(1)), Error);
}

TEST_CASE("score vector is reproducible and order-independent per index") {
  ncm::NcmConfig cfg;
  models::Model m;
  transforms::TransformFamily fam;
  fam.family_id = transforms::FamilyId::Rotation2D;
  const Tensor x = make_vector({3, 0});
  const auto a = score_vector(cfg, m, fam, x, 8, RngStream(5).derive(2));
  const auto b = score_vector(cfg, m, fam, x, 8, RngStream(5).derive(2));
  CHECK(a.scores == b.scores);
  // The first n scores of a longer vector coincide with a shorter one.
  const auto c = score_vector(cfg, m, fam, x, 3, RngStream(5).derive(2));
  for (int i = 0; i < 3; ++i) CHECK(a.scores[i] == c.scores[i]);
}

TEST_CASE("aggregate sums") {
  ScoreVector v{{0.1, 0.2, 0.3}, {}, ""};
  CHECK(aggregate(AggregateKind::Sum, v) == doctest::Approx(0.6).epsilon(1e-15));
  ScoreVector single{{0.4}, {}, ""};
  CHECK(aggregate(AggregateKind::Sum, single) == 0.4);
  ScoreVector zeros{{0, 0, 0, 0, 0}, {}, ""};
  CHECK(aggregate(AggregateKind::Sum, zeros) == 0.0);
  CHECK_THROWS_AS(aggregate(AggregateKind::Sum, ScoreVector{}), Error);
}

TEST_CASE("calibrate sorts and is deterministic") {
  ncm::NcmConfig cfg;
  models::Model m;
  transforms::TransformFamily fam;
  fam.family_id = transforms::FamilyId::Rotation2D;
  const auto points = synthetic::generate({synthetic::SyntheticKind::AnnulusId,
                                           50, 1.0, 0.1, 7});
  const auto a = calibrate(points, cfg, m, fam, 5, 3, RngStream(3, {0}), 0xabc);
  const auto b = calibrate(points, cfg, m, fam, 5, 3, RngStream(3, {0}), 0xabc);
  CHECK(a.sorted_scores == b.sorted_scores);
  CHECK(std::is_sorted(a.sorted_scores.begin(), a.sorted_scores.end()));
  CHECK(a.k() == 50);
  // iD annulus points under the invariant model score ~0.
  for (double s : a.sorted_scores) CHECK(s == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(calibrate({}, cfg, m, fam, 5, 3, RngStream(3), 0), Error);
}

TEST_CASE("p-value hand examples") {
  const auto art = art_from({1, 2, 3, 4});
  CHECK(p_value(art, 2.5).value == 0.6);
  CHECK(p_value(art, 5.0).value == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p_value(art, 0.0).value == 1.0);
  CHECK_THROWS_AS(p_value(art, std::nan("")), Error);
}

TEST_CASE("smoothed p-value hand examples") {
  const auto art = art_from({1, 2, 3, 4});
  CHECK(p_value_smoothed(art, 2.5, 0.5).value == 0.5);
  const auto tied = art_from({2, 2, 2});
  const auto floor_p = p_value_smoothed(tied, 2.0, 0.0);
  CHECK(floor_p.value > 0.0);
  CHECK(floor_p.value <= 1e-300);
  CHECK(p_value_smoothed(tied, 2.0, 1.0 - 1e-12).value ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("p-value is non-increasing in the test score") {
  RngStream rng(13);
  std::vector<double> scores(60);
  for (auto& s : scores) s = rng.next_f64();
  const auto art = art_from(scores);
  double prev = 2.0;
  for (double t = -0.2; t <= 1.2; t += 0.01) {
    const double p = p_value(art, t).value;
    CHECK(p <= prev);
    prev = p;
  }
}

TEST_CASE("binary-search p-value equals the linear-scan oracle") {
  RngStream rng(21);
  for (int rep = 0; rep < 1000; ++rep) {
    RngStream s = rng.derive(rep);
    const auto k = 1 + s.next_below(40);
    std::vector<double> scores(k);
    // Coarse grid forces plenty of exact ties.
    for (auto& v : scores)
      v = static_cast<double>(s.next_below(8));
    const double test = static_cast<double>(s.next_below(10)) - 1.0;
    const auto art = art_from(scores);
    CHECK(p_value(art, test).value == synthetic::oracle_p_value(scores, test));
  }
}

TEST_CASE("detect applies the strict threshold") {
  const auto art = art_from({1, 2, 3, 4});
  CHECK_FALSE(detect(art, 2.5, 0.5).is_ood);   // p = 0.6
  CHECK(detect(art, 5.0, 0.25).is_ood);        // p = 0.2
  CHECK_FALSE(detect(art, 5.0, 0.2).is_ood);   // p = 0.2, strict boundary
  CHECK_THROWS_AS(detect(art, 1.0, 0.0), Error);
  CHECK_THROWS_AS(detect(art, 1.0, 1.0), Error);
}

TEST_CASE("full-CAD p-value") {
  CHECK(cad_p_value({1, 2, 3, 2.5}).value == 0.5);
  CHECK(cad_p_value({1, 2, 3, 0}).value == 1.0);
  CHECK(cad_p_value({1, 2, 3, 4}).value == 0.25);
  CHECK_THROWS_AS(cad_p_value({1}), Error);
}

TEST_CASE("strict p-values live on the (k+1) grid") {
  RngStream rng(33);
  std::vector<double> scores(19);
  for (auto& s : scores) s = rng.next_f64();
  const auto art = art_from(scores);
  for (int i = 0; i < 500; ++i) {
    const double p = p_value(art, rng.next_f64()).value;
    const double scaled = p * 20.0;
    CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
}
