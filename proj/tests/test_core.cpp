#include <doctest.h>

#include "idecode/rng.hpp"
#include "idecode/tensor.hpp"

using namespace idecode;

TEST_CASE("derive_stream determinism") {
  RngStream root(42);
  RngStream a = root.derive(0);
  RngStream b = root.derive(0);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("sibling streams differ") {
  RngStream root(42);
  RngStream a = root.derive(0);
  RngStream b = root.derive(1);
  bool any_diff = false;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() != b.next_u64()) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("path order matters") {
  RngStream root(42);
  RngStream a = root.derive(0).derive(1);
  RngStream b = root.derive(1).derive(0);
  bool any_diff = false;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() != b.next_u64()) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("derivation does not disturb the parent draw position") {
  RngStream a(7);
  RngStream b(7);
  (void)a.derive(3);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform variates stay in [0,1)") {
  RngStream s(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_f64();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("next_below covers all residues") {
  RngStream s(5);
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < 4000; ++i) ++counts[s.next_below(4)];
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("validate_tensor accepts consistent shape") {
  const Tensor t = make_tensor({2, 2}, {1, 2, 3, 4});
  CHECK(t.size() == 4);
  CHECK(t.at(1, 0) == 3);
}

TEST_CASE("validate_tensor rejects shape mismatch") {
  CHECK_THROWS_WITH_AS(make_tensor({2, 2}, {1, 2, 3}),
                       doctest::Contains("does not match"), Error);
}

TEST_CASE("validate_tensor rejects non-finite data") {
  try {
    make_tensor({1}, {std::nan("")});
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
  try {
    make_tensor({1}, {std::numeric_limits<double>::infinity()});
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
}
