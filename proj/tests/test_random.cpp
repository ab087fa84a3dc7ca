#include <doctest.h>

#include <cmath>
#include <random>

#include "l1pca/random.hpp"

using namespace l1pca;

TEST_CASE("Philox4x32-10 known answers") {
  using B = Philox::Block;
  CHECK(Philox::block(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox::block(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox a(42, 1), b(42, 1), c(42, 2);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("distribution moments") {
  Philox rng(7, 3);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sl2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    const double l = rng.laplace(0.5);
    sl2 += l * l;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sl2 / n == doctest::Approx(2 * 0.25).epsilon(0.03));  // var = 2 b^2
}

TEST_CASE("below stays in range and works as a URBG") {
  Philox rng(1, 1);
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
  std::uniform_int_distribution<int> dist(0, 3);
  for (int i = 0; i < 100; ++i) {
    const int v = dist(rng);
    CHECK(v >= 0);
    CHECK(v <= 3);
  }
}
