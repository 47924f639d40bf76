#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "adaopt/errors.hpp"
#include "adaopt/numcore.hpp"
#include "adaopt/rng.hpp"

using adaopt::DimensionError;
using adaopt::DomainError;
using adaopt::NumericError;
using adaopt::ParamError;
using adaopt::SplitMix64;
namespace numcore = adaopt::numcore;
using numcore::BoxSet;
using numcore::RealVec;

TEST_CASE("elementwise operations") {
  CHECK(numcore::ew_max({3, 1}, {2, 5}) == RealVec{3, 5});
  CHECK(numcore::ew_square({-2, 3}) == RealVec{4, 9});
  CHECK(numcore::ew_sqrt({4, 0.25}) == RealVec{2, 0.5});
  CHECK(numcore::ew_add({1, 2}, {3, 4}) == RealVec{4, 6});
  CHECK(numcore::ew_add({1, 2}, 0.5) == RealVec{1.5, 2.5});
  CHECK(numcore::ew_scale(2.0, {1, 2}) == RealVec{2, 4});
  CHECK_THROWS_AS(numcore::ew_sqrt({4.0, -1.0}), DomainError);
  CHECK_THROWS_AS(numcore::ew_max({1.0}, {1.0, 2.0}), DimensionError);
}

TEST_CASE("safe_div division conventions") {
  CHECK(numcore::safe_div(RealVec{4, 0}, RealVec{2, 0}) == RealVec{2, 0});
  CHECK(numcore::safe_div(RealVec{1, 1}, RealVec{2, 4}) == RealVec{0.5, 0.25});
  CHECK_THROWS_AS(numcore::safe_div(RealVec{1, 0}, RealVec{0, 1}),
                  DomainError);
  CHECK(numcore::safe_div(0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(numcore::safe_div(1.0, -2.0), DomainError);
}

TEST_CASE("finiteness and size guards") {
  CHECK_THROWS_AS(
      numcore::require_finite(std::numeric_limits<double>::quiet_NaN(), "t"),
      NumericError);
  CHECK_THROWS_AS(
      numcore::require_finite(
          RealVec{1.0, std::numeric_limits<double>::infinity()}, "t"),
      NumericError);
  CHECK_NOTHROW(numcore::require_finite(RealVec{0.0, -5.0}, "t"));
  CHECK_THROWS_AS(numcore::require_same_size(RealVec{1}, RealVec{1, 2}, "t"),
                  DimensionError);
}

TEST_CASE("dot and linf_norm") {
  CHECK(numcore::dot({1, 2}, {3, 4}) == 11.0);
  CHECK(numcore::linf_norm({-3, 2}) == 3.0);
  CHECK(numcore::linf_norm({}) == 0.0);
}

TEST_CASE("box membership, clamping, diameter") {
  const BoxSet box = BoxSet::symmetric(2, 1.0);
  CHECK(box.dim() == 2);
  CHECK(box.diameter_inf() == 2.0);
  CHECK(box.contains({0.5, -1.0}));
  CHECK_FALSE(box.contains({1.5, 0.0}));
  CHECK(box.clamp({1.5, -0.3}) == RealVec{1.0, -0.3});
  CHECK(box.clamp1(-7.0, 0) == -1.0);
  CHECK(box.clamp1(0.25, 1) == 0.25);

  const BoxSet lop(RealVec{0, -2}, RealVec{0.5, 3});
  CHECK(lop.diameter_inf() == 5.0);

  CHECK_THROWS_AS(BoxSet(RealVec{1.0}, RealVec{0.0}), ParamError);
  CHECK_THROWS_AS(BoxSet(RealVec{}, RealVec{}), ParamError);
  CHECK_THROWS_AS(BoxSet::symmetric(1, -1.0), ParamError);
}

TEST_CASE("weighted projection is clamping, zero weights included") {
  const BoxSet box = BoxSet::symmetric(2, 1.0);
  const numcore::DiagWeights w14 = numcore::make_weights({1, 4});
  CHECK(numcore::project_weighted(box, w14, {1.5, -0.3}) ==
        RealVec{1.0, -0.3});
  CHECK(numcore::project_weighted(box, w14, {0.2, 0.9}) == RealVec{0.2, 0.9});

  const numcore::DiagWeights w01 = numcore::make_weights({0, 1});
  CHECK(numcore::project_weighted(box, w01, {2.0, 0.5}) == RealVec{1.0, 0.5});

  CHECK_THROWS_AS(numcore::make_weights({-0.5}), ParamError);
}

// The projection invariants also run as 10^4-instance batteries behind
// `verify lemmas`; this spot check keeps a failure local to this module.
TEST_CASE("projection nonexpansive and idempotent on random instances") {
  SplitMix64 rng(41);
  for (int cs = 0; cs < 200; ++cs) {
    const std::size_t d = 1 + static_cast<std::size_t>(rng.next_below(4));
    RealVec lo(d), hi(d), w(d), z1(d), z2(d);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = -2.0 * rng.next_u01();
      hi[i] = lo[i] + 0.1 + 2.0 * rng.next_u01();
      w[i] = 0.01 + 3.0 * rng.next_u01();
      z1[i] = -3.0 + 6.0 * rng.next_u01();
      z2[i] = -3.0 + 6.0 * rng.next_u01();
    }
    const BoxSet box(lo, hi);
    const numcore::DiagWeights weights = numcore::make_weights(w);
    const RealVec p1 = numcore::project_weighted(box, weights, z1);
    const RealVec p2 = numcore::project_weighted(box, weights, z2);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      lhs += w[i] * (p1[i] - p2[i]) * (p1[i] - p2[i]);
      rhs += w[i] * (z1[i] - z2[i]) * (z1[i] - z2[i]);
    }
    REQUIRE(lhs <= rhs + 1e-12);
    REQUIRE(numcore::project_weighted(box, weights, p1) == p1);
  }
}

TEST_CASE("splitmix64 stream properties") {
  SplitMix64 a(123);
  SplitMix64 b(123);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

  SplitMix64 c(124);
  bool differs = false;
  for (int i = 0; i < 100 && !differs; ++i)
    differs = a.next_u64() != c.next_u64();
  CHECK(differs);

  SplitMix64 u(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.next_u01();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
  for (int i = 0; i < 1000; ++i) REQUIRE(u.next_below(17) < 17);

  // Distinct salts give distinct derived streams from one master seed.
  SplitMix64 d1(SplitMix64::salt_seed(9, 1));
  SplitMix64 d2(SplitMix64::salt_seed(9, 2));
  CHECK(d1.next_u64() != d2.next_u64());
}

TEST_CASE("box-muller normals are finite and roughly standard") {
  SplitMix64 rng(2024);
  double sum = 0.0, sumsq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    REQUIRE(std::isfinite(z));
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.05);       // ~7 sigma at n = 20000
  CHECK(std::fabs(var - 1.0) < 0.08);
}
