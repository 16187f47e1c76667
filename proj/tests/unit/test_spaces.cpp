#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/harness.hpp"
#include "dyadic/spaces.hpp"
#include "oracle.hpp"

using namespace dyadic;

namespace {

// Norms of a single mode e^{2 pi i k x}: every block is a constant times the mode.
double mode_sum(double k, double s, double q, int jmax) {
  double acc = 0.0;
  for (int j = 0; j <= jmax; ++j) acc += std::pow(std::exp2(j * s) * oracle::psi(k / std::exp2(j)), q);
  return std::pow(acc, 1.0 / q);
}

SpaceSpec space(Family fam, double p, double q, double s) {
  SpaceSpec sp;
  sp.family = fam;
  sp.p = p;
  sp.q = q;
  sp.s = s;
  return sp;
}

}  // namespace

TEST_SUITE("spaces") {
  TEST_CASE("single-mode TL and Besov norms") {
    const Grid g(1, 256);
    const auto fam = LPFamily::make({}, g);
    for (int k : {3, 10, 45}) {
      const Field f = Field::mode(g, {k, 0});
      for (double q : {1.0, 2.0, 3.0}) {
        const double expect = mode_sum(k, 1.0, q, fam.j_max());
        CHECK(tl_norm(f, space(Family::TriebelLizorkin, 2.0, q, 1.0), fam) ==
              doctest::Approx(expect).epsilon(1e-12));
        CHECK(besov_norm(f, space(Family::Besov, 3.0, q, 1.0), fam) ==
              doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("inhomogeneous norms include the low-pass block") {
    const Grid g(1, 64);
    const auto fam = LPFamily::make({}, g);
    SpaceSpec sp = space(Family::TriebelLizorkin, 2.0, 2.0, 0.0);
    sp.homogeneous = false;
    CHECK(tl_norm(Field::constant(g, 2.0), sp, fam) == doctest::Approx(2.0));
    sp.homogeneous = true;
    CHECK_THROWS_AS(tl_norm(Field::constant(g, 2.0), sp, fam), PreconditionError);
  }

  TEST_CASE("thresholds") {
    CHECK(tau_pq(1, 2.0, 2.0, 1.0) == doctest::Approx(0.0));
    CHECK(tau_pq(1, 0.5, 2.0, 1.0) == doctest::Approx(1.0));
    CHECK(tau_pq(2, 2.0, 0.5, 1.0) == doctest::Approx(2.0));
    CHECK(tau_p(1, 0.5, 1.0) == doctest::Approx(1.0));
    const auto t = thresholds(space(Family::TriebelLizorkin, 2.0, 2.0, 1.0), 1);
    CHECK(t.relevant == doctest::Approx(0.0));
  }

  TEST_CASE("Hardy square function of a mode") {
    const Grid g(1, 128);
    const auto fam = LPFamily::make({}, g);
    const Field f = Field::mode(g, {12, 0});
    const double sq = hardy_norm(f, 1.0, WeightSpec{}, false, HardyMethod::square, fam);
    CHECK(sq == doctest::Approx(mode_sum(12, 0.0, 2.0, fam.j_max())).epsilon(1e-12));
    const double mx = hardy_norm(f, 1.0, WeightSpec{}, false, HardyMethod::maximal, fam);
    CHECK(mx == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("lifting ratio near one for L2") {
    const Grid g(1, 128);
    const auto fam = LPFamily::make({}, g);
    const Field f = random_band_limited(g, 1, 32, 4, true);
    const auto r = lifting_check(f, space(Family::TriebelLizorkin, 2.0, 2.0, 1.0), fam);
    REQUIRE(r);
    CHECK(*r > 0.5);
    CHECK(*r < 2.0);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(space(Family::TriebelLizorkin, -1.0, 2.0, 0.0).validate(), PreconditionError);
    CHECK_THROWS_AS(family_from_string("sobolov"), ConfigError);
  }

  TEST_CASE("space literals") {
    const SpaceSpec s = harness::parse_space("TL(p=2, q=1, s=1.5, w=0.5)");
    CHECK(s.family == Family::TriebelLizorkin);
    CHECK(s.q == 1.0);
    CHECK(s.s == 1.5);
    CHECK(s.weight.exponent == 0.5);
    CHECK(harness::parse_space("inhom Besov(p=2, q=2, s=1)").homogeneous == false);
    CHECK_THROWS_AS(harness::parse_space("TL(p=2, z=1)"), ConfigError);
  }
}
