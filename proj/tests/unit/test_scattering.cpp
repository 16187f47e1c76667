#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/scattering.hpp"

using namespace dyadic;

namespace {

ScatteringProblem mode_problem(int k, int l, double gamma) {
  const Grid g(1, 64);
  ScatteringProblem p;
  p.gamma = gamma;
  p.f = Field::mode(g, {k, 0});
  p.g = Field::mode(g, {l, 0});
  p.times = {0.25, 0.5, 1.0, 1.5, 2.0};
  SpaceSpec t;
  t.p = 2.0;
  t.q = 2.0;
  t.s = 1.0;
  p.targets = {t};
  p.p1 = 2.0;
  p.p2 = 2.0;
  return p;
}

}  // namespace

TEST_SUITE("scattering") {
  TEST_CASE("closed form on a mode pair") {
    const auto p = mode_problem(2, -5, 2.0);
    const double lam = 4.0 + 25.0;
    CHECK(lambda_min(p) == doctest::Approx(lam));
    for (double t : {0.01, 0.3, 1.0}) {
      const Field u = solve_u_closed(p, t);
      CHECK(std::abs(u.coefficient({-3, 0}) - (1.0 - std::exp(-t * lam)) / lam) < 1e-15);
    }
    CHECK(std::abs(u_infinity(p).coefficient({-3, 0}) - 1.0 / lam) < 1e-15);
  }

  TEST_CASE("quadrature agrees with the closed form") {
    const Grid g(1, 64);
    ScatteringProblem p = mode_problem(1, 1, 2.0);
    p.f = random_band_limited(g, 1, 6, 1, true);
    p.g = random_band_limited(g, 1, 6, 2, true);
    for (double t : {0.5, 2.0}) {
      const Field c = solve_u_closed(p, t);
      CHECK(l2_norm(solve_u_quadrature(p, t) - c) < 1e-8 * l2_norm(c));
    }
  }

  TEST_CASE("linear evolution damps modes") {
    const Grid g(1, 32);
    const Field f = Field::mode(g, {3, 0});
    const Field e = evolve_linear(f, 2.0, OperatorType::homogeneous, 0.1);
    CHECK(std::abs(e.coefficient({3, 0}) - std::exp(-0.9)) < 1e-15);
  }

  TEST_CASE("decay rate and budget") {
    const Grid g(1, 128);
    ScatteringProblem p = mode_problem(1, 1, 2.0);
    p.f = random_band_limited(g, 1, 4, 3, true);
    p.g = random_band_limited(g, 1, 4, 4, true);
    p.times = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    const auto rep = verify_scattering(p);
    CHECK(rep.rate_error < 0.1);
    CHECK(rep.monotone);
    REQUIRE(rep.targets.size() == 1);
    CHECK(std::isfinite(rep.targets[0].ratio));
    CHECK(rep.targets[0].derivative_budget == 6);
  }

  TEST_CASE("cone data") {
    const Grid g(1, 128);
    const auto [f, h] = cone_data(g, 0.5, 9);
    CHECK(cone_support_check(f, h, 0.5, OperatorType::homogeneous));
    CHECK_FALSE(cone_support_check(Field::mode(g, {1, 0}), Field::mode(g, {10, 0}), 0.5,
                                   OperatorType::homogeneous));
  }

  TEST_CASE("preconditions") {
    ScatteringProblem p = mode_problem(1, 1, 2.0);
    p.f = Field::constant(p.f.grid(), 1.0);
    CHECK_THROWS_AS(p.validate(), PreconditionError);
    p = mode_problem(1, 1, 2.0);
    p.times = {1.0, 0.5};
    CHECK_THROWS_AS(p.validate(), PreconditionError);
  }
}
