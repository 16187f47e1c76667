#include <doctest.h>

#include <random>

#include "dyadic/errors.hpp"
#include "dyadic/nikolskij.hpp"

using namespace dyadic;

TEST_SUITE("nikolskij") {
  TEST_CASE("single-entry series") {
    const std::vector<double> d{1.0};
    const auto r = dyadic_series_bound(d, -1.0, 0.0, 1.0, 0);
    CHECK(r.lhs / r.rhs == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.holds);
  }

  TEST_CASE("analytic constant for q <= 1") {
    for (double tau : {-1.0, -0.5}) {
      for (double q : {0.5, 1.0}) {
        for (int k0 : {0, 2}) {
          double sum = 0.0;
          for (int k = k0; k < 400; ++k) sum += std::exp2(tau * q * k);
          const std::vector<double> d{0.5, 0.0, 1.0};
          const auto r = dyadic_series_bound(d, tau, 0.0, q, k0);
          CHECK(r.analytic_constant == doctest::Approx(std::pow(sum, 1.0 / q)).epsilon(1e-10));
        }
      }
    }
  }

  TEST_CASE("random sequences stay under the bound") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 200; ++s) {
      std::vector<double> d(10);
      for (auto& v : d) v = u(rng);
      const auto r = dyadic_series_bound(d, -0.5, 0.0, 0.5, 1);
      CHECK(r.holds);
      CHECK(r.lhs <= r.analytic_constant * r.rhs * (1.0 + 1e-12));
    }
  }

  TEST_CASE("assemblies are finite and reproducible") {
    const Grid g(1, 128);
    const auto fam = LPFamily::make({}, g);
    SpaceSpec sp;
    sp.p = 2.0;
    sp.q = 2.0;
    sp.s = 1.0;
    const auto a = generate_sequence(g, 1.0, 0, 4, 3);
    const auto b = generate_sequence(g, 1.0, 0, 4, 3);
    const auto ra = assemble_and_bound(a, sp, fam);
    const auto rb = assemble_and_bound(b, sp, fam);
    CHECK(std::isfinite(ra.ratio));
    CHECK(ra.ratio > 0.0);
    CHECK(ra.ratio == rb.ratio);
  }

  TEST_CASE("sequences must fit the grid") {
    CHECK_THROWS_AS(generate_sequence(Grid(1, 32), 1.0, 0, 5, 1), PreconditionError);
  }

  TEST_CASE("dyadic kernels") {
    const Grid g(1, 64);
    const auto fam = LPFamily::make({}, g);
    const Field phi = dyadic_kernel(g, 2, BlockKind::Psi, fam);
    CHECK(std::abs(phi.coefficient({4, 0}) - 1.0) < 1e-14);
    CHECK(std::abs(phi.coefficient({1, 0})) == 0.0);
    const Field f = random_band_limited(g, 1, 8, 1, false);
    CHECK(std::isfinite(peetre_convolution_bound(phi, f, 4.0, 2.0, 0.5, 3.0)));
    CHECK(std::isfinite(convolution_norm_bound(phi, f, 4.0, 2.0, 1.5, 2.5, 2.0, WeightSpec{})));
    CHECK_THROWS_AS(peetre_convolution_bound(phi, f, 1.0, 2.0, 0.5, 3.0), PreconditionError);
  }
}
