#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/grid_field.hpp"
#include "dyadic/serialize.hpp"
#include "oracle.hpp"

using namespace dyadic;

TEST_SUITE("grid_field") {
  TEST_CASE("mode samples match the exponential") {
    const Grid g(1, 64);
    const Field f = Field::mode(g, {5, 0}, {0.5, -1.0});
    for (int m = 0; m < 64; ++m) {
      const auto expect = std::complex<double>(0.5, -1.0) *
                          std::polar(1.0, 2.0 * M_PI * 5 * oracle::torus_point(m, 64));
      CHECK(std::abs(f.samples()[m] - expect) < 1e-13);
    }
  }

  TEST_CASE("2D modes and frequency indexing") {
    const Grid g(2, 16);
    const IVec k{-3, 7};
    const auto idx = g.index_of(k);
    REQUIRE(idx >= 0);
    CHECK(g.frequency(static_cast<std::size_t>(idx)) == k);
    CHECK(g.index_of({8, 0}) == -1);
    const Field f = Field::mode(g, k);
    CHECK(std::abs(f.coefficient(k) - 1.0) < 1e-14);
    CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("spatial and spectral views agree") {
    const Grid g(1, 128);
    const Field f = random_band_limited(g, 0, 63, 99, false);
    const Field back = Field::from_samples(g, {f.samples().begin(), f.samples().end()});
    CHECK(l2_norm(back - f) < 1e-13);
    double space = 0.0;
    for (auto v : f.samples()) space += std::norm(v) / 128.0;
    CHECK(space == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("random band-limited fields") {
    const Grid g(2, 32);
    const Field a = random_band_limited(g, 2, 6, 5, true);
    const Field b = random_band_limited(g, 2, 6, 5, true);
    CHECK(l2_norm(a - b) == 0.0);
    CHECK(a.is_mean_zero());
    CHECK(l2_norm(a) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (a.spectrum()[i] != cplx{}) {
        CHECK(g.frequency_norm(i) >= 2.0);
        CHECK(g.frequency_norm(i) <= 6.0);
      }
    }
    CHECK(l2_norm(random_band_limited(g, 2, 6, 6, true) - a) > 0.1);
  }

  TEST_CASE("fractional derivatives act on modes") {
    const Grid g(1, 64);
    const Field f = Field::mode(g, {-6, 0});
    CHECK(std::abs(d_s(f, 1.5).coefficient({-6, 0}) - std::pow(6.0, 1.5)) < 1e-12);
    CHECK(std::abs(j_s(f, 2.0).coefficient({-6, 0}) - 37.0) < 1e-12);
    CHECK(l2_norm(d_s(Field::constant(g, 3.0), 1.0)) == 0.0);
    CHECK_THROWS_AS(d_s(Field::constant(g, 1.0), -1.0), PreconditionError);
  }

  TEST_CASE("multipliers compose at the mode level") {
    const Grid g(1, 64);
    const Field f = random_band_limited(g, 1, 20, 3, true);
    const Field once = apply_multiplier(f, homogeneous_power(2.5));
    const Field twice = apply_multiplier(apply_multiplier(f, homogeneous_power(1.0)), homogeneous_power(1.5));
    CHECK(l2_norm(once - twice) < 1e-12 * l2_norm(once));
    CHECK(l2_norm(apply_multiplier(f, identity_multiplier()) - f) == 0.0);
  }

  TEST_CASE("dyadic dilation evaluates f(2^k x)") {
    const Grid g(1, 64);
    const std::vector<std::pair<int, std::complex<double>>> terms{{1, {1.0, 0.5}}, {-3, {0.25, 0.0}}};
    Field f = Field::zero(g);
    for (auto [k, c] : terms) f = f + Field::mode(g, {k, 0}, c);
    const Field d = dilate_dyadic(f, 2);
    for (int m = 0; m < 64; m += 5) {
      const double x = oracle::torus_point(m, 64);
      CHECK(std::abs(d.samples()[m] - oracle::trig_sum(terms, 4.0 * x)) < 1e-12);
    }
  }

  TEST_CASE("refinement keeps the function") {
    const Grid g(1, 32);
    const Field f = random_band_limited(g, 0, 15, 8, false);
    const Field r = f.refined(2);
    for (int m = 0; m < 32; ++m) CHECK(std::abs(r.samples()[2 * m] - f.samples()[m]) < 1e-13);
  }

  TEST_CASE("json round trip") {
    const Field f = random_band_limited(Grid(2, 16), 1, 5, 1, true);
    const Field back = field_from_json(field_to_json(f));
    CHECK(back.grid() == f.grid());
    CHECK(l2_norm(back - f) == 0.0);
    CHECK_THROWS_AS(field_from_json(nlohmann::json{{"n", 1}}), StructuralError);
  }

  TEST_CASE("grid preconditions") {
    CHECK_THROWS(Grid(3, 16));
    CHECK_THROWS(Grid(1, 24));
  }
}
