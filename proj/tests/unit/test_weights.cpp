#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/weights.hpp"

using namespace dyadic;

TEST_SUITE("weights") {
  TEST_CASE("composition of power weights") {
    const auto w = WeightSpec::compose(WeightSpec::power(0.5), 0.5, WeightSpec::power(0.5), 0.5);
    CHECK(w.exponent == doctest::Approx(0.5));
    CHECK(w.scale == doctest::Approx(1.0));
    const auto c = WeightSpec::compose(WeightSpec::constant(4.0), 0.5, WeightSpec::constant(9.0), 0.5);
    CHECK(c.scale == doctest::Approx(6.0));
    CHECK(c.is_constant());
  }

  TEST_CASE("Lebesgue norms on the unit torus") {
    const Grid g(1, 256);
    const Weight unit = Weight::unit(g);
    const Field one = Field::constant(g, 2.0);
    CHECK(lp_norm(one, 3.0, unit) == doctest::Approx(2.0).epsilon(1e-13));
    // |cos(2 pi x)|^2 averages to 1/2
    const Field c = 0.5 * (Field::mode(g, {1, 0}) + Field::mode(g, {-1, 0}));
    CHECK(lp_norm(c, 2.0, unit) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(lp_norm(c, 4.0, unit) == doctest::Approx(std::pow(3.0 / 8.0, 0.25)).epsilon(1e-12));
  }

  TEST_CASE("weighted norm of a constant is the weight's mass") {
    const Grid g(1, 4096);
    const Weight w = Weight::sample(WeightSpec::power(0.5), g);
    // integral of |x|^(1/2) over [-1/2, 1/2]
    const double mass = 2.0 * std::pow(0.5, 1.5) / 1.5;
    CHECK(w.measure() == doctest::Approx(mass).epsilon(1e-3));
    CHECK(lp_norm(Field::constant(g, 1.0), 2.0, w) == doctest::Approx(std::sqrt(mass)).epsilon(1e-3));
  }

  TEST_CASE("maximal function") {
    const Grid g(1, 128);
    const Field one = Field::constant(g, 3.0);
    for (double v : maximal_values(one.magnitudes(), g, 1.0)) CHECK(v == doctest::Approx(3.0));
    const Field f = random_band_limited(g, 1, 20, 1, true);
    const auto m = maximal_values(f.magnitudes(), g, 1.0);
    const auto mags = f.magnitudes();
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] >= mags[i] * (1.0 - 1e-12));
  }

  TEST_CASE("tau_w of power weights") {
    const auto unit = tau_w_estimate(WeightSpec{}, 1);
    CHECK(unit.lower == doctest::Approx(1.0));
    const auto t = tau_w_estimate(WeightSpec::power(0.5), 1);
    CHECK(t.lower > 1.0);
    CHECK(t.upper >= t.lower);
  }

  TEST_CASE("Lorentz with t = p is Lebesgue") {
    const Grid g(1, 256);
    const Field f = random_band_limited(g, 1, 40, 2, true);
    const Weight unit = Weight::unit(g);
    CHECK(lorentz_norm(f, 2.0, 2.0, unit) == doctest::Approx(lp_norm(f, 2.0, unit)).epsilon(1e-10));
  }

  TEST_CASE("constant exponent reduces to Lebesgue") {
    const Grid g(1, 128);
    const Field f = random_band_limited(g, 1, 20, 3, true);
    const auto p = ExponentFunction::constant(g, 3.0);
    CHECK(variable_lp_norm(f, p) == doctest::Approx(lp_norm(f, 3.0, Weight::unit(g))).epsilon(1e-8));
  }

  TEST_CASE("invalid weights") {
    const Grid g(1, 16);
    CHECK_THROWS_AS(Weight::custom(g, std::vector<double>(16, -1.0)), PreconditionError);
  }
}
