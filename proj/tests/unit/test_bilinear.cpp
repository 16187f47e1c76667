#include <doctest.h>

#include "dyadic/bilinear.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/serialize.hpp"

using namespace dyadic;

TEST_SUITE("bilinear") {
  TEST_CASE("symbol library values") {
    const RVec xi{3.0, 0.0};
    const RVec eta{-4.0, 0.0};
    CHECK(std::abs(symbol_one()(xi, eta) - 1.0) == 0.0);
    CHECK(std::abs(symbol_inverse_gamma(2.0)(xi, eta) - 1.0 / 25.0) < 1e-15);
    CHECK(std::abs(symbol_inverse_gamma(1.0)(xi, eta) - 1.0 / 7.0) < 1e-15);
    CHECK(std::abs(symbol_inverse_gamma_inhom(2.0)(xi, eta) - 1.0 / 27.0) < 1e-15);
    CHECK(std::abs(symbol_sum_squares()(xi, eta) - 25.0) < 1e-12);
    const double lam = 25.0;
    CHECK(std::abs(symbol_scattering_transient(2.0, 0.1)(xi, eta) - (1.0 - std::exp(-0.1 * lam)) / lam) < 1e-15);
    const auto prod = make_symbol("inverse_gamma(2) * sum_squares");
    CHECK(std::abs(prod(xi, eta) - 1.0) < 1e-14);
    CHECK_THROWS_AS(make_symbol("inverse_gama(2)"), ConfigError);
  }

  TEST_CASE("traits of products") {
    const auto p = symbol_product(symbol_one(), symbol_inverse_gamma(1.0));
    CHECK_FALSE(p.smooth_at_origin);
    CHECK_FALSE(p.jointly_radial);
    const auto q = symbol_product(symbol_one(), symbol_sum_squares());
    CHECK(q.smooth_at_origin);
    CHECK(q.jointly_radial);
  }

  TEST_CASE("direct evaluation on mode pairs") {
    const Grid g(2, 16);
    const auto sigma = symbol_inverse_gamma(2.0);
    const IVec k{1, 2};
    const IVec l{-3, 5};
    const Field out = apply_direct(sigma, Field::mode(g, k), Field::mode(g, l, {0.0, 2.0}));
    const cplx expect = cplx{0.0, 2.0} / double(1 + 4 + 9 + 25);
    const IVec m{k[0] + l[0], k[1] + l[1]};
    CHECK(out.grid().resolution() == 32);
    CHECK(std::abs(out.coefficient(m) - expect) < 1e-15);
    CHECK(l2_norm(out) == doctest::Approx(std::abs(expect)).epsilon(1e-12));
  }

  TEST_CASE("sigma = 1 gives the product") {
    const Grid g(1, 64);
    const Field f = random_band_limited(g, 0, 31, 1, false);
    const Field h = random_band_limited(g, 0, 31, 2, false);
    const Field out = apply_direct(symbol_one(), f, h);
    const Field ref = pointwise_product(f.refined(2), h.refined(2));
    CHECK(l2_norm(out - ref) < 1e-12 * l2_norm(ref));
  }

  TEST_CASE("bilinearity") {
    const Grid g(1, 32);
    const auto sigma = symbol_inverse_gamma(2.0);
    const Field f1 = random_band_limited(g, 1, 10, 1, true);
    const Field f2 = random_band_limited(g, 1, 10, 2, true);
    const Field h = random_band_limited(g, 1, 10, 3, true);
    const cplx a{0.3, -1.2};
    const Field lhs = apply_direct(sigma, a * f1 + f2, h);
    const Field rhs = a * apply_direct(sigma, f1, h) + apply_direct(sigma, f2, h);
    CHECK(l2_norm(lhs - rhs) < 1e-12 * l2_norm(rhs));
  }

  TEST_CASE("singular symbols reject zero frequencies") {
    const Grid g(1, 16);
    CHECK_THROWS_AS(apply_direct(symbol_inverse_gamma(2.0), Field::constant(g, 1.0), Field::constant(g, 1.0)),
                    NumericDomainError);
  }

  TEST_CASE("Coifman-Meyer constants of sigma = 1") {
    const auto samples = default_cm_samples(1);
    const auto entries = cm_order_check(symbol_one(), 0.0, 2, samples, 1);
    REQUIRE_FALSE(entries.empty());
    CHECK(entries.front().constant == doctest::Approx(1.0));
    for (std::size_t i = 1; i < entries.size(); ++i) CHECK(entries[i].constant < 1e-6);
  }

  TEST_CASE("paraproduct reproduces the product for sigma = 1") {
    const Grid g(1, 64);
    const auto fam = LPFamily::make({}, g);
    const Field f = random_band_limited(g, 1, 16, 5, true);
    const Field h = random_band_limited(g, 1, 16, 6, true);
    const auto e = build_paraproduct(symbol_one(), fam, std::nullopt, 4);
    const Field out = apply_paraproduct(e, symbol_one(), f, h, fam);
    const Field ref = apply_direct(symbol_one(), f, h);
    CHECK(l2_norm(out - ref) < 1e-10 * l2_norm(ref));
  }

  TEST_CASE("coefficient json") {
    const auto fam = LPFamily::make({}, Grid(1, 32));
    const auto e = build_paraproduct(symbol_one(), fam, std::nullopt, 2);
    const auto j = coefficients_to_json(e);
    CHECK(j["A"] == 2);
    CHECK(j["slabs"].size() == e.t1.size() + e.t2.size());
  }

  TEST_CASE("derivative budget") {
    CHECK(derivative_budget_value(1, 2, 2, 2, 2, 1.0, 1.0, BudgetSetting::tl) == 6);
    const auto b = derivative_budget(1, 2, 2, 2, 2, WeightSpec{}, WeightSpec{}, BudgetSetting::tl);
    CHECK(b.value == 6);
  }
}
