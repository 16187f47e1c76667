#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "oracle.hpp"

using namespace dyadic;

TEST_SUITE("littlewood_paley") {
  TEST_CASE("cutoff matches the closed form") {
    const auto fam = LPFamily::make({}, Grid(1, 64));
    for (double t = 0.0; t <= 2.5; t += 0.03125) {
      CHECK(fam.phi(t) == doctest::Approx(oracle::chi(t)).epsilon(1e-14));
      CHECK(fam.psi(t) == doctest::Approx(oracle::psi(t)).epsilon(1e-14));
    }
    CHECK(fam.phi(1.5) == doctest::Approx(0.5));
    CHECK(fam.psi(0.4) == 0.0);
    CHECK(fam.psi(2.0) == 0.0);
  }

  TEST_CASE("fattened cutoff") {
    const auto fam = LPFamily::make({}, Grid(1, 64), 0.1);
    for (double r : {0.5, 1.0, 1.7, 2.0}) CHECK(fam.fattened(r) == doctest::Approx(1.0));
    CHECK(fam.fattened(0.44) == 0.0);
    CHECK(fam.fattened(2.21) == 0.0);
  }

  TEST_CASE("blocks multiply modes by psi(2^-j |k|)") {
    const Grid g(2, 32);
    const auto fam = LPFamily::make({}, g);
    const IVec k{3, -4};  // |k| = 5
    const Field f = Field::mode(g, k);
    for (int j = 0; j <= fam.j_max(); ++j) {
      const double expect = oracle::psi(5.0 / std::exp2(j));
      CHECK(std::abs(delta_j(f, j, fam).coefficient(k) - expect) < 1e-14);
      CHECK(std::abs(s_j(f, j, fam).coefficient(k) - oracle::chi(5.0 / std::exp2(j))) < 1e-14);
    }
    CHECK_THROWS_AS(delta_j(f, fam.j_max() + 1, fam), PreconditionError);
  }

  TEST_CASE("blocks telescope") {
    const Grid g(1, 128);
    const auto fam = LPFamily::make({}, g);
    const Field f = random_band_limited(g, 1, 30, 4, true);
    Field acc = Field::zero(g);
    for (int j = 0; j <= 3; ++j) acc = acc + delta_j(f, j, fam);
    CHECK(l2_norm(acc - s_j(f, 3, fam)) < 1e-13);
  }

  TEST_CASE("translated blocks shift in space") {
    const Grid g(1, 64);
    const auto fam = LPFamily::make({}, g);
    const Field f = Field::mode(g, {6, 0});
    const Field t = translated_block(f, 2, {1.0, 0.0}, fam, BlockKind::Psi, 5.0);
    const cplx expect = std::polar(oracle::psi(1.5), 2.0 * M_PI * 1.5 / 5.0);
    CHECK(std::abs(t.coefficient({6, 0}) - expect) < 1e-13);
  }

  TEST_CASE("Peetre maximal ratio is finite") {
    const Grid g(1, 128);
    const auto fam = LPFamily::make({}, g);
    const Field f = random_band_limited(g, 1, 32, 2, true);
    const std::vector<RVec> shifts{{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}};
    const auto rep = peetre_check(f, 3, shifts, 0.5, 0.5, fam);
    CHECK(std::isfinite(rep.ratio));
    CHECK(rep.ratio > 0.0);
    CHECK(rep.per_shift.size() == 3);
  }

  TEST_CASE("cutoff table") {
    const auto csv = cutoff_table_csv(LPFamily::make({}, Grid(1, 16)), 11);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  }
}
