#include <doctest.h>

#include "dyadic/errors.hpp"
#include "dyadic/harness.hpp"

using namespace dyadic;
using namespace dyadic::harness;

namespace {

const char* kLeibniz = R"y(
name: small
kind: leibniz
resolutions: [64]
seed: 1
trials: 3
target: {family: TL, p: 2, q: 2, s: 1}
p1: 4
p2: 4
w1: {power: 0.5}
w2: {power: 0.5}
)y";

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("target weight follows the composition rule") {
    const auto specs = parse_config(kLeibniz);
    REQUIRE(specs.size() == 1);
    CHECK(specs[0].leibniz.target.weight.exponent == doctest::Approx(0.5));
  }

  TEST_CASE("Hoelder-inconsistent exponents are rejected") {
    std::string text = kLeibniz;
    text.replace(text.find("p2: 4"), 5, "p2: 3");
    try {
      parse_config(text);
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("1/p1 + 1/p2") != std::string::npos);
    }
  }

  TEST_CASE("mismatched target weight is rejected") {
    std::string text = kLeibniz;
    text.replace(text.find("s: 1}"), 5, "s: 1, weight: {power: 0.25}}");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }

  TEST_CASE("unknown keys and kinds") {
    CHECK_THROWS_AS(parse_config("kind: leibniz\ntrails: 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("kind: bogus\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("kind: [\n"), ConfigError);
  }

  TEST_CASE("overrides") {
    const auto specs = parse_config(kLeibniz, Overrides{7, 128, 2});
    CHECK(specs[0].seed == 7);
    CHECK(specs[0].resolutions == std::vector<int>{128});
    CHECK(specs[0].dim == 2);
  }

  TEST_CASE("leibniz reports are deterministic") {
    const auto spec = parse_config(kLeibniz)[0];
    const auto a = run(spec);
    const auto b = run(spec);
    CHECK(a.to_json(false).dump() == b.to_json(false).dump());
    CHECK(a.passed());
    CHECK(a.to_json().contains("generated_at"));
    CHECK(a.body.contains("thresholds"));
    CHECK(a.body["derivative_budget"].is_number());
  }

  TEST_CASE("dilations past the band are skipped and counted") {
    std::string text = kLeibniz;
    text += "dilation: {k_min: 0, k_max: 4}\nband: [1, 3]\n";
    const auto r = run_leibniz_ratios(parse_config(text)[0]);
    REQUIRE(r.summaries.size() == 1);
    // 3 * 2^4 = 48 > 31
    CHECK(r.summaries[0].skipped == 3);
    CHECK(r.summaries[0].evaluated == 12);
  }

  TEST_CASE("zero trials give a header-only CSV") {
    const auto spec = parse_config(R"y(
kind: nikolskij
resolutions: [64]
trials: 0
nikolskij:
  j_range: [0, 3]
  spaces: ["TL(p=2, q=2, s=1)"]
)y")[0];
    const auto rep = run(spec);
    REQUIRE(rep.tables.size() == 1);
    CHECK(to_csv(rep.tables[0]) == "space,resolution,trial,lhs,rhs,ratio\n");
  }

  TEST_CASE("empty lemma grid gives an empty report") {
    const auto rep = run(parse_config("kind: lemma_suite\nresolutions: [64]\n")[0]);
    CHECK(rep.assertions.empty());
    CHECK(rep.body["series"].empty());
    CHECK(rep.body["resolutions"][0]["peetre"]["entries"].empty());
  }

  TEST_CASE("gamma sweep gives one decay table per gamma") {
    const auto rep = run(parse_config(R"y(
kind: scattering
resolutions: [64]
trials: 1
scattering:
  gammas: [2, 4]
  p1: 2
  p2: 2
  targets: ["TL(p=2, q=2, s=1)"]
)y")[0]);
    REQUIRE(rep.body["sweeps"].size() == 2);
    for (const auto& sw : rep.body["sweeps"]) CHECK(sw["resolutions"][0]["decay"].size() == 6);
  }

  TEST_CASE("csv quoting") {
    Table t{"x", {"a", "b"}, {{"1,2", "say \"hi\""}}};
    CHECK(to_csv(t) == "a,b\n\"1,2\",\"say \"\"hi\"\"\"\n");
  }
}
