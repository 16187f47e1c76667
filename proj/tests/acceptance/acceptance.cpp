// Acceptance run: one PASS/FAIL line per numbered check, nonzero exit on any FAIL.
// Usage: acceptance [check...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "dyadic/bilinear.hpp"
#include "dyadic/grid_field.hpp"
#include "dyadic/harness.hpp"
#include "dyadic/littlewood_paley.hpp"

using namespace dyadic;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string config(const std::string& name) { return std::string(DYADIC_CONFIG_DIR) + "/" + name; }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Runs every experiment of a config and folds their assertions.
Outcome campaigns(const std::vector<std::string>& files) {
  Outcome out;
  for (const auto& file : files) {
    for (const auto& spec : harness::load_config(config(file))) {
      const auto rep = harness::run(spec);
      for (const auto& a : rep.assertions) {
        if (!a.passed) {
          out.passed = false;
          out.detail += rep.name + "/" + a.name + " failed (" + a.detail + "); ";
        }
      }
      if (rep.assertions.empty()) {
        out.passed = false;
        out.detail += rep.name + " produced no assertions; ";
      }
    }
  }
  if (out.passed) out.detail = "all assertions hold";
  return out;
}

double rel(const Field& a, const Field& b) { return l2_norm(a - b) / l2_norm(b); }

Outcome partition_of_unity() {
  const Grid g(1, 256);
  const auto fam = LPFamily::make({}, g);
  double worst = 0.0;
  for (int k = 1; k <= (1 << fam.j_max()); ++k) {
    double sum = 0.0;
    for (int j = fam.j_min(); j <= fam.j_max(); ++j) sum += fam.psi(std::ldexp(k, -j));
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  // same identity through the block operators
  const Field f = random_band_limited(g, 1, 1 << fam.j_max(), 1, true);
  Field acc = Field::zero(g);
  for (int j = fam.j_min(); j <= fam.j_max(); ++j) acc = acc + delta_j(f, j, fam);
  const double field_err = rel(acc, f);
  return {worst < 1e-12 && field_err < 1e-12,
          "max |sum psi - 1| = " + fmt(worst) + ", block sum error " + fmt(field_err)};
}

Outcome round_trip() {
  double worst_rt = 0.0;
  double worst_parseval = 0.0;
  for (auto [dim, n] : {std::pair{1, 256}, std::pair{2, 32}}) {
    const Grid g(dim, n);
    const Field f = random_band_limited(g, 0, n / 2.0 - 1, 2, false);
    const Field back = Field::from_samples(g, {f.samples().begin(), f.samples().end()});
    worst_rt = std::max(worst_rt, rel(back, f));
    double space = 0.0;
    double freq = 0.0;
    for (auto v : f.samples()) space += std::norm(v) * g.cell_volume();
    for (auto v : f.spectrum()) freq += std::norm(v);
    worst_parseval = std::max(worst_parseval, std::abs(space - freq) / freq);
  }
  return {worst_rt < 1e-12 && worst_parseval < 1e-12,
          "round trip " + fmt(worst_rt) + ", Parseval " + fmt(worst_parseval)};
}

Outcome bilinear_exactness() {
  double product_err = 0.0;
  for (auto [dim, n] : {std::pair{1, 256}, std::pair{2, 32}}) {
    const Grid g(dim, n);
    const Field f = random_band_limited(g, 0, n / 2.0 - 1, 3, false);
    const Field h = random_band_limited(g, 0, n / 2.0 - 1, 4, false);
    const Field direct = apply_direct(symbol_one(), f, h);
    const Field prod = pointwise_product(f.refined(2), h.refined(2));
    product_err = std::max(product_err, rel(direct, prod));
  }
  const Grid g(1, 64);
  const auto sigma = symbol_inverse_gamma(2.0);
  double mode_err = 0.0;
  for (int k : {-5, 1, 3, 17}) {
    for (int l : {-9, 2, 6}) {
      const Field out = apply_direct(sigma, Field::mode(g, {k, 0}), Field::mode(g, {l, 0}));
      const cplx expect = 1.0 / double(k * k + l * l);
      const Field ref = Field::mode(g.refined(2), {k + l, 0}, expect);
      mode_err = std::max(mode_err, l2_norm(out - ref) / std::abs(expect));
    }
  }
  return {product_err < 1e-10 && mode_err < 1e-12,
          "sigma = 1 vs fg " + fmt(product_err) + ", single modes " + fmt(mode_err)};
}

Outcome reconstruction() {
  Outcome out;
  struct Case {
    int dim;
    int n;
    std::vector<int> windows;
  };
  // the 2D run stops at A = 8: the A = 16 window costs minutes per symbol
  for (const Case& c : {Case{1, 256, {4, 8, 16}}, Case{2, 32, {4, 8}}}) {
    const Grid g(c.dim, c.n);
    const auto fam = LPFamily::make({}, g);
    const Field f = random_band_limited(g, 1, c.n / 4.0, 7, true);
    const Field h = random_band_limited(g, 1, c.n / 4.0, 8, true);
    for (const auto& sigma : {symbol_one(), symbol_inverse_gamma(2.0)}) {
      const auto e = build_paraproduct(sigma, fam, std::nullopt, c.windows.back());
      const auto trace = reconstruction_trace(e, sigma, f, h, fam, c.windows);
      std::string errs;
      bool decreasing = true;
      double at8 = 1.0;
      for (std::size_t i = 0; i < trace.size(); ++i) {
        errs += (i ? "/" : "") + fmt(trace[i].second);
        if (trace[i].first == 8) at8 = trace[i].second;
        // at the rounding floor there is nothing left to decrease
        if (i > 0 && !(trace[i].second < trace[i - 1].second) && trace[i].second > 1e-13) {
          decreasing = false;
        }
      }
      const bool ok = at8 < 1e-2 && decreasing;
      out.passed = out.passed && ok;
      out.detail += "n=" + std::to_string(c.dim) + " " + sigma.name + ": " + errs + "; ";
    }
  }
  return out;
}

Outcome coefficient_bound() {
  const Grid g(1, 256);
  const auto fam = LPFamily::make({}, g);
  const auto e = build_paraproduct(symbol_inverse_gamma(2.0), fam, std::nullopt, 4);
  const double spread = coefficient_spread(e, -2.0, {0, 0}, {0, 0});
  return {std::isfinite(spread) && spread < 2.0, "max/min of 2^(2j)|C_j(0,0)| = " + fmt(spread)};
}

Outcome determinism() {
  const std::vector<std::string> files{"kato_ponce.yaml", "weighted_leibniz.yaml",
                                       "base_variants.yaml", "hardy_equivalence.yaml", "lifting.yaml",
                                       "nikolskij.yaml", "lemmas.yaml", "scattering.yaml"};
  std::size_t reports = 0;
  for (const auto& file : files) {
    for (const auto& spec : harness::load_config(config(file))) {
      const std::string a = harness::run(spec).to_json(false).dump();
      const std::string b = harness::run(spec).to_json(false).dump();
      if (a != b) return {false, spec.name + " differs between runs"};
      ++reports;
    }
  }
  return {true, std::to_string(reports) + " reports byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"partition of unity", partition_of_unity},
      {"transform round trip and Parseval", round_trip},
      {"bilinear exactness", bilinear_exactness},
      {"paraproduct reconstruction", reconstruction},
      {"coefficient bound", coefficient_bound},
      {"Kato-Ponce ratio", [] { return campaigns({"kato_ponce.yaml"}); }},
      {"weighted Leibniz", [] { return campaigns({"weighted_leibniz.yaml"}); }},
      {"Lorentz, Morrey and variable-exponent variants", [] { return campaigns({"base_variants.yaml"}); }},
      {"Hardy equivalence", [] { return campaigns({"hardy_equivalence.yaml"}); }},
      {"lifting", [] { return campaigns({"lifting.yaml"}); }},
      {"Nikol'skij assemblies", [] { return campaigns({"nikolskij.yaml"}); }},
      {"convolution and series lemmas", [] { return campaigns({"lemmas.yaml"}); }},
      {"scattering", [] { return campaigns({"scattering.yaml"}); }},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", id, checks[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
