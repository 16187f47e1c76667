// dyadic: command-line front end for the experiment campaigns and a few
// one-shot operations.  Exit codes: 0 all assertions passed, 1 an assertion
// failed, 2 bad configuration or arguments.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadic/bilinear.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/grid_field.hpp"
#include "dyadic/harness.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "dyadic/serialize.hpp"
#include "dyadic/spaces.hpp"

namespace fs = std::filesystem;
using namespace dyadic;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> dim;
  std::string out;
  std::string format = "json";
};

void emit(const Globals& g, const std::string& stem, const std::string& ext,
          const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  fs::create_directories(g.out);
  const fs::path path = fs::path(g.out) / (stem + "." + ext);
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
  if (!text.empty() && text.back() != '\n') os << '\n';
}

void emit_report(const Globals& g, const harness::Report& r) {
  if (g.format == "csv") {
    for (const auto& t : r.tables) {
      if (g.out.empty()) std::cout << "# " << r.name << "/" << t.name << '\n';
      emit(g, r.name + "_" + t.name, "csv", harness::to_csv(t));
    }
  } else {
    emit(g, r.name, "json", r.to_json().dump(2));
  }
}

int run_campaign(const Globals& g, const std::set<harness::ExperimentKind>& kinds,
                 const std::string& command) {
  if (g.config.empty()) throw ConfigError(command + " needs --config <path>");
  const auto specs = harness::load_config(g.config, {g.seed, g.grid, g.dim});
  bool ok = true;
  int count = 0;
  for (const auto& spec : specs) {
    if (!kinds.count(spec.kind)) continue;
    ++count;
    const auto report = harness::run(spec);
    emit_report(g, report);
    for (const auto& a : report.assertions) {
      std::cerr << (a.passed ? "PASS " : "FAIL ") << report.name << "/" << a.name << ": "
                << a.detail << '\n';
    }
    ok = ok && report.passed();
  }
  if (count == 0) std::cerr << "no experiments of this kind in " << g.config << '\n';
  return ok ? 0 : 1;
}

Field load_or_random(const Globals& g, const std::string& path, std::uint64_t stream) {
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read field file " + path);
    return field_from_json(json::parse(is));
  }
  const Grid grid(g.dim.value_or(1), g.grid.value_or(128));
  return random_band_limited(grid, 1.0, grid.resolution() / 8.0, g.seed.value_or(0) + stream,
                             true);
}

std::string spectrum_csv(const Field& f) {
  std::ostringstream os;
  os.precision(17);
  const Grid& grid = f.grid();
  os << (grid.dim() == 1 ? "k" : "k1,k2") << ",re,im\n";
  const auto spec = f.spectrum();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec[i] == cplx{0.0, 0.0}) continue;
    const IVec k = grid.frequency(i);
    os << k[0];
    if (grid.dim() == 2) os << ',' << k[1];
    os << ',' << spec[i].real() << ',' << spec[i].imag() << '\n';
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Littlewood-Paley, paraproduct and bilinear-estimate experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "YAML experiment file");
  app.add_option("--seed", g.seed, "Override the base seed");
  app.add_option("--grid", g.grid, "Override the grid size N (power of two)");
  app.add_option("--dim", g.dim, "Override the dimension")->check(CLI::IsMember({1, 2}));
  app.add_option("--out", g.out, "Write reports into this directory instead of stdout");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  using K = harness::ExperimentKind;
  auto* leib = app.add_subcommand("verify-leibniz", "Run leibniz, leibniz_cm and hardy_leibniz experiments");
  auto* nik = app.add_subcommand("verify-nikolskij", "Run nikolskij experiments");
  auto* sc = app.add_subcommand("scatter", "Run scattering experiments");
  auto* lem = app.add_subcommand("lemmas", "Run lemma_suite experiments");

  auto* norm = app.add_subcommand("norm", "Run norm_bench experiments, or measure one field with --space");
  std::string space_text;
  std::string norm_field;
  norm->add_option("--space", space_text, "Space literal, e.g. \"TL(p=2, q=2, s=1)\"");
  norm->add_option("--field", norm_field, "Field JSON (default: random band-limited)");

  auto* apply = app.add_subcommand("apply", "Evaluate T_sigma(f, g)");
  std::string symbol = "one";
  std::string f_path;
  std::string g_path;
  std::optional<int> window;
  bool paraproduct = false;
  apply->add_option("--symbol", symbol, "Symbol expression");
  apply->add_option("-f", f_path, "Field JSON for f");
  apply->add_option("-g", g_path, "Field JSON for g");
  apply->add_flag("--paraproduct", paraproduct, "Also evaluate the truncated paraproduct and its error");
  apply->add_option("--window", window, "Coefficient window |a|, |b| <= window");

  auto* coeffs = app.add_subcommand("coeffs", "Paraproduct coefficients of a symbol");
  std::string coeff_symbol = "one";
  int a_max = 8;
  std::optional<int> decay;
  double period = 5.0;
  coeffs->add_option("--symbol", coeff_symbol, "Symbol expression");
  coeffs->add_option("--a-max", a_max, "Largest |a|, |b| kept");
  coeffs->add_option("--decay", decay, "Decay order (default n + 1)");
  coeffs->add_option("--period", period, "Period L of the Fourier box");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (leib->parsed()) return run_campaign(g, {K::leibniz, K::leibniz_cm, K::hardy_leibniz}, "verify-leibniz");
    if (nik->parsed()) return run_campaign(g, {K::nikolskij}, "verify-nikolskij");
    if (sc->parsed()) return run_campaign(g, {K::scattering}, "scatter");
    if (lem->parsed()) return run_campaign(g, {K::lemma_suite}, "lemmas");
    if (norm->parsed()) {
      if (space_text.empty()) return run_campaign(g, {K::norm_bench}, "norm");
      const SpaceSpec space = harness::parse_space(space_text);
      const Field f = load_or_random(g, norm_field, 0);
      const LPFamily fam = LPFamily::make({}, f.grid());
      const double value = dyadic::norm(f, space, fam);
      if (g.format == "csv") {
        emit(g, "norm", "csv", "space,norm\n\"" + space.describe() + "\"," + std::to_string(value) + "\n");
      } else {
        emit(g, "norm", "json",
             json{{"space", harness::space_to_json(space)}, {"norm", value}}.dump(2));
      }
      return 0;
    }
    if (apply->parsed()) {
      const BilinearSymbol sigma = make_symbol(symbol);
      const Field f = load_or_random(g, f_path, 0);
      const Field h = load_or_random(g, g_path, 1);
      const Field direct = apply_direct(sigma, f, h);
      json out{{"symbol", symbol}, {"result", field_to_json(direct)}};
      if (paraproduct) {
        const LPFamily fam = LPFamily::make({}, f.grid());
        const auto expansion = build_paraproduct(sigma, fam, std::nullopt, std::max(a_max, window.value_or(0)));
        const Field approx = apply_paraproduct(expansion, sigma, f, h, fam, window);
        const double ref = l2_norm(direct);
        out["paraproduct_error"] = ref > 0.0 ? l2_norm(approx - direct) / ref : l2_norm(approx);
      }
      if (g.format == "csv") {
        emit(g, "apply", "csv", spectrum_csv(direct));
      } else {
        emit(g, "apply", "json", out.dump(2));
      }
      return 0;
    }
    if (coeffs->parsed()) {
      const Grid grid(g.dim.value_or(1), g.grid.value_or(64));
      const LPFamily fam = LPFamily::make({}, grid);
      const auto expansion = build_paraproduct(make_symbol(coeff_symbol), fam, decay, a_max, period);
      const json j = coefficients_to_json(expansion);
      if (g.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "slab,j,a,b,re,im\n";
        for (const auto& slab : j["slabs"]) {
          for (const auto& e : slab["entries"]) {
            auto vec = [](const json& v) {
              std::string s;
              for (const auto& x : v) s += (s.empty() ? "" : " ") + std::to_string(x.get<int>());
              return s;
            };
            os << slab["slab"].get<std::string>() << ',' << slab["j"].get<int>() << ',' << vec(e[0])
               << ',' << vec(e[1]) << ',' << e[2].get<double>() << ',' << e[3].get<double>() << '\n';
          }
        }
        emit(g, "coeffs", "csv", os.str());
      } else {
        emit(g, "coeffs", "json", j.dump(2));
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return 2;
  } catch (const StructuralError& e) {
    std::cerr << "malformed input: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
