#include <cmath>
#include <random>

#include "common.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/grid_field.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "dyadic/nikolskij.hpp"
#include "dyadic/scattering.hpp"

namespace dyadic::harness {
namespace {

using detail::fmt;
using detail::number;

nlohmann::json environment(const ExperimentSpec& spec) {
  return {{"dim", spec.dim}, {"resolutions", spec.resolutions}, {"seed", spec.seed},
          {"trials", spec.trials}};
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return x;
    m = std::max(m, x);
  }
  return m;
}

}  // namespace

nlohmann::json space_to_json(const SpaceSpec& s) {
  nlohmann::json j = {{"family", to_string(s.family)},
                      {"homogeneous", s.homogeneous},
                      {"p", number(s.p)},
                      {"q", number(s.q)},
                      {"s", s.s},
                      {"t", number(s.t)},
                      {"base", to_string(s.base)},
                      {"weight", detail::weight_json(s.weight)},
                      {"describe", s.describe()}};
  if (s.exponent) {
    j["exponent"] = {{"base", s.exponent->base}, {"amplitude", s.exponent->amplitude},
                     {"scale", s.exponent->scale}};
  }
  return j;
}

// --- Nikol'skij assemblies -------------------------------------------------------------

Report run_nikolskij(const ExperimentSpec& spec) {
  spec.validate();
  const auto& nk = spec.nikolskij;
  const SequenceProfile profile = profile_from_string(nk.profile);
  Report rep;
  rep.name = spec.name;
  rep.kind = spec.kind;
  rep.body["environment"] = environment(spec);
  rep.body["sequence"] = {{"D", nk.D}, {"j_range", {nk.j_lo, nk.j_hi}}, {"profile", nk.profile}};
  Table table{"assemblies", {"space", "resolution", "trial", "lhs", "rhs", "ratio"}, {}};
  nlohmann::json spaces = nlohmann::json::array();

  for (std::size_t si = 0; si < nk.spaces.size(); ++si) {
    const SpaceSpec& space = nk.spaces[si];
    const Thresholds th = thresholds(space, spec.dim);
    nlohmann::json entry = space_to_json(space);
    entry["thresholds"] = detail::thresholds_json(th);
    entry["below_threshold"] = space.s <= th.relevant;
    nlohmann::json per_n = nlohmann::json::array();
    std::vector<double> max_by_n;
    bool finite = true;
    for (int n : spec.resolutions) {
      const Grid grid(spec.dim, n);
      const LPFamily fam = LPFamily::make({}, grid);
      const auto reports = detail::parallel_map<AssemblyReport>(
          static_cast<std::size_t>(spec.trials), spec.threads, [&](std::size_t t) {
            const auto seq = generate_sequence(grid, nk.D, nk.j_lo, nk.j_hi,
                                               detail::trial_seed(spec.seed, t, 0), profile);
            return assemble_and_bound(seq, space, fam);
          });
      std::vector<double> ratios;
      for (std::size_t t = 0; t < reports.size(); ++t) {
        const auto& r = reports[t];
        ratios.push_back(r.ratio);
        table.rows.push_back({std::to_string(si), std::to_string(n), std::to_string(t),
                              fmt(r.lhs), fmt(r.rhs), fmt(r.ratio)});
      }
      const double mx = max_of(ratios);
      finite = finite && detail::all_finite(ratios);
      max_by_n.push_back(mx);
      per_n.push_back({{"resolution", n}, {"max_ratio", number(mx)},
                       {"median_ratio", number(detail::median(ratios))},
                       {"ratios", ratios}});
    }
    entry["resolutions"] = std::move(per_n);
    spaces.push_back(std::move(entry));
    const std::string tag = "space" + std::to_string(si);
    rep.assertions.push_back({tag + "_finite", finite, space.describe()});
    if (spec.limits.resolution_spread && max_by_n.size() > 1) {
      rep.assertions.push_back(detail::check_max(tag + "_resolution_spread",
                                                 detail::spread(max_by_n),
                                                 spec.limits.resolution_spread,
                                                 "max / min of max ratio across grids"));
    }
  }
  rep.body["spaces"] = std::move(spaces);
  rep.tables = {table};
  return rep;
}

// --- scattering ---------------------------------------------------------------------------

namespace {

struct ScatterTrial {
  ScatteringReport report;
  double quadrature_error = -1.0;  // set for trial 0 only
};

}  // namespace

Report run_scattering(const ExperimentSpec& spec) {
  spec.validate();
  const auto& sc = spec.scattering;
  const OperatorType type = operator_type_from_string(sc.type);
  Report rep;
  rep.name = spec.name;
  rep.kind = spec.kind;
  rep.body["environment"] = environment(spec);
  rep.body["operator"] = to_string(type);
  rep.body["times"] = sc.times;
  if (sc.delta) rep.body["delta"] = *sc.delta;
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : sc.targets) {
    nlohmann::json e = space_to_json(t);
    e["thresholds"] = detail::thresholds_json(thresholds(t, spec.dim));
    targets.push_back(std::move(e));
  }
  rep.body["targets"] = std::move(targets);

  Table trials{"trials", {"gamma", "resolution", "trial", "lambda_min", "fitted_rate", "rate_error",
                          "target", "ratio"},
               {}};
  nlohmann::json sweeps = nlohmann::json::array();
  double worst_quad = 0.0;
  double worst_rate = 0.0;
  bool finite = true;
  bool cone_ok = true;
  bool budgets_ok = true;
  std::vector<int> budgets;

  for (double gamma : sc.gammas) {
    nlohmann::json sweep = {{"gamma", gamma}};
    nlohmann::json per_n = nlohmann::json::array();
    for (int n : spec.resolutions) {
      const Grid grid(spec.dim, n);
      auto make_problem = [&](std::size_t t) {
        ScatteringProblem pr;
        pr.type = type;
        pr.gamma = gamma;
        const auto s0 = detail::trial_seed(spec.seed, t, 0);
        if (sc.delta) {
          std::tie(pr.f, pr.g) = cone_data(grid, *sc.delta, s0, type);
        } else {
          pr.f = random_band_limited(grid, sc.band[0], sc.band[1], s0, true);
          pr.g = random_band_limited(grid, sc.band[0], sc.band[1],
                                     detail::trial_seed(spec.seed, t, 1), true);
        }
        pr.times = sc.times;
        pr.targets = sc.targets;
        pr.delta = sc.delta;
        pr.p1 = sc.p1;
        pr.p2 = sc.p2;
        pr.w1 = sc.w1;
        pr.w2 = sc.w2;
        return pr;
      };
      const auto results = detail::parallel_map<ScatterTrial>(
          static_cast<std::size_t>(spec.trials), spec.threads, [&](std::size_t t) {
            ScatterTrial out;
            const ScatteringProblem pr = make_problem(t);
            out.report = verify_scattering(pr);
            if (t == 0) {
              double err = 0.0;
              for (double time : pr.times) {
                const Field q = solve_u_quadrature(pr, time, sc.quadrature_tolerance);
                const Field c = solve_u_closed(pr, time);
                const double ref = l2_norm(c);
                err = std::max(err, ref == 0.0 ? l2_norm(q) : l2_norm(q - c) / ref);
              }
              out.quadrature_error = err;
            }
            return out;
          });
      nlohmann::json recs = nlohmann::json::array();
      nlohmann::json decay = nlohmann::json::array();
      std::vector<double> max_ratio(sc.targets.size(), 0.0);
      for (std::size_t t = 0; t < results.size(); ++t) {
        const auto& r = results[t].report;
        if (results[t].quadrature_error >= 0.0) {
          worst_quad = std::max(worst_quad, results[t].quadrature_error);
          for (std::size_t i = 0; i < r.times.size(); ++i) {
            decay.push_back({{"t", r.times[i]}, {"l2_distance", number(r.l2_distance[i])}});
          }
        }
        worst_rate = std::max(worst_rate, r.rate_error);
        if (sc.delta) cone_ok = cone_ok && r.cone_supported;
        nlohmann::json ratios = nlohmann::json::array();
        for (std::size_t i = 0; i < r.targets.size(); ++i) {
          const auto& tr = r.targets[i];
          ratios.push_back(number(tr.ratio));
          finite = finite && std::isfinite(tr.ratio);
          max_ratio[i] = std::max(max_ratio[i], tr.ratio);
          trials.rows.push_back({fmt(gamma), std::to_string(n), std::to_string(t),
                                 fmt(r.lambda_min), fmt(r.fitted_rate), fmt(r.rate_error),
                                 std::to_string(i), fmt(tr.ratio)});
          if (t == 0) budgets.push_back(tr.derivative_budget);
        }
        nlohmann::json rec = {{"trial", t},
                              {"lambda_min", r.lambda_min},
                              {"fitted_rate", number(r.fitted_rate)},
                              {"rate_error", number(r.rate_error)},
                              {"monotone", r.monotone},
                              {"cone_required", r.cone_required},
                              {"ratios", ratios}};
        if (sc.delta) {
          rec["cone_supported"] = r.cone_supported;
          if (r.cone_symbol_gap) rec["cone_symbol_gap"] = number(*r.cone_symbol_gap);
        }
        recs.push_back(std::move(rec));
      }
      nlohmann::json budget_json = nlohmann::json::array();
      if (!results.empty()) {
        for (const auto& tr : results[0].report.targets) {
          budget_json.push_back({{"target", tr.spec.describe()},
                                 {"derivative_budget", tr.derivative_budget},
                                 {"budget_met", tr.budget_met},
                                 {"below_threshold", tr.below_threshold}});
        }
        sweep["gamma_even"] = results[0].report.gamma_even;
      }
      per_n.push_back({{"resolution", n},
                       {"max_ratio", max_ratio},
                       {"decay", decay},
                       {"budgets", budget_json},
                       {"records", recs}});
    }
    sweep["resolutions"] = std::move(per_n);
    sweeps.push_back(std::move(sweep));
  }
  rep.body["sweeps"] = std::move(sweeps);
  rep.body["max_quadrature_error"] = worst_quad;
  rep.body["max_rate_error"] = worst_rate;

  if (spec.trials > 0) {
    rep.assertions.push_back({"ratio_finite", finite, "every target ratio finite"});
    if (spec.limits.quadrature_error) {
      rep.assertions.push_back(detail::check_max("quadrature_vs_closed", worst_quad,
                                                 spec.limits.quadrature_error,
                                                 "max relative L2 gap"));
    }
    if (spec.limits.rate_error) {
      rep.assertions.push_back(detail::check_max("decay_rate", worst_rate, spec.limits.rate_error,
                                                 "max |fitted - lambda_min| / lambda_min"));
    }
    if (sc.delta) rep.assertions.push_back({"cone_support", cone_ok, "data inside the cone"});
    if (spec.limits.derivative_budget) {
      for (int b : budgets) budgets_ok = budgets_ok && b == *spec.limits.derivative_budget;
      std::string got;
      for (int b : budgets) got += (got.empty() ? "" : ", ") + std::to_string(b);
      rep.assertions.push_back({"derivative_budget", budgets_ok,
                                "budgets [" + got + "], expected " +
                                    std::to_string(*spec.limits.derivative_budget)});
    }
  }
  Table decay{"decay", {"gamma", "resolution", "t", "l2_distance"}, {}};
  for (const auto& sw : rep.body["sweeps"]) {
    for (const auto& pn : sw["resolutions"]) {
      for (const auto& d : pn["decay"]) {
        decay.rows.push_back({fmt(sw["gamma"].get<double>()), std::to_string(pn["resolution"].get<int>()),
                              fmt(d["t"].get<double>()),
                              d["l2_distance"].is_number() ? fmt(d["l2_distance"].get<double>())
                                                           : d["l2_distance"].get<std::string>()});
      }
    }
  }
  rep.tables = {decay, trials};
  return rep;
}

// --- lemma suite ------------------------------------------------------------------------------

Report run_lemma_suite(const ExperimentSpec& spec) {
  spec.validate();
  const auto& lm = spec.lemmas;
  Report rep;
  rep.name = spec.name;
  rep.kind = spec.kind;
  rep.body["environment"] = environment(spec);
  Table sweep_table{"sweeps", {"lemma", "resolution", "j", "constant"}, {}};
  nlohmann::json per_n = nlohmann::json::array();
  std::uint64_t stream = 0;

  for (int n : spec.resolutions) {
    const Grid grid(spec.dim, n);
    const LPFamily fam = LPFamily::make({}, grid);
    nlohmann::json res = {{"resolution", n}};

    // convolution lemmas under A = 2^j
    auto sweep = [&](const char* lemma, const std::vector<int>& scales, double R, int fields,
                     auto&& bound) {
      nlohmann::json out = nlohmann::json::array();
      std::vector<double> constants;
      for (int j : scales) {
        if (!fam.valid_scale(j)) {
          throw ConfigError(std::string(lemma) + " scale " + std::to_string(j) +
                            " is outside [0, " + std::to_string(fam.j_max()) + "] for N = " +
                            std::to_string(n));
        }
        const double A = std::exp2(j);
        const double hi = std::min(A * R, n / 2.0 - 1.0);
        const Field phi = dyadic_kernel(grid, j, BlockKind::Psi, fam);
        const std::uint64_t base = stream++;
        const auto vals = detail::parallel_map<double>(
            static_cast<std::size_t>(fields), spec.threads, [&](std::size_t t) {
              const Field f =
                  random_band_limited(grid, 1.0, hi, detail::trial_seed(spec.seed + base, t, 7), false);
              return bound(phi, f, A);
            });
        const double c = max_of(vals);
        constants.push_back(c);
        out.push_back({{"j", j}, {"A", A}, {"constant", number(c)}});
        sweep_table.rows.push_back({lemma, std::to_string(n), std::to_string(j), fmt(c)});
      }
      const double sp = detail::spread(constants);
      if (!scales.empty()) {
        rep.assertions.push_back({std::string(lemma) + "_finite_N" + std::to_string(n),
                                  detail::all_finite(constants), "constants finite"});
        if (spec.limits.sweep_spread) {
          rep.assertions.push_back(detail::check_max(std::string(lemma) + "_sweep_N" + std::to_string(n),
                                                     sp, spec.limits.sweep_spread,
                                                     "max / min across A = 2^j"));
        }
      }
      return nlohmann::json{{"entries", out}, {"spread", number(sp)}};
    };

    const auto& pe = lm.peetre;
    res["peetre"] = sweep("peetre", pe.scales, pe.R, pe.fields,
                          [&](const Field& phi, const Field& f, double A) {
                            return peetre_convolution_bound(phi, f, A, pe.R, pe.r, pe.d);
                          });
    const auto& cv = lm.convolution;
    res["convolution"] = sweep("convolution", cv.scales, cv.R, cv.fields,
                               [&](const Field& phi, const Field& f, double A) {
                                 return convolution_norm_bound(phi, f, A, cv.R, cv.b, cv.d, cv.p,
                                                               cv.weight);
                               });

    // Peetre maximal inequality for the LP blocks
    nlohmann::json lp = nlohmann::json::array();
    std::vector<RVec> shifts;
    for (double a : lm.lp_peetre.shifts) shifts.push_back(RVec{a, 0.0});
    bool lp_finite = true;
    for (int j : lm.lp_peetre.scales) {
      if (!fam.valid_scale(j)) throw ConfigError("lp_peetre scale " + std::to_string(j) + " is out of range");
      const std::uint64_t base = stream++;
      const auto reps = detail::parallel_map<PeetreReport>(
          static_cast<std::size_t>(lm.lp_peetre.fields), spec.threads, [&](std::size_t t) {
            const Field f = random_band_limited(grid, 1.0, n / 4.0,
                                                detail::trial_seed(spec.seed + base, t, 9), true);
            return peetre_check(f, j, shifts, lm.lp_peetre.r, lm.lp_peetre.eps, fam);
          });
      double worst = 0.0;
      std::size_t artifacts = 0;
      for (const auto& r : reps) {
        worst = std::max(worst, r.ratio);
        artifacts += r.artifacts;
      }
      lp_finite = lp_finite && std::isfinite(worst);
      lp.push_back({{"j", j}, {"ratio", number(worst)}, {"artifacts", artifacts}});
    }
    res["lp_peetre"] = std::move(lp);
    if (!lm.lp_peetre.scales.empty()) {
      rep.assertions.push_back({"lp_peetre_finite_N" + std::to_string(n), lp_finite, "ratios finite"});
    }
    per_n.push_back(std::move(res));
  }
  rep.body["resolutions"] = std::move(per_n);

  // dyadic series lemma (grid independent)
  const auto& se = lm.series;
  nlohmann::json series = nlohmann::json::array();
  if (se.sequences > 0) {
    bool holds = true;
    for (double tau : se.taus) {
      for (double q : se.qs) {
        for (int k0 : se.k0s) {
          std::mt19937_64 rng(detail::trial_seed(spec.seed, stream++, 11));
          std::uniform_real_distribution<double> u(0.0, 1.0);
          double worst = 0.0;
          double constant = 0.0;
          bool ok = true;
          for (int s = 0; s < se.sequences; ++s) {
            std::vector<double> d(static_cast<std::size_t>(se.length));
            for (auto& v : d) v = u(rng) < 0.3 ? 0.0 : u(rng);
            const auto r = dyadic_series_bound(d, tau, se.lambda, q, k0);
            constant = r.analytic_constant;
            ok = ok && r.holds;
            if (r.rhs > 0.0) worst = std::max(worst, r.lhs / (r.analytic_constant * r.rhs));
          }
          holds = holds && ok;
          series.push_back({{"tau", tau}, {"q", q}, {"k0", k0}, {"analytic_constant", constant},
                            {"max_fraction_of_bound", worst}, {"holds", ok}});
        }
      }
    }
    const std::vector<double> single{1.0};
    const auto r = dyadic_series_bound(single, -1.0, 0.0, 1.0, 0);
    const double ratio = r.lhs / r.rhs;
    rep.body["single_entry_ratio"] = ratio;
    rep.assertions.push_back({"series_bound", holds, "no sequence exceeds the analytic constant"});
    rep.assertions.push_back({"series_single_entry", std::abs(ratio - 2.0) <= 1e-12,
                              "ratio " + fmt(ratio) + " for tau = -1, q = 1, k0 = 0"});
  }
  rep.body["series"] = std::move(series);
  rep.tables = {sweep_table};
  return rep;
}

// --- norm bench ----------------------------------------------------------------------------------

Report run_norm_bench(const ExperimentSpec& spec) {
  spec.validate();
  const auto& nb = spec.bench;
  Report rep;
  rep.name = spec.name;
  rep.kind = spec.kind;
  rep.body["environment"] = environment(spec);
  Table hardy_table{"hardy", {"resolution", "field", "square", "maximal", "ratio"}, {}};
  Table lift_table{"lifting", {"space", "resolution", "field", "ratio"}, {}};

  if (nb.hardy.enabled) {
    nlohmann::json per_n = nlohmann::json::array();
    std::vector<double> constants;
    for (int n : spec.resolutions) {
      const Grid grid(spec.dim, n);
      const LPFamily fam = LPFamily::make({}, grid);
      const double hi = nb.band[1] > 0.0 ? nb.band[1] : n / 4.0;
      const auto pairs = detail::parallel_map<std::pair<double, double>>(
          static_cast<std::size_t>(nb.hardy.fields), spec.threads, [&](std::size_t t) {
            const Field f = random_band_limited(grid, nb.band[0], hi,
                                                detail::trial_seed(spec.seed, t, 0), !nb.hardy.local);
            return std::pair{hardy_norm(f, nb.hardy.p, nb.hardy.weight, nb.hardy.local,
                                        HardyMethod::square, fam),
                             hardy_norm(f, nb.hardy.p, nb.hardy.weight, nb.hardy.local,
                                        HardyMethod::maximal, fam)};
          });
      double lo = std::numeric_limits<double>::infinity();
      double up = 0.0;
      for (std::size_t t = 0; t < pairs.size(); ++t) {
        const double r = pairs[t].first / pairs[t].second;
        lo = std::min(lo, r);
        up = std::max(up, r);
        hardy_table.rows.push_back({std::to_string(n), std::to_string(t), fmt(pairs[t].first),
                                    fmt(pairs[t].second), fmt(r)});
      }
      // smallest C with 1/C <= square / maximal <= C
      const double c = pairs.empty() ? 1.0 : std::max(up, 1.0 / lo);
      constants.push_back(c);
      per_n.push_back({{"resolution", n}, {"min_ratio", number(lo)}, {"max_ratio", number(up)},
                       {"fitted_constant", number(c)}});
      rep.assertions.push_back(detail::check_max("hardy_constant_N" + std::to_string(n), c,
                                                 spec.limits.hardy_constant,
                                                 "fitted square/maximal constant"));
    }
    rep.body["hardy"] = {{"p", nb.hardy.p}, {"local", nb.hardy.local},
                         {"weight", detail::weight_json(nb.hardy.weight)}, {"resolutions", per_n}};
    if (spec.limits.resolution_spread && constants.size() > 1) {
      rep.assertions.push_back(detail::check_max("hardy_resolution_spread", detail::spread(constants),
                                                 spec.limits.resolution_spread,
                                                 "max / min of fitted constant across grids"));
    }
  }

  nlohmann::json lifting = nlohmann::json::array();
  for (std::size_t si = 0; si < nb.lifting.spaces.size(); ++si) {
    const SpaceSpec& space = nb.lifting.spaces[si];
    nlohmann::json entry = space_to_json(space);
    nlohmann::json per_n = nlohmann::json::array();
    double lo = std::numeric_limits<double>::infinity();
    double up = 0.0;
    std::size_t undefined = 0;
    for (int n : spec.resolutions) {
      const Grid grid(spec.dim, n);
      const LPFamily fam = LPFamily::make({}, grid);
      const double hi = nb.band[1] > 0.0 ? nb.band[1] : n / 4.0;
      const auto ratios = detail::parallel_map<std::optional<double>>(
          static_cast<std::size_t>(nb.lifting.fields), spec.threads, [&](std::size_t t) {
            const Field f = random_band_limited(grid, nb.band[0], hi,
                                                detail::trial_seed(spec.seed, t, 3 + si), true);
            return lifting_check(f, space, fam);
          });
      double nlo = std::numeric_limits<double>::infinity();
      double nup = 0.0;
      for (std::size_t t = 0; t < ratios.size(); ++t) {
        if (!ratios[t]) {
          ++undefined;
          continue;
        }
        nlo = std::min(nlo, *ratios[t]);
        nup = std::max(nup, *ratios[t]);
        lift_table.rows.push_back({std::to_string(si), std::to_string(n), std::to_string(t),
                                   fmt(*ratios[t])});
      }
      lo = std::min(lo, nlo);
      up = std::max(up, nup);
      per_n.push_back({{"resolution", n}, {"min_ratio", number(nlo)}, {"max_ratio", number(nup)}});
    }
    entry["resolutions"] = std::move(per_n);
    entry["undefined"] = undefined;
    lifting.push_back(std::move(entry));
    if (nb.lifting.fields > 0) {
      Assertion a{"lifting_space" + std::to_string(si), undefined == 0 && up > 0.0,
                  space.describe() + ": ratios in [" + fmt(lo) + ", " + fmt(up) + "]"};
      if (spec.limits.lifting_band) {
        const double band = *spec.limits.lifting_band;
        a.passed = a.passed && lo >= 1.0 / band && up <= band;
        a.detail += " (band [" + fmt(1.0 / band) + ", " + fmt(band) + "])";
      }
      rep.assertions.push_back(a);
    }
  }
  rep.body["lifting"] = std::move(lifting);
  rep.tables = {hardy_table, lift_table};
  return rep;
}

// --- dispatch and serialization --------------------------------------------------------------------

Report run(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::leibniz:
    case ExperimentKind::leibniz_cm:
    case ExperimentKind::hardy_leibniz: return run_leibniz(spec);
    case ExperimentKind::nikolskij: return run_nikolskij(spec);
    case ExperimentKind::scattering: return run_scattering(spec);
    case ExperimentKind::lemma_suite: return run_lemma_suite(spec);
    case ExperimentKind::norm_bench: return run_norm_bench(spec);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace dyadic::harness
