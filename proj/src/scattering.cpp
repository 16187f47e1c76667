#include "dyadic/scattering.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>

#include "dyadic/errors.hpp"
#include "dyadic/seed.hpp"

namespace dyadic {
namespace {

double symbol_a(double k_norm, double gamma, OperatorType type) {
  if (type == OperatorType::homogeneous) return std::pow(k_norm, gamma);
  return std::pow(1.0 + k_norm * k_norm, 0.5 * gamma);
}

double min_symbol(const Field& f, double gamma, OperatorType type) {
  double best = std::numeric_limits<double>::infinity();
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (f.spectrum()[i] == cplx{}) continue;
    best = std::min(best, symbol_a(g.frequency_norm(i), gamma, type));
  }
  return best;
}

double l2_samples(std::span<const cplx> v) {
  double acc = 0.0;
  for (const cplx& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

BilinearSymbol inverse_lambda(const ScatteringProblem& p) {
  return p.type == OperatorType::homogeneous ? symbol_inverse_gamma(p.gamma)
                                             : symbol_inverse_gamma_inhom(p.gamma);
}

}  // namespace

std::string to_string(OperatorType t) {
  return t == OperatorType::homogeneous ? "homogeneous" : "inhomogeneous";
}

OperatorType operator_type_from_string(const std::string& name) {
  if (name == "homogeneous" || name == "D") return OperatorType::homogeneous;
  if (name == "inhomogeneous" || name == "J") return OperatorType::inhomogeneous;
  throw ConfigError("unknown operator type '" + name + "'");
}

void ScatteringProblem::validate() const {
  if (!(gamma > 0.0)) throw PreconditionError("gamma must be positive");
  if (!(f.grid() == g.grid())) throw PreconditionError("f and g live on different grids");
  if (type == OperatorType::homogeneous && (!f.is_mean_zero() || !g.is_mean_zero())) {
    throw PreconditionError("D^gamma needs mean-zero data");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw PreconditionError("time grid must be positive and strictly increasing");
    }
  }
  if (delta && !(*delta > 0.0 && *delta < 1.0)) throw PreconditionError("need 0 < delta < 1");
}

double lambda_min(const ScatteringProblem& problem) {
  const double a = min_symbol(problem.f, problem.gamma, problem.type);
  const double b = min_symbol(problem.g, problem.gamma, problem.type);
  if (std::isinf(a) || std::isinf(b)) return 0.0;
  return a + b;
}

Field evolve_linear(const Field& f, double gamma, OperatorType type, double t) {
  if (!(t >= 0.0)) throw PreconditionError("evolution time must be nonnegative");
  const Grid& g = f.grid();
  std::vector<cplx> s(f.spectrum().begin(), f.spectrum().end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == cplx{}) continue;
    s[i] *= std::exp(-t * symbol_a(g.frequency_norm(i), gamma, type));
  }
  return Field::from_spectrum(g, std::move(s));
}

Field solve_u_quadrature(const ScatteringProblem& problem, double t, double rel_tol,
                         QuadratureTrace* trace) {
  problem.validate();
  if (!(t >= 0.0)) throw PreconditionError("time must be nonnegative");
  const Grid fine = problem.f.grid().refined(2);
  if (t == 0.0) return Field::zero(fine);
  const Field f = problem.f.refined(2);
  const Field g = problem.g.refined(2);
  const std::size_t size = fine.size();

  std::size_t evaluations = 0;
  auto integrand = [&](double s) {
    ++evaluations;
    const Field v = evolve_linear(f, problem.gamma, problem.type, s);
    const Field w = evolve_linear(g, problem.gamma, problem.type, s);
    std::vector<cplx> out(v.samples().begin(), v.samples().end());
    for (std::size_t i = 0; i < size; ++i) out[i] *= w.samples()[i];
    return out;
  };

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  struct Piece {
    double a, b, error;
    std::vector<cplx> value;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto rule = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    std::vector<cplx> kron(size), gauss(size);
    auto add = [&](const std::vector<cplx>& fx, double kw, double gw) {
      for (std::size_t i = 0; i < size; ++i) {
        kron[i] += kw * fx[i];
        gauss[i] += gw * fx[i];
      }
    };
    add(integrand(mid), wk[0], wg[0]);
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double gw = (i % 2 == 0) ? wg[i / 2] : 0.0;
      add(integrand(mid + half * x[i]), wk[i], gw);
      add(integrand(mid - half * x[i]), wk[i], gw);
    }
    for (std::size_t i = 0; i < size; ++i) {
      kron[i] *= half;
      gauss[i] = half * gauss[i] - kron[i];
    }
    return Piece{a, b, l2_samples(gauss), std::move(kron)};
  };

  std::priority_queue<Piece> pieces;
  pieces.push(rule(0.0, t));
  std::vector<cplx> total = pieces.top().value;
  double error = pieces.top().error;
  const std::size_t cap = 4000;
  while (true) {
    const double scale = l2_samples(total);
    if (error <= rel_tol * scale || scale == 0.0) break;
    if (pieces.size() >= cap) {
      throw ConvergenceError("u(t) quadrature stopped at " + std::to_string(cap) +
                             " intervals with relative error " + std::to_string(error / scale));
    }
    Piece worst = pieces.top();
    pieces.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Piece left = rule(worst.a, mid);
    Piece right = rule(mid, worst.b);
    for (std::size_t i = 0; i < size; ++i) total[i] += left.value[i] + right.value[i] - worst.value[i];
    error += left.error + right.error - worst.error;
    pieces.push(std::move(left));
    pieces.push(std::move(right));
  }
  // final sum from the live pieces, free of update drift
  std::fill(total.begin(), total.end(), cplx{});
  error = 0.0;
  const std::size_t count = pieces.size();
  while (!pieces.empty()) {
    const Piece& p = pieces.top();
    for (std::size_t i = 0; i < size; ++i) total[i] += p.value[i];
    error += p.error;
    pieces.pop();
  }
  if (trace) *trace = {evaluations, count, error};
  return Field::from_samples(fine, std::move(total));
}

Field solve_u_closed(const ScatteringProblem& problem, double t) {
  problem.validate();
  return apply_direct(
      symbol_scattering_transient(problem.gamma, t, problem.type == OperatorType::inhomogeneous),
      problem.f, problem.g);
}

Field u_infinity(const ScatteringProblem& problem) {
  problem.validate();
  if (!(lambda_min(problem) > 0.0)) throw PreconditionError("lambda vanishes on the data support");
  return apply_direct(inverse_lambda(problem), problem.f, problem.g);
}

std::pair<Field, Field> cone_data(const Grid& grid, double delta, std::uint64_t seed,
                                  OperatorType type) {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("need 0 < delta < 1");
  // annulus in a(k) = |k| or <k>, with c2 at a quarter of the resolution
  const double r2 = grid.resolution() / 4.0;
  const double c2 = type == OperatorType::homogeneous ? r2 : std::sqrt(1.0 + r2 * r2);
  const double c1 = delta * c2;
  double lo = type == OperatorType::homogeneous ? c1 : std::sqrt(std::max(0.0, c1 * c1 - 1.0));
  lo = std::max(lo, 1.0);
  bool any = false;
  for (std::size_t i = 0; i < grid.size() && !any; ++i) {
    const double r = grid.frequency_norm(i);
    any = r >= lo && r <= r2;
  }
  if (!any) throw PreconditionError("no lattice frequency in the cone annulus");
  return {random_band_limited(grid, lo, r2, splitmix64(seed), true),
          random_band_limited(grid, lo, r2, splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ull), true)};
}

bool cone_support_check(const Field& f, const Field& g, double delta, OperatorType type) {
  const Grid& grid = f.grid();
  auto bracket = [&](double r) { return type == OperatorType::homogeneous ? r : std::sqrt(1.0 + r * r); };
  std::vector<double> fr, gr;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (f.spectrum()[i] != cplx{}) fr.push_back(grid.frequency_norm(i));
    if (g.spectrum()[i] != cplx{}) gr.push_back(grid.frequency_norm(i));
  }
  const double tol = 1e-12;
  for (double a : fr) {
    for (double b : gr) {
      if (b > bracket(a) / delta * (1 + tol) || a > bracket(b) / delta * (1 + tol)) return false;
    }
  }
  return true;
}

ScatteringReport verify_scattering(const ScatteringProblem& problem,
                                   const TransitionProfile& profile) {
  problem.validate();
  ScatteringReport rep;
  rep.lambda_min = lambda_min(problem);
  rep.times = problem.times;
  const Field uinf = u_infinity(problem);
  const Grid& coarse = problem.f.grid();
  const Grid& fine = uinf.grid();
  const LPFamily fam_fine = LPFamily::make(profile, fine);
  const LPFamily fam = LPFamily::make(profile, coarse);
  const bool inhom = problem.type == OperatorType::inhomogeneous;

  rep.gamma_even = std::abs(problem.gamma - 2.0 * std::round(problem.gamma / 2.0)) < 1e-12;

  std::vector<Field> distances;
  for (double t : problem.times) distances.push_back(solve_u_closed(problem, t) - uinf);
  for (std::size_t i = 0; i < distances.size(); ++i) {
    rep.l2_distance.push_back(l2_norm(distances[i]));
    if (i > 0 && !(rep.l2_distance[i] < rep.l2_distance[i - 1])) rep.monotone = false;
  }
  // least squares of log distance against t over the later half
  const std::size_t m = rep.times.size();
  if (m >= 2) {
    const std::size_t start = m / 2 == m - 1 ? 0 : m / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t i = start; i < m; ++i) {
      if (!(rep.l2_distance[i] > 0.0)) continue;
      const double x = rep.times[i];
      const double y = std::log(rep.l2_distance[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
    if (count >= 2) {
      rep.fitted_rate = -(count * sxy - sx * sy) / (count * sxx - sx * sx);
      rep.rate_error = std::abs(rep.fitted_rate - rep.lambda_min) / rep.lambda_min;
    }
  }

  if (problem.delta) {
    rep.cone_supported = cone_support_check(problem.f, problem.g, *problem.delta, problem.type);
    const Field cone = apply_direct(symbol_product(symbol_cone_cutoff(*problem.delta), inverse_lambda(problem)),
                                    problem.f, problem.g);
    const double ref = l2_norm(uinf);
    rep.cone_symbol_gap = ref == 0.0 ? 0.0 : l2_norm(cone - uinf) / ref;
  }

  bool any_budget = false;
  for (const SpaceSpec& target : problem.targets) {
    target.validate();
    const bool tl = target.family == Family::TriebelLizorkin;
    if (!tl && target.family != Family::Besov) {
      throw PreconditionError("scattering targets must be Triebel-Lizorkin or Besov spaces");
    }
    TargetReport tr;
    tr.spec = target;
    tr.spec.homogeneous = !inhom;
    // homogeneous spaces measure modulo constants
    auto measured = [&](const Field& h) { return inhom ? h : h.without_mean(); };
    for (const Field& d : distances) tr.distance.push_back(norm(measured(d), tr.spec, fam_fine));
    tr.lhs = norm(measured(uinf), tr.spec, fam_fine);

    auto smooth = [&](const Field& h, double p, const WeightSpec& w) {
      SpaceSpec s = tr.spec;
      s.p = p;
      s.s = target.s - problem.gamma;
      s.weight = w;
      return norm(h, s, fam);
    };
    auto hardy = [&](const Field& h, double p, const WeightSpec& w) {
      if (std::isinf(p)) {
        const auto mags = h.magnitudes();
        return *std::max_element(mags.begin(), mags.end());
      }
      return hardy_norm(h, p, w, inhom, HardyMethod::square, fam);
    };
    tr.rhs = smooth(problem.f, problem.p1, problem.w1) * hardy(problem.g, problem.p2, problem.w2) +
             hardy(problem.f, problem.p1, problem.w1) * smooth(problem.g, problem.p2, problem.w2);
    tr.ratio = tr.rhs == 0.0 ? 0.0 : tr.lhs / tr.rhs;
    tr.below_threshold = target.s <= thresholds(tr.spec, coarse.dim()).relevant;
    tr.derivative_budget =
        derivative_budget(coarse.dim(), problem.p1, problem.p2, target.p, target.q, problem.w1,
                          problem.w2, tl ? BudgetSetting::tl : BudgetSetting::besov)
            .value;
    tr.budget_met = problem.gamma >= tr.derivative_budget;
    any_budget = any_budget || tr.budget_met;
    rep.targets.push_back(std::move(tr));
  }
  rep.cone_required = !rep.gamma_even && !any_budget;
  return rep;
}

}  // namespace dyadic
