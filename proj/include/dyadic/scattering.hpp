#pragma once
//
// The triangular system  u_t = v w,  v_t + A v = 0,  w_t + A w = 0  with
// u(0) = 0, v(0) = f, w(0) = g and A = D^gamma or J^gamma.  On the torus
//   u(t) = T_sigma(f, g),  sigma = (1 - exp(-t lambda)) / lambda,
//   lambda(k, l) = a(k) + a(l),  a(k) = |k|^gamma or (1 + |k|^2)^(gamma/2),
// and u_inf = T_{1/lambda}(f, g).
//

#include <optional>
#include <utility>
#include <vector>

#include "dyadic/bilinear.hpp"
#include "dyadic/grid_field.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "dyadic/spaces.hpp"

namespace dyadic {

enum class OperatorType { homogeneous, inhomogeneous };

std::string to_string(OperatorType t);
OperatorType operator_type_from_string(const std::string& name);

struct ScatteringProblem {
  OperatorType type = OperatorType::homogeneous;
  double gamma = 2.0;
  Field f = Field::zero(Grid(1, 16));
  Field g = Field::zero(Grid(1, 16));
  std::vector<double> times;
  std::vector<SpaceSpec> targets;
  std::optional<double> delta;
  // right-hand side data: f in L^{p1}(w1)-based spaces, g in L^{p2}(w2)-based spaces
  double p1 = 4.0;
  double p2 = 4.0;
  WeightSpec w1{};
  WeightSpec w2{};

  /// Throws PreconditionError for mismatched grids, gamma <= 0, non-mean-zero
  /// data under D^gamma, or a non-increasing time grid.
  void validate() const;
};

/// min over the support pairs of lambda; zero when either field vanishes.
double lambda_min(const ScatteringProblem& problem);

Field evolve_linear(const Field& f, double gamma, OperatorType type, double t);

struct QuadratureTrace {
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of v(s) w(s) over [0, t] on the
/// refined grid, until the summed error estimate is below rel_tol times the
/// integral's L2 norm; ConvergenceError at the interval cap.
Field solve_u_quadrature(const ScatteringProblem& problem, double t, double rel_tol = 1e-8,
                         QuadratureTrace* trace = nullptr);
Field solve_u_closed(const ScatteringProblem& problem, double t);
Field u_infinity(const ScatteringProblem& problem);

/// Random mean-zero f, g with spectra in an annulus c1 <= a(k) <= c2,
/// c2 / c1 <= 1 / delta (a(k) = |k|, or (1 + |k|^2)^(1/2) for the inhomogeneous cone).
std::pair<Field, Field> cone_data(const Grid& grid, double delta, std::uint64_t seed,
                                  OperatorType type = OperatorType::homogeneous);
/// Exhaustive scan of the nonzero coefficient pairs for membership in the cone.
bool cone_support_check(const Field& f, const Field& g, double delta, OperatorType type);

struct TargetReport {
  SpaceSpec spec;
  std::vector<double> distance;  // ||u(t) - u_inf|| per time
  double lhs = 0.0;              // ||u_inf||
  double rhs = 0.0;
  double ratio = 0.0;
  bool below_threshold = false;
  int derivative_budget = 0;
  bool budget_met = false;
};

struct ScatteringReport {
  double lambda_min = 0.0;
  std::vector<double> times;
  std::vector<double> l2_distance;
  double fitted_rate = 0.0;
  double rate_error = 0.0;  // |fitted - lambda_min| / lambda_min
  bool monotone = true;
  bool gamma_even = false;
  bool cone_required = false;
  bool cone_supported = false;
  /// ||T_{h/lambda}(f, g) - u_inf|| / ||u_inf|| with the smooth cone cutoff h;
  /// only computed when delta is set.
  std::optional<double> cone_symbol_gap;
  std::vector<TargetReport> targets;
};

/// Decay rate from a least-squares fit of log ||u(t) - u_inf||_2 over the later
/// half of the time grid.
ScatteringReport verify_scattering(const ScatteringProblem& problem,
                                   const TransitionProfile& profile = {});

}  // namespace dyadic
