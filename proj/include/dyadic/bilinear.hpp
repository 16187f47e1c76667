#pragma once
//
// Bilinear Fourier multipliers T_sigma(f, g), Coifman-Meyer symbol checks and
// the paraproduct expansion T_sigma = T1 + T2.
//
// Paraproduct slabs.  T1 at scale j pairs psi(2^-j k) fhat(k) with
// phi(2^-j l) ghat(l); T2 pairs phi(2^(1-j) k) fhat(k) with psi(2^-j l) ghat(l).
// Summed over j the two families cover every pair of nonzero frequencies
// exactly once.  On each slab sigma(2^j xi, 2^j eta) is replaced by a smooth
// periodic function S_j on the box [-L/2, L/2)^(2n) that agrees with it on the
// slab support, and expanded in a Fourier series there:
//   c_j(a, b) = L^(-2n) int S_j(xi, eta) e^(-2 pi i (a.xi + b.eta)/L),
// with C_j(a, b) = (1 + |a|^2 + |b|^2)^N c_j(a, b).  How S_j continues sigma
// off the support depends on the symbol's traits below.
//

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/grid_field.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

struct BilinearSymbol {
  std::string name;
  std::function<cplx(const RVec& xi, const RVec& eta)> evaluator;
  double order = 0.0;
  bool inhomogeneous = false;
  int derivative_budget = 4;
  /// sigma depends on |xi| and |eta| only.
  bool norms_only = false;
  /// sigma is smooth in a neighbourhood of (0, 0).
  bool smooth_at_origin = false;
  /// sigma depends on |(xi, eta)| only.
  bool jointly_radial = false;

  cplx operator()(const RVec& xi, const RVec& eta) const { return evaluator(xi, eta); }
};

// --- symbol library -----------------------------------------------------------------

BilinearSymbol symbol_one();
/// 1 / (|xi|^g + |eta|^g)
BilinearSymbol symbol_inverse_gamma(double gamma);
/// 1 / ((1 + |xi|^2)^(g/2) + (1 + |eta|^2)^(g/2))
BilinearSymbol symbol_inverse_gamma_inhom(double gamma);
/// (1 - exp(-t lambda)) / lambda, lambda = |xi|^g + |eta|^g (or the bracket form)
BilinearSymbol symbol_scattering_transient(double gamma, double t, bool inhomogeneous = false);
/// |xi|^2 + |eta|^2
BilinearSymbol symbol_sum_squares();
/// Smooth cone cutoff: 1 on |log(|eta|/|xi|)| <= log(1/delta), 0 beyond log(2/delta).
BilinearSymbol symbol_cone_cutoff(double delta);
BilinearSymbol symbol_product(const BilinearSymbol& a, const BilinearSymbol& b);

/// Parses "one", "inverse_gamma(2)", "inverse_gamma_inhom(2)",
/// "scattering_transient(2,1.5)", "scattering_transient_inhom(2,1.5)",
/// "sum_squares", "cone_cutoff(0.5)" and '*'-products of these.
BilinearSymbol make_symbol(const std::string& text);

// --- direct evaluation ----------------------------------------------------------------

/// sum over k + l = m of sigma(k, l) fhat(k) ghat(l), on the grid refined by two.
/// Throws NumericDomainError naming (k, l) when sigma is not finite at a needed pair.
Field apply_direct(const BilinearSymbol& sigma, const Field& f, const Field& g);

// --- Coifman-Meyer order check --------------------------------------------------------

struct CmEntry {
  std::vector<int> alpha;  // derivative orders in xi
  std::vector<int> beta;   // derivative orders in eta
  double constant = 0.0;
  std::size_t flagged = 0;  // samples with a non-finite difference quotient
};

struct CmSample {
  RVec xi;
  RVec eta;
};

/// Log-spaced radii in [1/8, 32] times a spread of directions; avoids (0, 0).
std::vector<CmSample> default_cm_samples(int dim);

/// sup over samples of |d^alpha_xi d^beta_eta sigma| * (|xi| + |eta|)^(|alpha + beta| - m),
/// with 1 + |xi| + |eta| for inhomogeneous symbols, for every |alpha + beta| <= K.
/// Tensor central differences with one Richardson step; the step is relative
/// to |xi| + |eta| and grows with the derivative order to contain round-off.
std::vector<CmEntry> cm_order_check(const BilinearSymbol& sigma, double m, int K,
                                    std::span<const CmSample> samples, int dim);

// --- paraproduct --------------------------------------------------------------------

enum class Slab { T1, T2 };

struct QuadratureOptions {
  int initial_points = 0;  // per axis; 0 -> 64 (n = 1) or 32 (n = 2)
  int max_points = 0;      // 0 -> 1024 (n = 1) or 64 (n = 2)
  double tolerance = 0.0;  // 0 -> 1e-8 (n = 1) or 1e-3 (n = 2)
};

struct CoefficientSlab {
  Slab slab = Slab::T1;
  int j = 0;
  std::vector<IVec> a;       // window lattice points
  std::vector<IVec> b;
  std::vector<cplx> c;       // c[ia * b.size() + ib]
  std::vector<cplx> big_c;   // (1 + |a|^2 + |b|^2)^N c
  int quadrature_points = 0;
  std::vector<double> refinement_trace;  // relative change per doubling

  cplx coefficient(const IVec& av, const IVec& bv) const;
  cplx scaled_coefficient(const IVec& av, const IVec& bv) const;
};

/// c_j(a, b) for |a|, |b| <= a_max by midpoint quadrature refined until the
/// window changes by less than the tolerance; ConvergenceError otherwise.
CoefficientSlab paraproduct_coefficients(const BilinearSymbol& sigma, const LPFamily& fam, int j,
                                         int decay, int a_max, Slab slab, double period = 5.0,
                                         const QuadratureOptions& options = {});

struct ParaproductExpansion {
  double period = 5.0;
  int decay = 2;  // N
  int a_max = 8;
  int dim = 1;
  Grid grid{1, 16};
  double steepness = 0.5;
  double fattening = 0.1;
  std::vector<CoefficientSlab> t1;
  std::vector<CoefficientSlab> t2;
};

/// Slabs for every j in [0, J_max] of the family's grid.  decay defaults to n + 1.
ParaproductExpansion build_paraproduct(const BilinearSymbol& sigma, const LPFamily& fam,
                                       std::optional<int> decay = std::nullopt, int a_max = 8,
                                       double period = 5.0, const QuadratureOptions& options = {});

/// Truncated T1 + T2 on the refined grid; `window` (<= a_max) restricts |a|, |b|.
Field apply_paraproduct(const ParaproductExpansion& expansion, const BilinearSymbol& sigma,
                        const Field& f, const Field& g, const LPFamily& fam,
                        std::optional<int> window = std::nullopt);

/// Relative L2 error against apply_direct for each window radius.
std::vector<std::pair<int, double>> reconstruction_trace(const ParaproductExpansion& expansion,
                                                         const BilinearSymbol& sigma, const Field& f,
                                                         const Field& g, const LPFamily& fam,
                                                         std::span<const int> windows);

/// max_j 2^(-jm)|C_j(a, b)| / min_j 2^(-jm)|C_j(a, b)| over the T1 slabs.
double coefficient_spread(const ParaproductExpansion& expansion, double m, const IVec& a,
                          const IVec& b);

// --- derivative budget --------------------------------------------------------------

enum class BudgetSetting { tl, besov };

struct DerivativeBudget {
  int value = 0;
  TauEstimate tau1;
  TauEstimate tau2;
};

DerivativeBudget derivative_budget(int n, double p1, double p2, double p, double q,
                                   const WeightSpec& w1, const WeightSpec& w2,
                                   BudgetSetting setting);
/// Same formula with explicit tau values.
int derivative_budget_value(int n, double p1, double p2, double p, double q, double tau1,
                            double tau2, BudgetSetting setting);

}  // namespace dyadic
