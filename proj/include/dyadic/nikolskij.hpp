#pragma once
//
// Assemblies of band-limited pieces and the convolution / series lemmas
// behind them.
//

#include <cstdint>
#include <vector>

#include "dyadic/grid_field.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "dyadic/spaces.hpp"

namespace dyadic {

enum class SequenceProfile { random, concentrated };

struct BandLimitedSequence {
  double D = 1.0;
  int j_lo = 0;
  int j_hi = 0;
  std::uint64_t seed = 0;
  std::vector<Field> u;  // u[j - j_lo]

  const Field& at(int j) const { return u[static_cast<std::size_t>(j - j_lo)]; }
  Field sum() const;
};

/// u_j supported in |k| <= D 2^j (concentrated: D 2^(j-1) <= |k| <= D 2^j), mean zero,
/// with a random log-normal amplitude per piece.
BandLimitedSequence generate_sequence(const Grid& grid, double D, int j_lo, int j_hi,
                                      std::uint64_t seed,
                                      SequenceProfile profile = SequenceProfile::random);

SequenceProfile profile_from_string(const std::string& name);

struct AssemblyReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool below_threshold = false;  // s does not exceed the family's threshold
};

/// lhs = ||sum u_j|| in the space, rhs = ||{2^(js) u_j}|| in L^p(w)(l^q) (TL)
/// or l^q(L^p(w)) (Besov).
AssemblyReport assemble_and_bound(const BandLimitedSequence& seq, const SpaceSpec& spec,
                                  const LPFamily& fam);

/// Kernel with spectrum psi(2^-j k) (or phi); its samples are the periodized
/// 2^(jn) psi^vee(2^j x).
Field dyadic_kernel(const Grid& grid, int j, BlockKind kind, const LPFamily& fam);

/// sup_x |phi * f(x)| / (R^(n(1/r - 1)) A^-n ||(1 + |A x|)^d phi||_inf M_r f(x)).
double peetre_convolution_bound(const Field& phi, const Field& f, double A, double R, double r,
                                double d);

/// ||phi * f||_{L^p(w)} / (R^(b - n) A^-n ||(1 + |A x|^d) phi||_inf ||f||_{L^p(w)}).
double convolution_norm_bound(const Field& phi, const Field& f, double A, double R, double b,
                              double d, double p, const WeightSpec& w);

struct SeriesReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// (sum_{k >= k0} 2^(tau q k))^(1/q) for q <= 1; the Minkowski constant
  /// sum_{k >= k0} 2^(tau k) for q > 1.
  double analytic_constant = 0.0;
  bool holds = true;
};

/// d_j for j = 0..d.size()-1, zero elsewhere.
SeriesReport dyadic_series_bound(std::span<const double> d, double tau, double lambda, double q,
                                 int k0);

}  // namespace dyadic
