#pragma once
//
// Smooth dyadic cutoffs and Littlewood-Paley blocks.
//
// chi(t) = 1 for t <= 1, 0 for t >= 2, and on (1, 2)
//   chi(t) = h(2 - t) / (h(2 - t) + h(t - 1)),  h(u) = exp(-steepness / u).
// psi(xi) = chi(|xi|) - chi(2|xi|), phi(xi) = chi(|xi|).  The paraproduct
// generators coincide with these: Psi = psi and Phi = phi, since the dyadic
// sum of psi over j <= 0 telescopes to chi.
//

#include <span>
#include <string>
#include <vector>

#include "dyadic/grid_field.hpp"

namespace dyadic {

struct TransitionProfile {
  double steepness = 0.5;
  double operator()(double t) const;
};

enum class BlockKind { Psi, Phi };

class LPFamily {
 public:
  /// Verifies monotonicity and the annulus lower bound; throws PreconditionError
  /// naming the offending |xi| otherwise.
  static LPFamily make(const TransitionProfile& profile, const Grid& grid, double fattening = 0.1);

  const Grid& grid() const { return grid_; }
  const TransitionProfile& profile() const { return profile_; }
  int j_min() const { return 0; }
  int j_max() const { return grid_.j_max(); }
  bool valid_scale(int j) const { return j >= j_min() && j <= j_max(); }
  double fattening() const { return fattening_; }

  double psi(double r) const { return profile_(r) - profile_(2.0 * r); }
  double phi(double r) const { return profile_(r); }
  double kernel(BlockKind kind, double r) const { return kind == BlockKind::Psi ? psi(r) : phi(r); }
  /// Equal to 1 on [1/2, 2], supported in [(1 - m)/2, 2(1 + m)] for the margin m.
  double fattened(double r) const;

  /// Minimum of psi over 3/5 < |xi| < 5/3 (sampled).
  double annulus_lower_bound() const { return annulus_min_; }

 private:
  LPFamily(TransitionProfile profile, Grid grid, double fattening, double annulus_min);
  TransitionProfile profile_;
  Grid grid_;
  double fattening_;
  double annulus_min_;
};

/// psi(2^-j k) fhat(k); j must lie in [0, J_max].
Field delta_j(const Field& f, int j, const LPFamily& fam);
/// phi(2^-j k) fhat(k)
Field s_j(const Field& f, int j, const LPFamily& fam);
/// Block with an arbitrary real scale; no range check (used for maximal and
/// inhomogeneous low-pass pieces).
Field block(const Field& f, double scale_exponent, BlockKind kind, const LPFamily& fam);

/// exp(2 pi i 2^-j k.(a / period)) K(2^-j k) fhat(k), K = Psi or Phi.
Field translated_block(const Field& f, int j, const RVec& a, const LPFamily& fam, BlockKind kind,
                       double period);

struct PeetreReport {
  double ratio = 0.0;
  std::vector<double> per_shift;  // one max per entry of the shift grid
  std::size_t artifacts = 0;      // samples where M_r vanished under a nonzero numerator
};

/// max over x and a of |P^{tau_a Psi}_j f(x)| / ((1 + |a|)^(eps + n/r) M_r(P^{phi_2}_j f)(x)),
/// with phi_2 the fattened cutoff.  Shifts are in units of 2^-j.
PeetreReport peetre_check(const Field& f, int j, std::span<const RVec> shifts, double r,
                          double eps, const LPFamily& fam);

/// CSV rows |xi|, psi, phi, fattened on [0, 2.5].
std::string cutoff_table_csv(const LPFamily& fam, int samples = 251);

}  // namespace dyadic
