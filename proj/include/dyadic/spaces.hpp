#pragma once
//
// Quasi-norms of Triebel-Lizorkin, Besov, Hardy, Sobolev and base spaces.
//
// The dyadic ladder is truncated to the grid: homogeneous norms sum
// j = 0..J_max (mean-zero input), inhomogeneous norms use S_0 f plus
// j = 1..J_max.  Base spaces other than weighted Lebesgue replace the outer
// L^p(w) quasi-norm.
//

#include <optional>
#include <string>

#include "dyadic/grid_field.hpp"
#include "dyadic/littlewood_paley.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

enum class Family {
  TriebelLizorkin,
  Besov,
  Hardy,
  LocalHardy,
  Lebesgue,
  Lorentz,
  Morrey,
  VariableLebesgue,
  Sobolev
};

enum class Base { Lebesgue, Lorentz, Morrey, Variable };

enum class HardyMethod { square, maximal };

struct SpaceSpec {
  Family family = Family::TriebelLizorkin;
  bool homogeneous = true;
  double p = 2.0;
  double q = 2.0;
  double s = 0.0;
  double t = 2.0;  // Lorentz / Morrey secondary index
  WeightSpec weight{};
  std::optional<ExponentSpec> exponent;
  Base base = Base::Lebesgue;
  HardyMethod hardy_method = HardyMethod::square;

  /// Throws PreconditionError when the parameters leave the family's range.
  void validate() const;
  std::string describe() const;
};

std::string to_string(Family f);
std::string to_string(Base b);
Family family_from_string(const std::string& name);
Base base_from_string(const std::string& name);

// --- thresholds -----------------------------------------------------------------

double tau_pq(int n, double p, double q, double tau_w);
double tau_p(int n, double p, double tau_w);
double tau_ptq(int n, double p, double t, double q, double tau_w);

struct Thresholds {
  TauEstimate tau_w;
  double tau_pq = 0.0;
  double tau_p = 0.0;
  double tau_ptq = 0.0;
  /// The value the family's smoothness must exceed.
  double relevant = 0.0;
};

/// Uses the upper end of the tau_w interval; variable bases use p-.
Thresholds thresholds(const SpaceSpec& spec, int dim);

// --- norms ------------------------------------------------------------------------

/// Outer base quasi-norm of sample magnitudes under spec's base and weight.
double base_norm(std::span<const double> magnitudes, const SpaceSpec& spec, const Grid& grid);

double tl_norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam);
double besov_norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam);
/// Hardy quasi-norm; spec.family selects local or global, spec.hardy_method the method.
double hardy_norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam);
double hardy_norm(const Field& f, double p, const WeightSpec& w, bool local, HardyMethod method,
                  const LPFamily& fam);
double sobolev_norm(const Field& f, double s, double p, const WeightSpec& w, bool homogeneous,
                    const LPFamily& fam);
/// Dispatches on spec.family.
double norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam);

/// Sum over j = 0..J_max of psi(2^-j k)^2; the p = 2 square function satisfies
/// ||f||^2 = sum_k m(k) |fhat(k)|^2 exactly.
double overlap_multiplier(double frequency_norm, const LPFamily& fam);

/// ||f||_{s} / ||D^s f||_{0} (J^s when inhomogeneous); nullopt when undefined.
std::optional<double> lifting_check(const Field& f, const SpaceSpec& spec, const LPFamily& fam);

}  // namespace dyadic
