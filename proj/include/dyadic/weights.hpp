#pragma once
//
// Weights, weighted base-space quasi-norms and the dyadic-ball maximal operator.
//
// Balls: every grid point is a center; radii 2^-l for l = 0..log2(N).  The
// l = 0 ball (radius 1) is the whole torus.  A ball holds the samples at torus
// distance strictly below its radius, so the l = log2(N) ball is one cell.
// Integrals over balls are cell-weighted Riemann sums.
//

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadic/grid_field.hpp"

namespace dyadic {

/// w(x) = scale * |x|^exponent with |x| the torus distance to 0.
struct WeightSpec {
  double scale = 1.0;
  double exponent = 0.0;

  static WeightSpec constant(double c = 1.0) { return {c, 0.0}; }
  static WeightSpec power(double a, double c = 1.0) { return {c, a}; }
  bool is_constant() const { return exponent == 0.0; }
  /// w1^(p/p1) w2^(p/p2)
  static WeightSpec compose(const WeightSpec& w1, double e1, const WeightSpec& w2, double e2);
  std::string describe() const;
  bool operator==(const WeightSpec&) const = default;
};

enum class WeightKind { constant, power, custom };

class Weight {
 public:
  static Weight sample(const WeightSpec& spec, const Grid& grid);
  static Weight unit(const Grid& grid) { return sample(WeightSpec{}, grid); }
  /// Arbitrary positive samples; throws PreconditionError otherwise.
  static Weight custom(const Grid& grid, std::vector<double> samples);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  WeightKind kind() const { return kind_; }
  const std::optional<WeightSpec>& spec() const { return spec_; }
  /// w(torus)
  double measure() const;

 private:
  Weight(Grid grid, std::vector<double> values, WeightKind kind, std::optional<WeightSpec> spec);
  Grid grid_;
  std::vector<double> values_;
  WeightKind kind_;
  std::optional<WeightSpec> spec_;
};

/// p(x) = scale * (base + amplitude * sin(2 pi x_1)).
struct ExponentSpec {
  double base = 2.0;
  double amplitude = 0.0;
  double scale = 1.0;
  ExponentSpec scaled(double factor) const { return {base, amplitude, scale * factor}; }
};

class ExponentFunction {
 public:
  static ExponentFunction sample(const ExponentSpec& spec, const Grid& grid);
  static ExponentFunction custom(const Grid& grid, std::vector<double> samples);
  static ExponentFunction constant(const Grid& grid, double p);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }

 private:
  ExponentFunction(Grid grid, std::vector<double> values);
  Grid grid_;
  std::vector<double> values_;
  double p_minus_;
  double p_plus_;
};

class BallFamily {
 public:
  explicit BallFamily(const Grid& grid);

  const Grid& grid() const { return grid_; }
  int levels() const { return static_cast<int>(radii_.size()); }
  double radius(int level) const { return radii_[static_cast<std::size_t>(level)]; }
  std::size_t ball_size(int level) const { return sizes_[static_cast<std::size_t>(level)]; }
  /// Sums of `values` over every ball of the given level, indexed by center.
  std::vector<double> ball_sums(std::span<const double> values, int level) const;
  /// Calls fn(linear_index) for each member of the ball (center, level).
  template <class Fn>
  void for_each_member(std::size_t center, int level, Fn&& fn) const;

  struct Row {
    int dy;
    int half_width;
  };
  /// Row offsets and half widths; empty for the whole-torus level.
  const std::vector<Row>& stencil(int level) const { return rows_[static_cast<std::size_t>(level)]; }

 private:
  Grid grid_;
  std::vector<double> radii_;
  std::vector<std::vector<Row>> rows_;  // empty for the whole-torus level
  std::vector<std::size_t> sizes_;
};

template <class Fn>
void BallFamily::for_each_member(std::size_t center, int level, Fn&& fn) const {
  const int n = grid_.resolution();
  const auto& rows = rows_[static_cast<std::size_t>(level)];
  if (rows.empty()) {
    for (std::size_t i = 0; i < grid_.size(); ++i) fn(i);
    return;
  }
  const int cy = grid_.dim() == 1 ? 0 : static_cast<int>(center / n);
  const int cx = grid_.dim() == 1 ? static_cast<int>(center) : static_cast<int>(center % n);
  for (const Row& row : rows) {
    const int y = ((cy + row.dy) % n + n) % n;
    for (int dx = -row.half_width; dx <= row.half_width; ++dx) {
      const int x = ((cx + dx) % n + n) % n;
      fn(grid_.dim() == 1 ? static_cast<std::size_t>(x)
                          : static_cast<std::size_t>(y) * n + static_cast<std::size_t>(x));
    }
  }
}

// --- Muckenhoupt ------------------------------------------------------------

/// Sup over the ball family of (avg_B w)(avg_B w^(-1/(p-1)))^(p-1); needs p > 1.
double ap_constant(const Weight& w, double p);

struct TauEstimate {
  double lower = 1.0;
  double upper = 1.0;
  /// False when the upper end hit the scan ceiling without a member.
  bool converged = true;
  double midpoint() const { return 0.5 * (lower + upper); }
};

// A_tau(N) is probed on `levels` doubling resolutions.  With d_i the successive
// increments, -log2(d_last / d_prev) estimates tau - tau_w on both sides of the
// threshold; tau is classified as a member when it exceeds `decay_threshold`.
struct TauOptions {
  double tau_max = 8.0;
  double tolerance = 1e-2;
  double decay_threshold = 0.0;
  /// Half-width added on each side of the bisection bracket.
  double band = 0.15;
  int base_resolution = 0;  // 0 -> 256 for n = 1, 16 for n = 2
  int levels = 4;           // resolutions base * 2^i
};

/// Interval estimate of tau_w = inf{tau > 1 : w in A_tau} by grid refinement.
TauEstimate tau_w_estimate(const WeightSpec& spec, int dim, const TauOptions& options = {});

// --- base-space quasi-norms on sample magnitudes ------------------------------

/// p = +infinity gives the sample maximum.
double lp_norm(std::span<const double> magnitudes, double p, const Weight& w);
double lp_norm(const Field& f, double p, const Weight& w);

/// Weighted Lorentz L^{p,t}(w); t = +infinity gives the sup form.
double lorentz_norm(std::span<const double> magnitudes, double p, double t, const Weight& w);
double lorentz_norm(const Field& f, double p, double t, const Weight& w);

struct MorreyResult {
  double value = 0.0;
  std::size_t center = 0;
  int level = 0;
};

/// Weighted Morrey M^p_t(w), 0 < p <= t < infinity.
MorreyResult morrey_norm_detail(std::span<const double> magnitudes, double p, double t,
                                const Weight& w);
double morrey_norm(std::span<const double> magnitudes, double p, double t, const Weight& w);
double morrey_norm(const Field& f, double p, double t, const Weight& w);

/// Luxemburg norm of L^{p(.)}; bisection to relative 1e-12.
double variable_lp_norm(std::span<const double> magnitudes, const ExponentFunction& pfun);
double variable_lp_norm(const Field& f, const ExponentFunction& pfun);

// --- maximal operators ---------------------------------------------------------

/// M_r over the ball family, M_r f = (M |f|^r)^(1/r).
std::vector<double> maximal_values(std::span<const double> magnitudes, const Grid& grid, double r);
Field maximal(const Field& f, double r);

struct FeffermanSteinReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  /// r < min(p / tau_w, q) with the upper end of the tau_w interval.
  bool hypothesis_satisfied = true;
  std::optional<TauEstimate> tau;
};

FeffermanSteinReport fefferman_stein_check(std::span<const Field> family, double p, double q,
                                           double r, const Weight& w);

}  // namespace dyadic
