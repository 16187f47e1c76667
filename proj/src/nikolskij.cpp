#include "dyadic/nikolskij.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dyadic/errors.hpp"
#include "dyadic/seed.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {
namespace {

double lq_combine(double acc, double v, double q) {
  return std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q);
}

double lq_finish(double acc, double q) { return std::isinf(q) ? acc : std::pow(acc, 1.0 / q); }

Field convolve(const Field& phi, const Field& f) {
  if (!(phi.grid() == f.grid())) throw StructuralError("kernel and field use different grids");
  std::vector<cplx> s(f.grid().size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = phi.spectrum()[i] * f.spectrum()[i];
  return Field::from_spectrum(f.grid(), std::move(s));
}

double sample_radius(const Grid& g, std::size_t i) {
  const RVec x = g.point(i);
  return g.dim() == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
}

}  // namespace

Field BandLimitedSequence::sum() const {
  if (u.empty()) throw PreconditionError("empty sequence");
  Field out = u.front();
  for (std::size_t i = 1; i < u.size(); ++i) out = out + u[i];
  return out;
}

SequenceProfile profile_from_string(const std::string& name) {
  if (name == "random") return SequenceProfile::random;
  if (name == "concentrated") return SequenceProfile::concentrated;
  throw ConfigError("unknown sequence profile '" + name + "'");
}

BandLimitedSequence generate_sequence(const Grid& grid, double D, int j_lo, int j_hi,
                                      std::uint64_t seed, SequenceProfile profile) {
  if (!(D > 0.0) || j_hi < j_lo) throw PreconditionError("need D > 0 and j_lo <= j_hi");
  if (D * std::exp2(j_hi) > grid.resolution() / 2 - 1) {
    throw PreconditionError("D 2^j_max exceeds N/2 - 1");
  }
  if (D * std::exp2(j_lo) < 1.0) throw PreconditionError("D 2^j_lo must reach |k| = 1");
  BandLimitedSequence seq;
  seq.D = D;
  seq.j_lo = j_lo;
  seq.j_hi = j_hi;
  seq.seed = seed;
  std::mt19937_64 rng(splitmix64(seed));
  std::lognormal_distribution<double> amplitude(0.0, 1.0);
  for (int j = j_lo; j <= j_hi; ++j) {
    const double hi = D * std::exp2(j);
    const double lo = profile == SequenceProfile::concentrated ? std::max(1.0, 0.5 * hi) : 1.0;
    const std::uint64_t block_seed = splitmix64(seed ^ (0x5851F42D4C957F2Dull * (j - j_lo + 1)));
    const double a = amplitude(rng);
    seq.u.push_back(cplx{a, 0.0} * random_band_limited(grid, lo, hi, block_seed, true));
  }
  return seq;
}

AssemblyReport assemble_and_bound(const BandLimitedSequence& seq, const SpaceSpec& spec,
                                  const LPFamily& fam) {
  spec.validate();
  const bool tl = spec.family == Family::TriebelLizorkin;
  if (!tl && spec.family != Family::Besov) {
    throw PreconditionError("assembly bound needs a Triebel-Lizorkin or Besov space");
  }
  const Grid& grid = fam.grid();
  AssemblyReport rep;
  rep.below_threshold = spec.s <= thresholds(spec, grid.dim()).relevant;
  rep.lhs = tl ? tl_norm(seq.sum(), spec, fam) : besov_norm(seq.sum(), spec, fam);
  if (tl) {
    std::vector<double> acc(grid.size(), 0.0);
    for (int j = seq.j_lo; j <= seq.j_hi; ++j) {
      const double scale = std::exp2(j * spec.s);
      const auto mags = seq.at(j).magnitudes();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = lq_combine(acc[i], scale * mags[i], spec.q);
    }
    for (auto& v : acc) v = lq_finish(v, spec.q);
    rep.rhs = base_norm(acc, spec, grid);
  } else {
    double acc = 0.0;
    for (int j = seq.j_lo; j <= seq.j_hi; ++j) {
      const double piece = base_norm(seq.at(j).magnitudes(), spec, grid);
      acc = lq_combine(acc, std::exp2(j * spec.s) * piece, spec.q);
    }
    rep.rhs = lq_finish(acc, spec.q);
  }
  rep.ratio = rep.rhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

Field dyadic_kernel(const Grid& grid, int j, BlockKind kind, const LPFamily& fam) {
  const double s = std::exp2(-j);
  std::vector<cplx> spec(grid.size());
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = fam.kernel(kind, s * grid.frequency_norm(i));
  return Field::from_spectrum(grid, std::move(spec));
}

double peetre_convolution_bound(const Field& phi, const Field& f, double A, double R, double r,
                                double d) {
  const Grid& g = f.grid();
  const int n = g.dim();
  if (!(r > 0.0 && r <= 1.0)) throw PreconditionError("need 0 < r <= 1");
  if (!(A > 0.0) || !(R >= 1.0)) throw PreconditionError("need A > 0 and R >= 1");
  if (!(d > n / r)) throw PreconditionError("need d > n / r");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (f.spectrum()[i] != cplx{} && g.frequency_norm(i) > A * R) {
      throw PreconditionError("f has spectrum outside |k| <= A R");
    }
  }
  double kernel_norm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    kernel_norm = std::max(kernel_norm, std::pow(1.0 + A * sample_radius(g, i), d) * std::abs(phi.samples()[i]));
  }
  const auto num = convolve(phi, f).magnitudes();
  const auto mr = maximal_values(f.magnitudes(), g, r);
  const double factor = std::pow(R, n * (1.0 / r - 1.0)) * std::pow(A, -n) * kernel_norm;
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (num[i] == 0.0) continue;
    if (mr[i] == 0.0 || factor == 0.0) return std::numeric_limits<double>::infinity();
    best = std::max(best, num[i] / (factor * mr[i]));
  }
  return best;
}

double convolution_norm_bound(const Field& phi, const Field& f, double A, double R, double b,
                              double d, double p, const WeightSpec& w) {
  const Grid& g = f.grid();
  const int n = g.dim();
  if (!(A > 0.0) || !(R >= 1.0) || !(p > 0.0)) throw PreconditionError("need A > 0, R >= 1, p > 0");
  const double tau = tau_w_estimate(w, n).upper;
  const double floor_b = n / std::min(1.0, p / tau);
  if (!(d > b && b > floor_b)) {
    throw PreconditionError("need d > b > n / min(1, p / tau_w) = " + std::to_string(floor_b));
  }
  const Weight weight = Weight::sample(w, g);
  const double rhs_f = lp_norm(f, p, weight);
  if (rhs_f == 0.0) return 0.0;
  double kernel_norm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    kernel_norm = std::max(kernel_norm, (1.0 + std::pow(A * sample_radius(g, i), d)) *
                                            std::abs(phi.samples()[i]));
  }
  const double lhs = lp_norm(convolve(phi, f), p, weight);
  return lhs / (std::pow(R, b - n) * std::pow(A, -n) * kernel_norm * rhs_f);
}

SeriesReport dyadic_series_bound(std::span<const double> d, double tau, double lambda, double q,
                                 int k0) {
  if (!(tau < 0.0)) throw PreconditionError("series bound needs tau < 0");
  if (!(q > 0.0)) throw PreconditionError("series bound needs q > 0");
  for (double v : d) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("sequence must be finite and nonnegative");
  }
  SeriesReport rep;
  const int m = static_cast<int>(d.size());
  const double qq = std::isinf(q) ? 1.0 : q;
  // extra j below the support so the geometric tail drops under 2^-60
  const int extra = static_cast<int>(std::ceil(60.0 / (-tau * qq))) + 1;
  const int j_top = m - 1 - k0;
  const int j_bottom = -k0 - extra;
  std::vector<double> e;
  for (int j = j_bottom; j <= j_top; ++j) {
    double v = 0.0;
    for (int i = m - 1; i >= std::max(0, j + k0); --i) {
      if (d[static_cast<std::size_t>(i)] == 0.0) continue;
      v += std::exp2(tau * (i - j) + lambda * i) * d[static_cast<std::size_t>(i)];
    }
    e.push_back(v);
  }
  // smallest terms first
  double acc = 0.0;
  for (double v : e) acc = lq_combine(acc, v, q);
  rep.lhs = lq_finish(acc, q);
  acc = 0.0;
  for (int i = 0; i < m; ++i) acc = lq_combine(acc, std::exp2(lambda * i) * d[static_cast<std::size_t>(i)], q);
  rep.rhs = lq_finish(acc, q);
  if (q <= 1.0) {
    rep.analytic_constant = std::exp2(tau * k0) / std::pow(1.0 - std::exp2(tau * q), 1.0 / q);
  } else {
    rep.analytic_constant = std::exp2(tau * k0) / (1.0 - std::exp2(tau));
  }
  rep.holds = rep.lhs <= rep.analytic_constant * rep.rhs * (1.0 + 1e-12);
  return rep;
}

}  // namespace dyadic
