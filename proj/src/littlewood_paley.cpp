#include "dyadic/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyadic/errors.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

double TransitionProfile::operator()(double t) const {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double a = std::exp(-steepness / (2.0 - t));
  const double b = std::exp(-steepness / (t - 1.0));
  return a / (a + b);
}

LPFamily::LPFamily(TransitionProfile profile, Grid grid, double fattening, double annulus_min)
    : profile_(profile), grid_(grid), fattening_(fattening), annulus_min_(annulus_min) {}

LPFamily LPFamily::make(const TransitionProfile& profile, const Grid& grid, double fattening) {
  if (!(profile.steepness > 0.0)) throw PreconditionError("profile steepness must be positive");
  if (!(fattening > 0.0 && fattening < 1.0)) {
    throw PreconditionError("fattening margin must lie in (0, 1)");
  }
  double prev = 1.0;
  for (int i = 0; i <= 4000; ++i) {
    const double t = 1.0 + i / 4000.0;
    const double v = profile(t);
    if (v > prev) {
      std::ostringstream os;
      os << "transition profile is not monotone near t = " << t;
      throw PreconditionError(os.str());
    }
    prev = v;
  }
  // psi on 3/5 < |xi| < 5/3 must stay above 0.05
  double worst = 1.0;
  double where = 0.0;
  const int samples = 2000;
  for (int i = 1; i < samples; ++i) {
    const double r = 0.6 + (5.0 / 3.0 - 0.6) * i / samples;
    const double v = profile(r) - profile(2.0 * r);
    if (v < worst) {
      worst = v;
      where = r;
    }
  }
  if (profile(1.2) > 0.95 || profile(5.0 / 3.0) < 0.05 || worst < 0.05) {
    std::ostringstream os;
    os << "profile violates the annulus lower bound: psi(|xi| = " << where << ") = " << worst
       << " (chi(6/5) = " << profile(1.2) << ", chi(5/3) = " << profile(5.0 / 3.0) << ")";
    throw PreconditionError(os.str());
  }
  return LPFamily(profile, grid, fattening, worst);
}

double LPFamily::fattened(double r) const {
  const double m = fattening_;
  const double outer = profile_(1.0 + (r - 2.0) / (2.0 * m));
  const double inner = 1.0 - profile_(1.0 + (r - 0.5 * (1.0 - m)) / (0.5 * m));
  return outer * inner;
}

namespace {

template <class Fn>
Field radial_multiply(const Field& f, Fn&& fn) {
  const Grid& g = f.grid();
  std::vector<cplx> s(f.spectrum().begin(), f.spectrum().end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == cplx{}) continue;
    s[i] *= fn(i);
  }
  return Field::from_spectrum(g, std::move(s));
}

void require_scale(int j, const LPFamily& fam) {
  if (!fam.valid_scale(j)) {
    throw PreconditionError("scale j = " + std::to_string(j) + " outside [0, " +
                            std::to_string(fam.j_max()) + "]");
  }
}

void require_family_grid(const Field& f, const LPFamily& fam) {
  if (!(f.grid() == fam.grid())) throw StructuralError("field and LP family use different grids");
}

}  // namespace

Field block(const Field& f, double scale_exponent, BlockKind kind, const LPFamily& fam) {
  const double s = std::exp2(-scale_exponent);
  const Grid& g = f.grid();
  return radial_multiply(f, [&](std::size_t i) { return fam.kernel(kind, s * g.frequency_norm(i)); });
}

Field delta_j(const Field& f, int j, const LPFamily& fam) {
  require_scale(j, fam);
  require_family_grid(f, fam);
  return block(f, j, BlockKind::Psi, fam);
}

Field s_j(const Field& f, int j, const LPFamily& fam) {
  require_scale(j, fam);
  require_family_grid(f, fam);
  return block(f, j, BlockKind::Phi, fam);
}

Field translated_block(const Field& f, int j, const RVec& a, const LPFamily& fam, BlockKind kind,
                       double period) {
  require_scale(j, fam);
  require_family_grid(f, fam);
  if (!(period > 0.0)) throw PreconditionError("translation period must be positive");
  const Grid& g = f.grid();
  const double s = std::exp2(-j);
  return radial_multiply(f, [&](std::size_t i) {
    const IVec k = g.frequency(i);
    const double phase = 2.0 * M_PI * s * (k[0] * a[0] + k[1] * a[1]) / period;
    return fam.kernel(kind, s * g.frequency_norm(i)) * std::polar(1.0, phase);
  });
}

PeetreReport peetre_check(const Field& f, int j, std::span<const RVec> shifts, double r,
                          double eps, const LPFamily& fam) {
  if (!(r > 0.0 && r <= 1.0)) throw PreconditionError("Peetre check needs 0 < r <= 1");
  if (!(eps > 0.0)) throw PreconditionError("Peetre check needs eps > 0");
  require_scale(j, fam);
  require_family_grid(f, fam);
  const Grid& g = f.grid();
  const double s = std::exp2(-j);
  const Field wide = radial_multiply(f, [&](std::size_t i) { return fam.fattened(s * g.frequency_norm(i)); });
  const auto mr = maximal_values(wide.magnitudes(), g, r);

  PeetreReport rep;
  for (const RVec& a : shifts) {
    const Field num = translated_block(f, j, a, fam, BlockKind::Psi, 1.0);
    const double len = g.dim() == 1 ? std::abs(a[0]) : std::hypot(a[0], a[1]);
    const double factor = std::pow(1.0 + len, eps + g.dim() / r);
    const auto mags = num.magnitudes();
    const double top = *std::max_element(mags.begin(), mags.end());
    double best = 0.0;
    for (std::size_t i = 0; i < mags.size(); ++i) {
      if (mr[i] <= 1e-300) {
        if (mags[i] > 1e-14 * top) ++rep.artifacts;
        continue;
      }
      best = std::max(best, mags[i] / (factor * mr[i]));
    }
    rep.per_shift.push_back(best);
    rep.ratio = std::max(rep.ratio, best);
  }
  return rep;
}

std::string cutoff_table_csv(const LPFamily& fam, int samples) {
  std::ostringstream os;
  os.precision(17);
  os << "xi,psi,phi,fattened\n";
  for (int i = 0; i < samples; ++i) {
    const double r = 2.5 * i / std::max(1, samples - 1);
    os << r << "," << fam.psi(r) << "," << fam.phi(r) << "," << fam.fattened(r) << "\n";
  }
  return os.str();
}

}  // namespace dyadic
