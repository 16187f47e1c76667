#include "dyadic/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_tl_like(Family f) { return f == Family::TriebelLizorkin || f == Family::Besov; }

void require_family_grid(const Field& f, const LPFamily& fam) {
  if (!(f.grid() == fam.grid())) throw StructuralError("field and LP family use different grids");
}

// Blocks with their smoothness weights, ordered by scale.
std::vector<std::pair<double, Field>> weighted_blocks(const Field& f, const SpaceSpec& spec,
                                                      const LPFamily& fam) {
  std::vector<std::pair<double, Field>> out;
  if (spec.homogeneous) {
    if (!f.is_mean_zero()) throw PreconditionError("homogeneous norms need a mean-zero field");
    for (int j = 0; j <= fam.j_max(); ++j) out.emplace_back(std::exp2(j * spec.s), delta_j(f, j, fam));
  } else {
    out.emplace_back(1.0, s_j(f, 0, fam));
    for (int j = 1; j <= fam.j_max(); ++j) out.emplace_back(std::exp2(j * spec.s), delta_j(f, j, fam));
  }
  return out;
}

double lq_combine(double acc, double v, double q) {
  return std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q);
}

double lq_finish(double acc, double q) { return std::isinf(q) ? acc : std::pow(acc, 1.0 / q); }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::TriebelLizorkin: return "TL";
    case Family::Besov: return "Besov";
    case Family::Hardy: return "Hardy";
    case Family::LocalHardy: return "LocalHardy";
    case Family::Lebesgue: return "Lebesgue";
    case Family::Lorentz: return "Lorentz";
    case Family::Morrey: return "Morrey";
    case Family::VariableLebesgue: return "Variable";
    case Family::Sobolev: return "Sobolev";
  }
  return "?";
}

std::string to_string(Base b) {
  switch (b) {
    case Base::Lebesgue: return "lebesgue";
    case Base::Lorentz: return "lorentz";
    case Base::Morrey: return "morrey";
    case Base::Variable: return "variable";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  std::string k = name;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (k == "tl" || k == "triebellizorkin" || k == "triebel-lizorkin") return Family::TriebelLizorkin;
  if (k == "besov" || k == "b") return Family::Besov;
  if (k == "hardy" || k == "h") return Family::Hardy;
  if (k == "localhardy" || k == "local_hardy" || k == "h_local") return Family::LocalHardy;
  if (k == "lebesgue" || k == "lp") return Family::Lebesgue;
  if (k == "lorentz") return Family::Lorentz;
  if (k == "morrey") return Family::Morrey;
  if (k == "variable" || k == "variablelebesgue") return Family::VariableLebesgue;
  if (k == "sobolev" || k == "w") return Family::Sobolev;
  throw ConfigError("unknown space family '" + name + "'");
}

Base base_from_string(const std::string& name) {
  std::string k = name;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (k == "lebesgue" || k == "lp") return Base::Lebesgue;
  if (k == "lorentz") return Base::Lorentz;
  if (k == "morrey") return Base::Morrey;
  if (k == "variable") return Base::Variable;
  throw ConfigError("unknown base space '" + name + "'");
}

void SpaceSpec::validate() const {
  auto fail = [&](const std::string& why) {
    throw PreconditionError(to_string(family) + " space: " + why);
  };
  if (!(p > 0.0)) fail("p must be positive");
  if (!(q > 0.0)) fail("q must be positive");
  const bool uses_base = is_tl_like(family) || family == Family::Hardy ||
                         family == Family::LocalHardy || family == Family::Sobolev;
  if (family == Family::TriebelLizorkin && std::isinf(p)) {
    fail("p = infinity is not supported for Triebel-Lizorkin");
  }
  if ((family == Family::Hardy || family == Family::LocalHardy || family == Family::Sobolev) &&
      std::isinf(p)) {
    fail("p must be finite");
  }
  const Base eff = family == Family::Lorentz   ? Base::Lorentz
                   : family == Family::Morrey  ? Base::Morrey
                   : family == Family::VariableLebesgue ? Base::Variable
                   : uses_base                 ? base
                                               : Base::Lebesgue;
  if (eff == Base::Lorentz && (std::isinf(p) || !(t > 0.0))) fail("Lorentz needs p < infinity, t > 0");
  if (eff == Base::Morrey && (std::isinf(t) || p > t)) fail("Morrey needs p <= t < infinity");
  if (eff == Base::Variable && !exponent) fail("variable base needs an exponent function");
}

std::string SpaceSpec::describe() const {
  std::ostringstream os;
  os << (homogeneous ? "" : "inhom ") << to_string(family) << "(p=" << p;
  if (is_tl_like(family)) os << ", q=" << q << ", s=" << s;
  if (family == Family::Sobolev) os << ", s=" << s;
  if (base == Base::Lorentz || base == Base::Morrey || family == Family::Lorentz ||
      family == Family::Morrey) {
    os << ", t=" << t;
  }
  if (base != Base::Lebesgue) os << ", base=" << to_string(base);
  os << ", w=" << weight.describe() << ")";
  return os.str();
}

// --- thresholds --------------------------------------------------------------------

double tau_pq(int n, double p, double q, double tau_w) {
  return n * (1.0 / std::min({p / tau_w, q, 1.0}) - 1.0);
}

double tau_p(int n, double p, double tau_w) { return n * (1.0 / std::min(p / tau_w, 1.0) - 1.0); }

double tau_ptq(int n, double p, double t, double q, double tau_w) {
  return n * (1.0 / std::min({p / tau_w, t, q, 1.0}) - 1.0);
}

Thresholds thresholds(const SpaceSpec& spec, int dim) {
  Thresholds th;
  th.tau_w = tau_w_estimate(spec.weight, dim);
  const double tw = th.tau_w.upper;
  const double p = spec.base == Base::Variable && spec.exponent
                       ? spec.exponent->scale * (spec.exponent->base - std::abs(spec.exponent->amplitude))
                       : spec.p;
  th.tau_pq = tau_pq(dim, p, spec.q, tw);
  th.tau_p = tau_p(dim, p, tw);
  th.tau_ptq = tau_ptq(dim, p, spec.t, spec.q, tw);
  if (spec.family == Family::Besov) {
    th.relevant = th.tau_p;
  } else if (spec.base == Base::Lorentz || spec.base == Base::Morrey) {
    th.relevant = th.tau_ptq;
  } else {
    th.relevant = th.tau_pq;
  }
  return th;
}

// --- norms -------------------------------------------------------------------------

double base_norm(std::span<const double> magnitudes, const SpaceSpec& spec, const Grid& grid) {
  switch (spec.base) {
    case Base::Lebesgue: return lp_norm(magnitudes, spec.p, Weight::sample(spec.weight, grid));
    case Base::Lorentz:
      return lorentz_norm(magnitudes, spec.p, spec.t, Weight::sample(spec.weight, grid));
    case Base::Morrey:
      return morrey_norm(magnitudes, spec.p, spec.t, Weight::sample(spec.weight, grid));
    case Base::Variable:
      if (!spec.exponent) throw PreconditionError("variable base needs an exponent function");
      return variable_lp_norm(magnitudes, ExponentFunction::sample(*spec.exponent, grid));
  }
  return 0.0;
}

double tl_norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam) {
  if (std::isinf(spec.p)) throw PreconditionError("p = infinity is not supported for Triebel-Lizorkin");
  require_family_grid(f, fam);
  const auto blocks = weighted_blocks(f, spec, fam);
  std::vector<double> acc(f.grid().size(), 0.0);
  for (const auto& [scale, b] : blocks) {
    const auto mags = b.magnitudes();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = lq_combine(acc[i], scale * mags[i], spec.q);
  }
  for (auto& v : acc) v = lq_finish(v, spec.q);
  return base_norm(acc, spec, f.grid());
}

double besov_norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam) {
  require_family_grid(f, fam);
  const auto blocks = weighted_blocks(f, spec, fam);
  double acc = 0.0;
  for (const auto& [scale, b] : blocks) {
    acc = lq_combine(acc, scale * base_norm(b.magnitudes(), spec, f.grid()), spec.q);
  }
  return lq_finish(acc, spec.q);
}

double hardy_norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam) {
  require_family_grid(f, fam);
  const bool local = spec.family == Family::LocalHardy || !spec.homogeneous;
  if (spec.hardy_method == HardyMethod::square) {
    SpaceSpec tl = spec;
    tl.family = Family::TriebelLizorkin;
    tl.homogeneous = !local;
    tl.q = 2.0;
    tl.s = 0.0;
    return tl_norm(f, tl, fam);
  }
  // sup over t = 2^-j of |phi_t * f|; j = -1 adds the mean for the global form
  std::vector<double> sup(f.grid().size(), 0.0);
  const int top = f.grid().log2_resolution();
  for (int j = local ? 0 : -1; j <= top; ++j) {
    const auto mags = block(f, j, BlockKind::Phi, fam).magnitudes();
    for (std::size_t i = 0; i < sup.size(); ++i) sup[i] = std::max(sup[i], mags[i]);
  }
  return base_norm(sup, spec, f.grid());
}

double hardy_norm(const Field& f, double p, const WeightSpec& w, bool local, HardyMethod method,
                  const LPFamily& fam) {
  SpaceSpec spec;
  spec.family = local ? Family::LocalHardy : Family::Hardy;
  spec.homogeneous = !local;
  spec.p = p;
  spec.weight = w;
  spec.hardy_method = method;
  return hardy_norm(f, spec, fam);
}

double sobolev_norm(const Field& f, double s, double p, const WeightSpec& w, bool homogeneous,
                    const LPFamily& fam) {
  const Field lifted = homogeneous ? d_s(f, s) : j_s(f, s);
  return hardy_norm(lifted, p, w, !homogeneous, HardyMethod::square, fam);
}

double norm(const Field& f, const SpaceSpec& spec, const LPFamily& fam) {
  spec.validate();
  switch (spec.family) {
    case Family::TriebelLizorkin: return tl_norm(f, spec, fam);
    case Family::Besov: return besov_norm(f, spec, fam);
    case Family::Hardy:
    case Family::LocalHardy: return hardy_norm(f, spec, fam);
    case Family::Sobolev: {
      const Field lifted = spec.homogeneous ? d_s(f, spec.s) : j_s(f, spec.s);
      SpaceSpec h = spec;
      h.family = spec.homogeneous ? Family::Hardy : Family::LocalHardy;
      return hardy_norm(lifted, h, fam);
    }
    case Family::Lebesgue: return lp_norm(f, spec.p, Weight::sample(spec.weight, f.grid()));
    case Family::Lorentz:
      return lorentz_norm(f, spec.p, spec.t, Weight::sample(spec.weight, f.grid()));
    case Family::Morrey:
      return morrey_norm(f, spec.p, spec.t, Weight::sample(spec.weight, f.grid()));
    case Family::VariableLebesgue:
      return variable_lp_norm(f, ExponentFunction::sample(*spec.exponent, f.grid()));
  }
  return 0.0;
}

double overlap_multiplier(double frequency_norm, const LPFamily& fam) {
  double m = 0.0;
  for (int j = 0; j <= fam.j_max(); ++j) {
    const double v = fam.psi(std::exp2(-j) * frequency_norm);
    m += v * v;
  }
  return m;
}

std::optional<double> lifting_check(const Field& f, const SpaceSpec& spec, const LPFamily& fam) {
  SpaceSpec base = spec;
  base.s = 0.0;
  const Field lifted = spec.homogeneous ? d_s(f, spec.s) : j_s(f, spec.s);
  const bool besov = spec.family == Family::Besov;
  const double num = besov ? besov_norm(f, spec, fam) : tl_norm(f, spec, fam);
  const double den = besov ? besov_norm(lifted, base, fam) : tl_norm(lifted, base, fam);
  if (den == 0.0 || !std::isfinite(num) || !std::isfinite(den)) return std::nullopt;
  return num / den;
}

}  // namespace dyadic
