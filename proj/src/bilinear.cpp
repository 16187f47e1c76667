#include "dyadic/bilinear.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dyadic/errors.hpp"
#include "dyadic/serialize.hpp"
#include "fft.hpp"

namespace dyadic {
namespace {

double rnorm(const RVec& v) { return std::hypot(v[0], v[1]); }

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string format_vec(const IVec& k, int dim) {
  std::ostringstream os;
  os << "(" << k[0];
  if (dim == 2) os << ", " << k[1];
  os << ")";
  return os.str();
}

}  // namespace

// --- symbol library --------------------------------------------------------------------

namespace {

BilinearSymbol with_traits(BilinearSymbol s, bool smooth, bool radial) {
  s.norms_only = true;
  s.smooth_at_origin = smooth;
  s.jointly_radial = radial;
  return s;
}

}  // namespace

BilinearSymbol symbol_one() {
  return with_traits({"one", [](const RVec&, const RVec&) { return cplx{1.0, 0.0}; }, 0.0, false, 8},
                     true, true);
}

BilinearSymbol symbol_inverse_gamma(double gamma) {
  if (!(gamma > 0.0)) throw PreconditionError("inverse_gamma needs gamma > 0");
  std::ostringstream name;
  name << "inverse_gamma(" << gamma << ")";
  return with_traits({name.str(),
                      [gamma](const RVec& xi, const RVec& eta) {
                        return cplx{1.0 / (std::pow(rnorm(xi), gamma) + std::pow(rnorm(eta), gamma)),
                                    0.0};
                      },
                      -gamma, false, 6},
                     false, gamma == 2.0);
}

BilinearSymbol symbol_inverse_gamma_inhom(double gamma) {
  if (!(gamma > 0.0)) throw PreconditionError("inverse_gamma_inhom needs gamma > 0");
  std::ostringstream name;
  name << "inverse_gamma_inhom(" << gamma << ")";
  BilinearSymbol s{name.str(),
          [gamma](const RVec& xi, const RVec& eta) {
            const double a = std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.5 * gamma);
            const double b = std::pow(1.0 + eta[0] * eta[0] + eta[1] * eta[1], 0.5 * gamma);
            return cplx{1.0 / (a + b), 0.0};
          },
          -gamma, true, 6};
  return with_traits(s, true, false);
}

BilinearSymbol symbol_scattering_transient(double gamma, double t, bool inhomogeneous) {
  if (!(gamma > 0.0) || !(t >= 0.0)) {
    throw PreconditionError("scattering_transient needs gamma > 0 and t >= 0");
  }
  std::ostringstream name;
  name << (inhomogeneous ? "scattering_transient_inhom(" : "scattering_transient(") << gamma << ","
       << t << ")";
  BilinearSymbol s{name.str(),
          [gamma, t, inhomogeneous](const RVec& xi, const RVec& eta) {
            double lambda;
            if (inhomogeneous) {
              lambda = std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.5 * gamma) +
                       std::pow(1.0 + eta[0] * eta[0] + eta[1] * eta[1], 0.5 * gamma);
            } else {
              lambda = std::pow(rnorm(xi), gamma) + std::pow(rnorm(eta), gamma);
            }
            // continuous extension by t at lambda = 0
            if (lambda == 0.0) return cplx{t, 0.0};
            return cplx{-std::expm1(-t * lambda) / lambda, 0.0};
          },
          -gamma, inhomogeneous, 6};
  // entire in lambda, so smooth whenever lambda is
  const bool squares = !inhomogeneous && gamma == 2.0;
  return with_traits(s, inhomogeneous || squares, squares);
}

BilinearSymbol symbol_sum_squares() {
  return with_traits({"sum_squares",
                      [](const RVec& xi, const RVec& eta) {
                        return cplx{xi[0] * xi[0] + xi[1] * xi[1] + eta[0] * eta[0] + eta[1] * eta[1],
                                    0.0};
                      },
                      2.0, false, 6},
                     true, true);
}

BilinearSymbol symbol_cone_cutoff(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("cone_cutoff needs 0 < delta < 1");
  std::ostringstream name;
  name << "cone_cutoff(" << delta << ")";
  const TransitionProfile chi{};
  BilinearSymbol s{name.str(),
          [delta, chi](const RVec& xi, const RVec& eta) {
            const double a = rnorm(xi);
            const double b = rnorm(eta);
            if (a == 0.0 || b == 0.0) return cplx{0.0, 0.0};
            const double gap = std::abs(std::log(b / a)) - std::log(1.0 / delta);
            return cplx{chi(1.0 + gap / std::log(2.0)), 0.0};
          },
          0.0, false, 6};
  return with_traits(s, false, false);
}

BilinearSymbol symbol_product(const BilinearSymbol& a, const BilinearSymbol& b) {
  BilinearSymbol s{a.name + "*" + b.name,
                   [fa = a.evaluator, fb = b.evaluator](const RVec& xi, const RVec& eta) {
                     return fa(xi, eta) * fb(xi, eta);
                   },
                   a.order + b.order, a.inhomogeneous || b.inhomogeneous,
                   std::min(a.derivative_budget, b.derivative_budget)};
  s.norms_only = a.norms_only && b.norms_only;
  s.smooth_at_origin = a.smooth_at_origin && b.smooth_at_origin;
  s.jointly_radial = a.jointly_radial && b.jointly_radial;
  return s;
}

BilinearSymbol make_symbol(const std::string& text) {
  const std::string src = trim(text);
  if (src.empty()) throw ConfigError("empty symbol name");
  // split on '*' outside parentheses
  int depth = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == '(') ++depth;
    if (src[i] == ')') --depth;
    if (src[i] == '*' && depth == 0) {
      return symbol_product(make_symbol(src.substr(0, i)), make_symbol(src.substr(i + 1)));
    }
  }
  std::string name = src;
  std::vector<double> args;
  if (const auto open = src.find('('); open != std::string::npos) {
    if (src.back() != ')') throw ConfigError("malformed symbol '" + text + "'");
    name = trim(src.substr(0, open));
    std::stringstream ss(src.substr(open + 1, src.size() - open - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        args.push_back(std::stod(trim(item)));
      } catch (const std::exception&) {
        throw ConfigError("bad symbol argument '" + item + "' in '" + text + "'");
      }
    }
  }
  auto need = [&](std::size_t count) {
    if (args.size() != count) {
      throw ConfigError("symbol '" + name + "' takes " + std::to_string(count) + " argument(s)");
    }
  };
  try {
    if (name == "one") return need(0), symbol_one();
    if (name == "sum_squares") return need(0), symbol_sum_squares();
    if (name == "inverse_gamma") return need(1), symbol_inverse_gamma(args[0]);
    if (name == "inverse_gamma_inhom") return need(1), symbol_inverse_gamma_inhom(args[0]);
    if (name == "scattering_transient") return need(2), symbol_scattering_transient(args[0], args[1]);
    if (name == "scattering_transient_inhom") {
      return need(2), symbol_scattering_transient(args[0], args[1], true);
    }
    if (name == "cone_cutoff") return need(1), symbol_cone_cutoff(args[0]);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown symbol '" + name + "'");
}

// --- direct evaluation -------------------------------------------------------------------

Field apply_direct(const BilinearSymbol& sigma, const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw StructuralError("bilinear inputs live on different grids");
  const Grid& grid = f.grid();
  const Grid fine = grid.refined(2);
  struct Entry {
    IVec k;
    RVec x;
    cplx v;
  };
  auto support = [&](const Field& h) {
    std::vector<Entry> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const cplx v = h.spectrum()[i];
      if (v == cplx{}) continue;
      const IVec k = grid.frequency(i);
      out.push_back({k, RVec{static_cast<double>(k[0]), static_cast<double>(k[1])}, v});
    }
    return out;
  };
  const auto fs = support(f);
  const auto gs = support(g);
  std::vector<cplx> out(fine.size());
  for (const Entry& a : fs) {
    for (const Entry& b : gs) {
      const cplx s = sigma(a.x, b.x);
      if (!finite(s)) {
        throw NumericDomainError("symbol " + sigma.name + " is not finite at (k, l) = (" +
                                 format_vec(a.k, grid.dim()) + ", " + format_vec(b.k, grid.dim()) +
                                 ")");
      }
      const IVec m{a.k[0] + b.k[0], a.k[1] + b.k[1]};
      out[static_cast<std::size_t>(fine.index_of(m))] += s * a.v * b.v;
    }
  }
  return Field::from_spectrum(fine, std::move(out));
}

// --- Coifman-Meyer check ---------------------------------------------------------------

std::vector<CmSample> default_cm_samples(int dim) {
  std::vector<CmSample> out;
  for (int e = -3; e <= 5; ++e) {
    const double r = std::exp2(e);
    for (int k = 0; k < 16; ++k) {
      const double theta = (k + 0.5) * M_PI / 8.0;
      const double a = r * std::cos(theta);
      const double b = r * std::sin(theta);
      if (dim == 1) {
        out.push_back({{a, 0.0}, {b, 0.0}});
      } else {
        const double u = 0.3 + 0.4 * k;
        const double v = 1.1 - 0.7 * k;
        out.push_back({{a * std::cos(u), a * std::sin(u)}, {b * std::cos(v), b * std::sin(v)}});
      }
    }
  }
  return out;
}

namespace {

// All multi-indices of length `len` with total order <= K, ordered by total.
std::vector<std::vector<int>> multi_indices(int len, int K) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(len), 0);
  for (int total = 0; total <= K; ++total) {
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == len - 1) {
        cur[static_cast<std::size_t>(pos)] = left;
        out.push_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v) {
        cur[static_cast<std::size_t>(pos)] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Tensor central difference of order `orders` at z with step h.
cplx tensor_difference(const BilinearSymbol& sigma, const std::vector<double>& z,
                       const std::vector<int>& orders, double h, int dim) {
  const std::size_t len = z.size();
  std::vector<int> t(len, 0);
  cplx acc{};
  int total = 0;
  for (int o : orders) total += o;
  while (true) {
    double weight = 1.0;
    std::vector<double> p = z;
    for (std::size_t i = 0; i < len; ++i) {
      const int d = orders[i];
      weight *= ((t[i] % 2) ? -1.0 : 1.0) * binomial(d, t[i]);
      p[i] += (0.5 * d - t[i]) * h;
    }
    const RVec xi{p[0], dim == 2 ? p[1] : 0.0};
    const RVec eta{p[static_cast<std::size_t>(dim)], dim == 2 ? p[3] : 0.0};
    acc += weight * sigma(xi, eta);
    std::size_t i = 0;
    while (i < len && ++t[i] > orders[i]) t[i++] = 0;
    if (i == len) break;
  }
  return acc / std::pow(h, total);
}

}  // namespace

std::vector<CmEntry> cm_order_check(const BilinearSymbol& sigma, double m, int K,
                                    std::span<const CmSample> samples, int dim) {
  if (K < 0) throw PreconditionError("derivative order K must be nonnegative");
  if (K > sigma.derivative_budget) {
    throw PreconditionError("K = " + std::to_string(K) + " exceeds the symbol's derivative budget " +
                            std::to_string(sigma.derivative_budget));
  }
  const int len = 2 * dim;
  std::vector<CmEntry> table;
  for (const auto& idx : multi_indices(len, K)) {
    CmEntry e;
    e.alpha.assign(idx.begin(), idx.begin() + dim);
    e.beta.assign(idx.begin() + dim, idx.end());
    table.push_back(std::move(e));
  }
  for (const CmSample& s : samples) {
    const double size = rnorm(s.xi) + rnorm(s.eta);
    if (!sigma.inhomogeneous && size == 0.0) {
      throw PreconditionError("sample set must avoid (0, 0) for homogeneous symbols");
    }
    const double bracket = sigma.inhomogeneous ? 1.0 + size : size;
    const double scale = sigma.inhomogeneous ? std::max(1.0, size) : size;
    std::vector<double> z;
    for (int i = 0; i < dim; ++i) z.push_back(s.xi[static_cast<std::size_t>(i)]);
    for (int i = 0; i < dim; ++i) z.push_back(s.eta[static_cast<std::size_t>(i)]);
    for (CmEntry& e : table) {
      std::vector<int> orders = e.alpha;
      orders.insert(orders.end(), e.beta.begin(), e.beta.end());
      const int d = std::accumulate(orders.begin(), orders.end(), 0);
      cplx value;
      if (d == 0) {
        value = sigma(s.xi, s.eta);
      } else {
        const double h = scale * std::max(1e-3, 4.0 * std::exp2(-52.0 / (d + 2)));
        const cplx coarse = tensor_difference(sigma, z, orders, h, dim);
        const cplx fine = tensor_difference(sigma, z, orders, 0.5 * h, dim);
        value = (4.0 * fine - coarse) / 3.0;
      }
      if (!finite(value)) {
        ++e.flagged;
        continue;
      }
      e.constant = std::max(e.constant, std::abs(value) * std::pow(bracket, d - m));
    }
  }
  return table;
}

// --- paraproduct ------------------------------------------------------------------------

namespace {

std::vector<IVec> window_points(int dim, int radius) {
  std::vector<IVec> out;
  if (dim == 1) {
    for (int a = -radius; a <= radius; ++a) out.push_back({a, 0});
  } else {
    for (int a = -radius; a <= radius; ++a) {
      for (int b = -radius; b <= radius; ++b) {
        if (a * a + b * b <= radius * radius) out.push_back({a, b});
      }
    }
  }
  return out;
}

// Slab extension.  Off the carrier support the slab may be anything smooth and
// periodic on the box [-L/2, L/2)^(2n).
//  outer: symbols of |xi|, |eta| alone see each radius folded onto a constant
//         before the box edge; other symbols are cut off by envelopes.
//  inner: symbols of |(xi, eta)| are evaluated at radius
//         rho(R) = sqrt(R^2 + c^2 (1 - 4R^2)^2) inside R < 1/2; symbols singular
//         or direction dependent at the origin are cut off there.
constexpr double kEnvelopeSteepness = 0.7;
constexpr double kInnerLo = 0.1;
constexpr double kInnerHi = 0.5;
constexpr double kRetract = 0.3;

double fall(double r, double lo, double hi) {
  return TransitionProfile{kEnvelopeSteepness}(1.0 + (r - lo) / (hi - lo));
}

double envelope_f(Slab slab, double r, double period) {
  return fall(r, slab == Slab::T1 ? 2.0 : 1.0, 0.5 * period);
}

double envelope_g(double r, double period) { return fall(r, 2.0, 0.5 * period); }

double envelope_inner(double a, double b) { return 1.0 - fall(std::hypot(a, b), kInnerLo, kInnerHi); }

// r below `start`, the constant `start` from the box edge on
double fold(double r, double start, double period) {
  const double edge = 0.5 * period;
  if (r <= start) return r;
  if (r >= edge) return start;
  return start + (r - start) * fall(r, start, edge);
}

// rho(R) / R
double retraction(double a, double b) {
  const double r2 = a * a + b * b;
  if (r2 >= 0.25) return 1.0;
  const double cap = 1.0 - 4.0 * r2;
  return std::sqrt(1.0 + kRetract * kRetract * cap * cap / r2);
}

struct SlabPoint {
  double weight = 0.0;  // envelope product
  double sx = 0.0;      // xi is evaluated at sx * xi
  double sy = 0.0;
};

SlabPoint slab_point(const BilinearSymbol& sigma, Slab slab, double rx, double ry, double scale,
                     double period) {
  SlabPoint p{1.0, scale, scale};
  double fx = rx;
  double fy = ry;
  if (sigma.norms_only) {
    fx = fold(rx, slab == Slab::T1 ? 2.0 : 1.0, period);
    fy = fold(ry, 2.0, period);
  } else {
    p.weight = envelope_f(slab, rx, period) * envelope_g(ry, period);
  }
  double t = 1.0;
  if (!sigma.smooth_at_origin) {
    if (sigma.jointly_radial) {
      t = retraction(fx, fy);
    } else {
      p.weight *= envelope_inner(rx, ry);
    }
  }
  p.sx = rx > 0.0 ? scale * t * fx / rx : 0.0;
  p.sy = ry > 0.0 ? scale * t * fy / ry : 0.0;
  return p;
}

double carrier_f(const LPFamily& fam, Slab slab, double r) {
  return slab == Slab::T1 ? fam.psi(r) : fam.phi(2.0 * r);
}

double carrier_g(const LPFamily& fam, Slab slab, double r) {
  return slab == Slab::T1 ? fam.phi(r) : fam.psi(r);
}

std::size_t wrap_index(const IVec& a, int dim, int m) {
  const std::size_t i0 = static_cast<std::size_t>((a[0] % m + m) % m);
  if (dim == 1) return i0;
  return i0 * static_cast<std::size_t>(m) + static_cast<std::size_t>((a[1] % m + m) % m);
}

cplx half_shift_phase(const IVec& a, int dim, int m) {
  double angle = 0.0;
  for (int i = 0; i < dim; ++i) angle += M_PI * a[static_cast<std::size_t>(i)] * (1.0 - 1.0 / m);
  return std::polar(1.0, angle);
}

std::vector<cplx> quadrature_window(const BilinearSymbol& sigma, int j, Slab slab, double period,
                                    int m, const std::vector<IVec>& aw,
                                    const std::vector<IVec>& bw, int dim) {
  const std::size_t points = dim == 1 ? static_cast<std::size_t>(m)
                                      : static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  const double step = period / m;
  auto coord = [&](std::size_t lin) {
    if (dim == 1) return RVec{-0.5 * period + (static_cast<double>(lin) + 0.5) * step, 0.0};
    return RVec{-0.5 * period + (static_cast<double>(lin / m) + 0.5) * step,
                -0.5 * period + (static_cast<double>(lin % m) + 0.5) * step};
  };
  const double scale = std::exp2(j);
  std::vector<RVec> z(points);
  std::vector<double> r(points);
  for (std::size_t i = 0; i < points; ++i) {
    z[i] = coord(i);
    r[i] = rnorm(z[i]);
  }
  // partial transform over eta for every xi, keeping the b window
  std::vector<std::vector<cplx>> partial(bw.size(), std::vector<cplx>(points));
  std::vector<cplx> row(points);
  for (std::size_t xi = 0; xi < points; ++xi) {
    for (std::size_t eta = 0; eta < points; ++eta) {
      const SlabPoint p = slab_point(sigma, slab, r[xi], r[eta], scale, period);
      if (p.weight == 0.0) {
        row[eta] = 0.0;
        continue;
      }
      const cplx v = sigma(RVec{p.sx * z[xi][0], p.sx * z[xi][1]},
                           RVec{p.sy * z[eta][0], p.sy * z[eta][1]});
      if (!finite(v)) {
        throw NumericDomainError("symbol " + sigma.name + " is not finite inside the slab support");
      }
      row[eta] = v * p.weight;
    }
    detail::fft_forward(dim, m, row);
    for (std::size_t ib = 0; ib < bw.size(); ++ib) partial[ib][xi] = row[wrap_index(bw[ib], dim, m)];
  }
  const double norm = std::pow(static_cast<double>(m), -2.0 * dim);
  std::vector<cplx> out(aw.size() * bw.size());
  for (std::size_t ib = 0; ib < bw.size(); ++ib) {
    auto& col = partial[ib];
    detail::fft_forward(dim, m, col);
    const cplx pb = half_shift_phase(bw[ib], dim, m);
    for (std::size_t ia = 0; ia < aw.size(); ++ia) {
      out[ia * bw.size() + ib] = col[wrap_index(aw[ia], dim, m)] * pb *
                                 half_shift_phase(aw[ia], dim, m) * norm;
    }
  }
  return out;
}

std::size_t lattice_index(const std::vector<IVec>& pts, const IVec& v) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i] == v) return i;
  }
  throw PreconditionError("lattice point outside the coefficient window");
}

}  // namespace

cplx CoefficientSlab::coefficient(const IVec& av, const IVec& bv) const {
  return c[lattice_index(a, av) * b.size() + lattice_index(b, bv)];
}

cplx CoefficientSlab::scaled_coefficient(const IVec& av, const IVec& bv) const {
  return big_c[lattice_index(a, av) * b.size() + lattice_index(b, bv)];
}

CoefficientSlab paraproduct_coefficients(const BilinearSymbol& sigma, const LPFamily& fam, int j,
                                         int decay, int a_max, Slab slab, double period,
                                         const QuadratureOptions& options) {
  const int dim = fam.grid().dim();
  if (decay <= dim) throw PreconditionError("decay exponent N must exceed the dimension");
  if (!(period > 4.0)) throw PreconditionError("period L must exceed 4 to contain the cutoffs");
  if (a_max < 0) throw PreconditionError("window radius must be nonnegative");
  if (!fam.valid_scale(j)) throw PreconditionError("scale j outside the family's range");
  int m = options.initial_points > 0 ? options.initial_points : (dim == 1 ? 64 : 32);
  const int m_max = options.max_points > 0 ? options.max_points : (dim == 1 ? 1024 : 64);
  while (m <= 2 * a_max) m *= 2;
  const double tolerance = options.tolerance > 0.0 ? options.tolerance : (dim == 1 ? 1e-8 : 1e-3);

  CoefficientSlab out;
  out.slab = slab;
  out.j = j;
  out.a = window_points(dim, a_max);
  out.b = out.a;
  std::vector<cplx> prev = quadrature_window(sigma, j, slab, period, m, out.a, out.b, dim);
  while (true) {
    if (2 * m > m_max) {
      std::ostringstream os;
      os << "paraproduct quadrature did not reach " << tolerance << " for j = " << j
         << " (points per axis " << m << "); relative changes:";
      for (double v : out.refinement_trace) os << " " << v;
      throw ConvergenceError(os.str());
    }
    m *= 2;
    std::vector<cplx> next = quadrature_window(sigma, j, slab, period, m, out.a, out.b, dim);
    double diff = 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      diff = std::max(diff, std::abs(next[i] - prev[i]));
      top = std::max(top, std::abs(next[i]));
    }
    const double change = top == 0.0 ? 0.0 : diff / top;
    out.refinement_trace.push_back(change);
    prev = std::move(next);
    if (change <= tolerance) break;
  }
  out.quadrature_points = m;
  out.c = std::move(prev);
  out.big_c.resize(out.c.size());
  for (std::size_t ia = 0; ia < out.a.size(); ++ia) {
    for (std::size_t ib = 0; ib < out.b.size(); ++ib) {
      const IVec& av = out.a[ia];
      const IVec& bv = out.b[ib];
      const double w = 1.0 + av[0] * av[0] + av[1] * av[1] + bv[0] * bv[0] + bv[1] * bv[1];
      out.big_c[ia * out.b.size() + ib] = std::pow(w, decay) * out.c[ia * out.b.size() + ib];
    }
  }
  return out;
}

ParaproductExpansion build_paraproduct(const BilinearSymbol& sigma, const LPFamily& fam,
                                       std::optional<int> decay, int a_max, double period,
                                       const QuadratureOptions& options) {
  ParaproductExpansion e;
  e.dim = fam.grid().dim();
  e.decay = decay.value_or(e.dim + 1);
  e.a_max = a_max;
  e.period = period;
  e.grid = fam.grid();
  e.steepness = fam.profile().steepness;
  e.fattening = fam.fattening();
  for (int j = fam.j_min(); j <= fam.j_max(); ++j) {
    e.t1.push_back(paraproduct_coefficients(sigma, fam, j, e.decay, a_max, Slab::T1, period, options));
    e.t2.push_back(paraproduct_coefficients(sigma, fam, j, e.decay, a_max, Slab::T2, period, options));
  }
  return e;
}

namespace {

// Samples of exp(2 pi i 2^-j k.a / L) K(2^-j |k|) hhat(k) on the refined grid.
std::vector<cplx> carried_block(const Field& h, const Grid& fine, int j, const IVec& a,
                                double period, const std::function<double(double)>& kernel) {
  const Grid& g = h.grid();
  const double s = std::exp2(-j);
  std::vector<cplx> spec(fine.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx v = h.spectrum()[i];
    if (v == cplx{}) continue;
    const double kv = kernel(s * g.frequency_norm(i));
    if (kv == 0.0) continue;
    const IVec k = g.frequency(i);
    const double phase = 2.0 * M_PI * s * (k[0] * a[0] + k[1] * a[1]) / period;
    spec[static_cast<std::size_t>(fine.index_of(k))] = v * kv * std::polar(1.0, phase);
  }
  const Field block = Field::from_spectrum(fine, std::move(spec));
  return {block.samples().begin(), block.samples().end()};
}

}  // namespace

Field apply_paraproduct(const ParaproductExpansion& expansion, const BilinearSymbol& sigma,
                        const Field& f, const Field& g, const LPFamily& fam,
                        std::optional<int> window) {
  (void)sigma;
  if (!(f.grid() == g.grid())) throw StructuralError("bilinear inputs live on different grids");
  if (!(fam.grid() == expansion.grid) || !(f.grid() == expansion.grid) ||
      fam.profile().steepness != expansion.steepness || fam.fattening() != expansion.fattening) {
    throw StructuralError("paraproduct expansion was built for a different LP family");
  }
  const int radius = window.value_or(expansion.a_max);
  if (radius > expansion.a_max) throw PreconditionError("window exceeds the coefficient table");
  const Grid fine = f.grid().refined(2);
  std::vector<cplx> total(fine.size());
  auto within = [&](const IVec& v) { return v[0] * v[0] + v[1] * v[1] <= radius * radius; };

  for (const auto* slabs : {&expansion.t1, &expansion.t2}) {
    for (const CoefficientSlab& slab : *slabs) {
      const Slab kind = slab.slab;
      auto kf = [&](double r) { return carrier_f(fam, kind, r); };
      auto kg = [&](double r) { return carrier_g(fam, kind, r); };
      std::vector<std::size_t> bi;
      std::vector<std::vector<cplx>> gb;
      for (std::size_t ib = 0; ib < slab.b.size(); ++ib) {
        if (!within(slab.b[ib])) continue;
        bi.push_back(ib);
        gb.push_back(carried_block(g, fine, slab.j, slab.b[ib], expansion.period, kg));
      }
      std::vector<cplx> h(fine.size());
      for (std::size_t ia = 0; ia < slab.a.size(); ++ia) {
        if (!within(slab.a[ia])) continue;
        std::fill(h.begin(), h.end(), cplx{});
        for (std::size_t t = 0; t < bi.size(); ++t) {
          const cplx c = slab.c[ia * slab.b.size() + bi[t]];
          const auto& gv = gb[t];
          for (std::size_t x = 0; x < h.size(); ++x) h[x] += c * gv[x];
        }
        const auto fa = carried_block(f, fine, slab.j, slab.a[ia], expansion.period, kf);
        for (std::size_t x = 0; x < h.size(); ++x) total[x] += fa[x] * h[x];
      }
    }
  }
  return Field::from_samples(fine, std::move(total));
}

std::vector<std::pair<int, double>> reconstruction_trace(const ParaproductExpansion& expansion,
                                                         const BilinearSymbol& sigma, const Field& f,
                                                         const Field& g, const LPFamily& fam,
                                                         std::span<const int> windows) {
  const Field exact = apply_direct(sigma, f, g);
  const double ref = l2_norm(exact);
  std::vector<std::pair<int, double>> out;
  for (int w : windows) {
    const Field approx = apply_paraproduct(expansion, sigma, f, g, fam, w);
    const double err = l2_norm(approx - exact);
    out.emplace_back(w, ref == 0.0 ? err : err / ref);
  }
  return out;
}

double coefficient_spread(const ParaproductExpansion& expansion, double m, const IVec& a,
                          const IVec& b) {
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (const CoefficientSlab& s : expansion.t1) {
    const double v = std::exp2(-s.j * m) * std::abs(s.scaled_coefficient(a, b));
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  return lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
}

// --- derivative budget ------------------------------------------------------------------

int derivative_budget_value(int n, double p1, double p2, double p, double q, double tau1,
                            double tau2, BudgetSetting setting) {
  const double first = 1.0 / std::min({p, q, 1.0});
  double inner = std::min({1.0, p1 / tau1, p2 / tau2});
  if (setting == BudgetSetting::tl) inner = std::min(inner, q);
  const double x = n * (first + 1.0 / inner);
  // integer part; the guard keeps exact integers from rounding down
  return 2 * (static_cast<int>(std::floor(x + 1e-12)) + 1);
}

DerivativeBudget derivative_budget(int n, double p1, double p2, double p, double q,
                                   const WeightSpec& w1, const WeightSpec& w2,
                                   BudgetSetting setting) {
  DerivativeBudget out;
  out.tau1 = tau_w_estimate(w1, n);
  out.tau2 = tau_w_estimate(w2, n);
  out.value = derivative_budget_value(n, p1, p2, p, q, out.tau1.upper, out.tau2.upper, setting);
  return out;
}

nlohmann::json coefficients_to_json(const ParaproductExpansion& e) {
  nlohmann::json out{{"n", e.dim},         {"N", e.grid.resolution()}, {"L", e.period},
                     {"decay", e.decay},   {"A", e.a_max},             {"steepness", e.steepness},
                     {"fattening", e.fattening}};
  auto vec = [&](const IVec& v) {
    return e.dim == 1 ? nlohmann::json::array({v[0]}) : nlohmann::json::array({v[0], v[1]});
  };
  nlohmann::json slabs = nlohmann::json::array();
  for (const auto* family : {&e.t1, &e.t2}) {
    for (const CoefficientSlab& s : *family) {
      nlohmann::json entries = nlohmann::json::array();
      for (std::size_t ia = 0; ia < s.a.size(); ++ia) {
        for (std::size_t ib = 0; ib < s.b.size(); ++ib) {
          const cplx c = s.c[ia * s.b.size() + ib];
          entries.push_back({vec(s.a[ia]), vec(s.b[ib]), c.real(), c.imag()});
        }
      }
      slabs.push_back({{"slab", s.slab == Slab::T1 ? "T1" : "T2"},
                       {"j", s.j},
                       {"M", s.quadrature_points},
                       {"trace", s.refinement_trace},
                       {"entries", std::move(entries)}});
    }
  }
  out["slabs"] = std::move(slabs);
  return out;
}

}  // namespace dyadic
