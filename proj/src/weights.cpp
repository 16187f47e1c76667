#include "dyadic/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double torus_radius(const RVec& x, int dim) {
  return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
}

void require_size(std::span<const double> values, const Grid& grid, const char* what) {
  if (values.size() != grid.size()) {
    throw StructuralError(std::string(what) + " has " + std::to_string(values.size()) +
                          " samples, grid expects " + std::to_string(grid.size()));
  }
}

// Sparse table for range maxima on a doubled row.
class RangeMax {
 public:
  explicit RangeMax(std::vector<double> row) {
    const std::size_t n = row.size();
    table_.push_back(std::move(row));
    for (std::size_t w = 1; 2 * w <= n; w *= 2) {
      const auto& prev = table_.back();
      std::vector<double> next(n - 2 * w + 1);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::max(prev[i], prev[i + w]);
      table_.push_back(std::move(next));
    }
  }
  // max over [lo, hi], inclusive
  double query(std::size_t lo, std::size_t hi) const {
    const std::size_t len = hi - lo + 1;
    const int k = std::bit_width(len) - 1;
    const auto& t = table_[static_cast<std::size_t>(k)];
    return std::max(t[lo], t[hi + 1 - (std::size_t{1} << k)]);
  }

 private:
  std::vector<std::vector<double>> table_;
};

// Segment tree over a doubled periodic row.  Range sums only add nonnegative
// partial sums, so small balls keep relative accuracy next to large spikes.
class RangeSum {
 public:
  explicit RangeSum(std::span<const double> row) : n_(2 * row.size()), tree_(2 * n_) {
    for (std::size_t i = 0; i < n_; ++i) tree_[n_ + i] = row[i % row.size()];
    for (std::size_t i = n_ - 1; i > 0; --i) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
  }
  // sum over [lo, hi], inclusive
  double query(std::size_t lo, std::size_t hi) const {
    double s = 0.0;
    for (lo += n_, hi += n_ + 1; lo < hi; lo /= 2, hi /= 2) {
      if (lo & 1) s += tree_[lo++];
      if (hi & 1) s += tree_[--hi];
    }
    return s;
  }

 private:
  std::size_t n_;
  std::vector<double> tree_;
};

}  // namespace

// --- WeightSpec / Weight -----------------------------------------------------

WeightSpec WeightSpec::compose(const WeightSpec& w1, double e1, const WeightSpec& w2, double e2) {
  return {std::pow(w1.scale, e1) * std::pow(w2.scale, e2), w1.exponent * e1 + w2.exponent * e2};
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  if (is_constant()) {
    os << "constant(" << scale << ")";
  } else {
    os << "power(a=" << exponent;
    if (scale != 1.0) os << ", c=" << scale;
    os << ")";
  }
  return os.str();
}

Weight::Weight(Grid grid, std::vector<double> values, WeightKind kind,
               std::optional<WeightSpec> spec)
    : grid_(grid), values_(std::move(values)), kind_(kind), spec_(spec) {}

Weight Weight::sample(const WeightSpec& spec, const Grid& grid) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
    throw PreconditionError("weight scale must be positive and finite");
  }
  if (spec.is_constant()) {
    return Weight(grid, std::vector<double>(grid.size(), spec.scale), WeightKind::constant, spec);
  }
  const double a = spec.exponent;
  if (!(a > -grid.dim())) {
    throw PreconditionError("power weight |x|^a needs a > -n to be locally integrable");
  }
  const double h = 1.0 / grid.resolution();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = torus_radius(grid.point(i), grid.dim());
    if (r > 0.0) {
      values[i] = spec.scale * std::pow(r, a);
    } else if (grid.dim() == 1) {
      values[i] = spec.scale * std::pow(0.5 * h, a) / (a + 1.0);
    } else {
      values[i] = spec.scale * std::pow(0.5 * h, a);
    }
  }
  return Weight(grid, std::move(values), WeightKind::power, spec);
}

Weight Weight::custom(const Grid& grid, std::vector<double> samples) {
  require_size(samples, grid, "weight");
  for (double v : samples) {
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("weight samples must be positive");
  }
  return Weight(grid, std::move(samples), WeightKind::custom, std::nullopt);
}

double Weight::measure() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * grid_.cell_volume();
}

// --- ExponentFunction ----------------------------------------------------------

ExponentFunction::ExponentFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require_size(values_, grid_, "exponent function");
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  p_minus_ = *lo;
  p_plus_ = *hi;
  if (!(p_minus_ > 0.0) || !std::isfinite(p_plus_)) {
    throw PreconditionError("variable exponent must satisfy 0 < p- <= p+ < infinity");
  }
}

ExponentFunction ExponentFunction::sample(const ExponentSpec& spec, const Grid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i)[0];
    values[i] = spec.scale * (spec.base + spec.amplitude * std::sin(2.0 * M_PI * x));
  }
  return ExponentFunction(grid, std::move(values));
}

ExponentFunction ExponentFunction::custom(const Grid& grid, std::vector<double> samples) {
  return ExponentFunction(grid, std::move(samples));
}

ExponentFunction ExponentFunction::constant(const Grid& grid, double p) {
  return ExponentFunction(grid, std::vector<double>(grid.size(), p));
}

// --- BallFamily ------------------------------------------------------------------

BallFamily::BallFamily(const Grid& grid) : grid_(grid) {
  const int n = grid.resolution();
  const int levels = grid.log2_resolution() + 1;
  for (int l = 0; l < levels; ++l) {
    radii_.push_back(std::ldexp(1.0, -l));
    std::vector<Row> rows;
    std::size_t count = 0;
    if (l == 0) {
      count = grid.size();
    } else {
      const long rho = n >> l;  // radius in cells
      const long rho2 = rho * rho;
      if (grid.dim() == 1) {
        rows.push_back({0, static_cast<int>(rho - 1)});
      } else {
        for (long dy = -(rho - 1); dy <= rho - 1; ++dy) {
          long hw = 0;
          while ((hw + 1) * (hw + 1) + dy * dy < rho2) ++hw;
          rows.push_back({static_cast<int>(dy), static_cast<int>(hw)});
        }
      }
      for (const Row& r : rows) count += static_cast<std::size_t>(2 * r.half_width + 1);
    }
    rows_.push_back(std::move(rows));
    sizes_.push_back(count);
  }
}

std::vector<double> BallFamily::ball_sums(std::span<const double> values, int level) const {
  require_size(values, grid_, "value array");
  const std::size_t total = grid_.size();
  const auto& rows = rows_[static_cast<std::size_t>(level)];
  if (rows.empty()) {
    return std::vector<double>(total, std::accumulate(values.begin(), values.end(), 0.0));
  }
  const int n = grid_.resolution();
  const int nrows = grid_.dim() == 1 ? 1 : n;
  std::vector<RangeSum> trees;
  trees.reserve(static_cast<std::size_t>(nrows));
  for (int y = 0; y < nrows; ++y) {
    trees.emplace_back(values.subspan(static_cast<std::size_t>(y) * n, static_cast<std::size_t>(n)));
  }
  std::vector<double> out(total, 0.0);
  for (int cy = 0; cy < nrows; ++cy) {
    for (int cx = 0; cx < n; ++cx) {
      double s = 0.0;
      for (const Row& row : rows) {
        const int y = ((cy + row.dy) % nrows + nrows) % nrows;
        const std::size_t lo = static_cast<std::size_t>((cx - row.half_width + n) % n);
        s += trees[static_cast<std::size_t>(y)].query(lo, lo + 2 * static_cast<std::size_t>(row.half_width));
      }
      out[static_cast<std::size_t>(cy) * n + cx] = s;
    }
  }
  return out;
}

// --- Muckenhoupt -------------------------------------------------------------------

double ap_constant(const Weight& w, double p) {
  if (!(p > 1.0)) throw PreconditionError("A_p constant needs p > 1");
  const Grid& g = w.grid();
  const BallFamily balls(g);
  std::vector<double> dual(g.size());
  const double e = -1.0 / (p - 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) dual[i] = std::pow(w.values()[i], e);
  double best = 0.0;
  for (int l = 0; l < balls.levels(); ++l) {
    const auto sw = balls.ball_sums(w.values(), l);
    const auto sv = balls.ball_sums(dual, l);
    const double size = static_cast<double>(balls.ball_size(l));
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double value = (sw[c] / size) * std::pow(sv[c] / size, p - 1.0);
      best = std::max(best, value);
    }
  }
  // round-off can push constant weights a hair above 1
  return std::max(best, 1.0);
}

namespace {

bool in_a_tau(const WeightSpec& spec, int dim, double tau, const TauOptions& opt) {
  const int base = opt.base_resolution > 0 ? opt.base_resolution : (dim == 1 ? 256 : 16);
  const int levels = std::max(3, opt.levels);
  std::vector<double> a;
  for (int i = 0; i < levels; ++i) {
    a.push_back(ap_constant(Weight::sample(spec, Grid(dim, base << i)), tau));
  }
  const double d_prev = a[a.size() - 2] - a[a.size() - 3];
  const double d_last = a.back() - a[a.size() - 2];
  if (d_last <= 1e-9 * a.back()) return true;  // converged to round-off
  if (d_prev <= 0.0) return false;
  return -std::log2(d_last / d_prev) > opt.decay_threshold;
}

struct TauKey {
  double exponent;
  int dim;
  double tau_max, tolerance, threshold, band;
  int base, levels;
  auto operator<=>(const TauKey&) const = default;
};

}  // namespace

TauEstimate tau_w_estimate(const WeightSpec& spec, int dim, const TauOptions& options) {
  if (dim != 1 && dim != 2) throw PreconditionError("dimension must be 1 or 2");
  static std::mutex mutex;
  static std::map<TauKey, TauEstimate> cache;
  const TauKey key{spec.exponent, dim, options.tau_max, options.tolerance, options.decay_threshold,
                   options.band, options.base_resolution, options.levels};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  TauEstimate est;
  if (spec.is_constant()) {
    est = {1.0, 1.0 + options.band, true};
  } else if (!in_a_tau(spec, dim, options.tau_max, options)) {
    est = {options.tau_max, kInf, false};
  } else {
    // tau close to 1 makes w^(-1/(tau-1)) overflow; 1.01 is the first probe
    double lo = 1.0;
    double hi = 1.01;
    if (!in_a_tau(spec, dim, hi, options)) {
      lo = hi;
      hi = options.tau_max;
      while (hi - lo > options.tolerance) {
        const double mid = 0.5 * (lo + hi);
        (in_a_tau(spec, dim, mid, options) ? hi : lo) = mid;
      }
    }
    est = {std::max(1.0, lo - options.band), hi + options.band, true};
  }
  std::lock_guard lock(mutex);
  cache.emplace(key, est);
  return est;
}

// --- base quasi-norms -------------------------------------------------------------

double lp_norm(std::span<const double> magnitudes, double p, const Weight& w) {
  require_size(magnitudes, w.grid(), "field");
  if (!(p > 0.0)) throw PreconditionError("Lebesgue exponent must be positive");
  if (std::isinf(p)) return *std::max_element(magnitudes.begin(), magnitudes.end());
  double s = 0.0;
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (magnitudes[i] != 0.0) s += std::pow(magnitudes[i], p) * w.values()[i];
  }
  return std::pow(s * w.grid().cell_volume(), 1.0 / p);
}

double lp_norm(const Field& f, double p, const Weight& w) { return lp_norm(f.magnitudes(), p, w); }

double lorentz_norm(std::span<const double> magnitudes, double p, double t, const Weight& w) {
  require_size(magnitudes, w.grid(), "field");
  if (!(p > 0.0) || std::isinf(p)) throw PreconditionError("Lorentz norm needs 0 < p < infinity");
  if (!(t > 0.0)) throw PreconditionError("Lorentz norm needs t > 0");
  std::vector<std::size_t> order(magnitudes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return magnitudes[a] > magnitudes[b]; });
  const double h = w.grid().cell_volume();
  double measure = 0.0;
  double acc = 0.0;
  for (std::size_t i : order) {
    const double v = magnitudes[i];
    if (v == 0.0) break;
    const double next = measure + w.values()[i] * h;
    if (std::isinf(t)) {
      acc = std::max(acc, v * std::pow(next, 1.0 / p));
    } else {
      acc += std::pow(v, t) * (p / t) * (std::pow(next, t / p) - std::pow(measure, t / p));
    }
    measure = next;
  }
  return std::isinf(t) ? acc : std::pow(acc, 1.0 / t);
}

double lorentz_norm(const Field& f, double p, double t, const Weight& w) {
  return lorentz_norm(f.magnitudes(), p, t, w);
}

MorreyResult morrey_norm_detail(std::span<const double> magnitudes, double p, double t,
                                const Weight& w) {
  require_size(magnitudes, w.grid(), "field");
  if (!(p > 0.0) || !(t < kInf)) throw PreconditionError("Morrey norm needs 0 < p <= t < infinity");
  if (p > t) throw PreconditionError("Morrey norm needs p <= t");
  const Grid& g = w.grid();
  const double h = g.cell_volume();
  std::vector<double> mass(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    mass[i] = magnitudes[i] == 0.0 ? 0.0 : std::pow(magnitudes[i], p) * w.values()[i];
  }
  const BallFamily balls(g);
  MorreyResult best;
  const double e = 1.0 / t - 1.0 / p;
  for (int l = 0; l < balls.levels(); ++l) {
    const auto sm = balls.ball_sums(mass, l);
    const auto sw = balls.ball_sums(w.values(), l);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double value = std::pow(sw[c] * h, e) * std::pow(sm[c] * h, 1.0 / p);
      if (value > best.value) best = {value, c, l};
    }
  }
  return best;
}

double morrey_norm(std::span<const double> magnitudes, double p, double t, const Weight& w) {
  return morrey_norm_detail(magnitudes, p, t, w).value;
}

double morrey_norm(const Field& f, double p, double t, const Weight& w) {
  return morrey_norm(f.magnitudes(), p, t, w);
}

double variable_lp_norm(std::span<const double> magnitudes, const ExponentFunction& pfun) {
  require_size(magnitudes, pfun.grid(), "field");
  const double top = *std::max_element(magnitudes.begin(), magnitudes.end());
  if (top == 0.0) return 0.0;
  const double h = pfun.grid().cell_volume();
  auto modular = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
      if (magnitudes[i] != 0.0) s += std::pow(magnitudes[i] / lambda, pfun.values()[i]);
    }
    return s * h;
  };
  // unit volume: the modular at lambda = max |f| is at most 1
  double hi = top;
  double lo = top;
  while (modular(lo) <= 1.0) lo *= 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (modular(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

double variable_lp_norm(const Field& f, const ExponentFunction& pfun) {
  return variable_lp_norm(f.magnitudes(), pfun);
}

// --- maximal operators ---------------------------------------------------------------

std::vector<double> maximal_values(std::span<const double> magnitudes, const Grid& grid, double r) {
  require_size(magnitudes, grid, "field");
  if (!(r > 0.0)) throw PreconditionError("maximal exponent r must be positive");
  std::vector<double> u(magnitudes.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = r == 1.0 ? magnitudes[i] : std::pow(magnitudes[i], r);

  const BallFamily balls(grid);
  const int n = grid.resolution();
  const int nrows = grid.dim() == 1 ? 1 : n;
  std::vector<double> out(u.size(), 0.0);
  // x lies in B(c, rho) iff c lies in B(x, rho): M is the window max of the ball means
  for (int l = 0; l < balls.levels(); ++l) {
    auto means = balls.ball_sums(u, l);
    const double size = static_cast<double>(balls.ball_size(l));
    for (auto& v : means) v /= size;
    if (l == 0) {
      for (auto& o : out) o = std::max(o, means[0]);
      continue;
    }
    std::vector<RangeMax> tables;
    tables.reserve(static_cast<std::size_t>(nrows));
    for (int y = 0; y < nrows; ++y) {
      std::vector<double> row(2 * static_cast<std::size_t>(n));
      for (int i = 0; i < 2 * n; ++i) row[static_cast<std::size_t>(i)] = means[static_cast<std::size_t>(y) * n + (i % n)];
      tables.emplace_back(std::move(row));
    }
    for (int cy = 0; cy < nrows; ++cy) {
      for (int cx = 0; cx < n; ++cx) {
        double m = 0.0;
        for (const auto& [dy, hw] : balls.stencil(l)) {
          const int y = ((cy + dy) % nrows + nrows) % nrows;
          const std::size_t lo = static_cast<std::size_t>((cx - hw + n) % n);
          m = std::max(m, tables[static_cast<std::size_t>(y)].query(lo, lo + 2 * static_cast<std::size_t>(hw)));
        }
        auto& o = out[static_cast<std::size_t>(cy) * n + cx];
        o = std::max(o, m);
      }
    }
  }
  if (r != 1.0) {
    for (auto& o : out) o = std::pow(o, 1.0 / r);
  }
  return out;
}

Field maximal(const Field& f, double r) {
  return Field::from_real_samples(f.grid(), maximal_values(f.magnitudes(), f.grid(), r));
}

FeffermanSteinReport fefferman_stein_check(std::span<const Field> family, double p, double q,
                                           double r, const Weight& w) {
  if (family.empty()) throw PreconditionError("Fefferman-Stein check needs at least one field");
  const Grid& g = w.grid();
  std::vector<double> lhs(g.size(), 0.0);
  std::vector<double> rhs(g.size(), 0.0);
  for (const Field& f : family) {
    if (!(f.grid() == g)) throw StructuralError("fields and weight live on different grids");
    const auto mags = f.magnitudes();
    const auto mr = maximal_values(mags, g, r);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::isinf(q)) {
        lhs[i] = std::max(lhs[i], mr[i]);
        rhs[i] = std::max(rhs[i], mags[i]);
      } else {
        lhs[i] += std::pow(mr[i], q);
        rhs[i] += std::pow(mags[i], q);
      }
    }
  }
  if (!std::isinf(q)) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      lhs[i] = std::pow(lhs[i], 1.0 / q);
      rhs[i] = std::pow(rhs[i], 1.0 / q);
    }
  }
  FeffermanSteinReport rep;
  rep.lhs = lp_norm(lhs, p, w);
  rep.rhs = lp_norm(rhs, p, w);
  rep.ratio = rep.rhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
  if (w.spec()) {
    rep.tau = tau_w_estimate(*w.spec(), g.dim());
    rep.hypothesis_satisfied = r < std::min(p / rep.tau->upper, q);
  } else {
    rep.hypothesis_satisfied = false;
  }
  return rep;
}

}  // namespace dyadic
