#include <cmath>
#include <map>

#include "common.hpp"
#include "dyadic/bilinear.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/grid_field.hpp"
#include "dyadic/littlewood_paley.hpp"

namespace dyadic::harness {
namespace {

double sup(const Field& h) {
  const auto m = h.magnitudes();
  return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
}

struct Side {
  double p;
  double t;
  WeightSpec w;
};

// Norms of one trial at one dilation; fields live on the doubled grid.
class Evaluator {
 public:
  Evaluator(const ExperimentSpec& spec, const BilinearSymbol& sigma, const LPFamily& fam)
      : spec_(spec), lb_(spec.leibniz), sigma_(sigma), fam_(fam) {
    const double p = lb_.target.p;
    const double t = lb_.target.t;
    if (lb_.endpoint == Endpoint::holder) {
      s1_ = {lb_.p1, lb_.t1.value_or(t * lb_.p1 / p), lb_.w1};
      s2_ = {lb_.p2, lb_.t2.value_or(t * lb_.p2 / p), lb_.w2};
    } else {
      s1_ = s2_ = {p, t, lb_.target.weight};
    }
  }

  TrialRecord operator()(const Field& f, const Field& g) const {
    const Field F = f.refined(2);
    const Field G = g.refined(2);
    const Field T = apply_direct(sigma_, f, g);
    const bool hom = lb_.target.homogeneous;
    TrialRecord r;
    if (spec_.kind == ExperimentKind::hardy_leibniz) {
      const double s = lb_.target.s;
      const double sm = s + sigma_.order;
      r.lhs = hardy(deriv(T, s), lb_.target.p, lb_.target.weight, lb_.target.hardy_method);
      if (lb_.endpoint == Endpoint::holder) {
        r.rhs1 = hardy(deriv(F, sm), s1_.p, s1_.w) * hardy(G, s2_.p, s2_.w);
        r.rhs2 = hardy(F, s1_.p, s1_.w) * hardy(deriv(G, sm), s2_.p, s2_.w);
      } else {
        r.rhs1 = hardy(deriv(F, sm), s1_.p, s1_.w) * sup(G);
        r.rhs2 = sup(F) * hardy(deriv(G, sm), s2_.p, s2_.w);
      }
    } else {
      // homogeneous spaces see T(f, g) modulo constants
      r.lhs = norm(hom ? T.without_mean() : T, lb_.target, fam_);
      if (lb_.endpoint == Endpoint::holder) {
        r.rhs1 = smooth(F, s1_) * hardy(G, s2_.p, s2_.w);
        r.rhs2 = hardy(F, s1_.p, s1_.w) * smooth(G, s2_);
      } else {
        r.rhs1 = smooth(F, s1_) * sup(G);
        r.rhs2 = sup(F) * smooth(G, s2_);
      }
    }
    const double rhs = r.rhs1 + r.rhs2;
    r.ratio = rhs == 0.0 ? (r.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                         : r.lhs / rhs;
    return r;
  }

 private:
  Field deriv(const Field& h, double s) const {
    return lb_.target.homogeneous ? d_s(h, s) : j_s(h, s);
  }

  double hardy(const Field& h, double p, const WeightSpec& w,
               HardyMethod method = HardyMethod::square) const {
    if (std::isinf(p)) return sup(h);
    return hardy_norm(h, p, w, !lb_.target.homogeneous, method, fam_);
  }

  double smooth(const Field& h, const Side& side) const {
    SpaceSpec s = lb_.target;
    s.p = side.p;
    s.t = side.t;
    s.s = lb_.target.s + sigma_.order;
    s.weight = side.w;
    if (s.exponent) s.exponent = s.exponent->scaled(side.p / lb_.target.p);
    return norm(h, s, fam_);
  }

  const ExperimentSpec& spec_;
  const LeibnizSettings& lb_;
  const BilinearSymbol& sigma_;
  const LPFamily& fam_;
  Side s1_;
  Side s2_;
};

struct TrialOutcome {
  std::vector<TrialRecord> records;
  std::size_t skipped = 0;
};

}  // namespace

RatioReport run_leibniz_ratios(const ExperimentSpec& spec) {
  spec.validate();
  const auto& lb = spec.leibniz;
  const BilinearSymbol sigma = make_symbol(lb.symbol);
  RatioReport rep;
  rep.name = spec.name;
  rep.kind = spec.kind;
  rep.symbol = sigma.name;
  rep.order = sigma.order;
  rep.target = lb.target;
  rep.thresholds = thresholds(lb.target, spec.dim);
  rep.below_threshold = lb.target.s <= rep.thresholds.relevant;
  const auto setting = lb.target.family == Family::Besov ? BudgetSetting::besov : BudgetSetting::tl;
  if (lb.endpoint == Endpoint::holder) {
    rep.derivative_budget = derivative_budget(spec.dim, lb.p1, lb.p2, lb.target.p, lb.target.q,
                                              lb.w1, lb.w2, setting)
                                .value;
  } else {
    rep.derivative_budget = derivative_budget(spec.dim, lb.target.p, lb.target.p, lb.target.p,
                                              lb.target.q, lb.target.weight, lb.target.weight,
                                              setting)
                                .value;
  }

  for (int n : spec.resolutions) {
    const Grid grid(spec.dim, n);
    const LPFamily fam = LPFamily::make({}, grid.refined(2));
    const Evaluator eval(spec, sigma, fam);
    const auto outcomes = detail::parallel_map<TrialOutcome>(
        static_cast<std::size_t>(spec.trials), spec.threads, [&](std::size_t trial) {
          TrialOutcome out;
          const Field f0 = random_band_limited(grid, lb.band[0], lb.band[1],
                                               detail::trial_seed(spec.seed, trial, 0), true);
          const Field g0 = random_band_limited(grid, lb.band[0], lb.band[1],
                                               detail::trial_seed(spec.seed, trial, 1), true);
          for (int k = lb.dilation.k_min; k <= lb.dilation.k_max; ++k) {
            const int shift = k - lb.dilation.k_min;
            if (lb.band[1] * std::exp2(shift) > n / 2 - 1) {
              ++out.skipped;
              continue;
            }
            TrialRecord r = eval(dilate_dyadic(f0, shift), dilate_dyadic(g0, shift));
            r.resolution = n;
            r.trial = static_cast<int>(trial);
            r.k = k;
            out.records.push_back(r);
          }
          return out;
        });
    ResolutionSummary sum;
    sum.resolution = n;
    std::vector<double> ratios;
    std::map<int, double> per_k;
    for (const auto& o : outcomes) {
      sum.skipped += o.skipped;
      for (const auto& r : o.records) {
        ratios.push_back(r.ratio);
        per_k[r.k] = std::max(per_k[r.k], r.ratio);
        rep.records.push_back(r);
      }
    }
    sum.evaluated = ratios.size();
    sum.max_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    sum.median_ratio = detail::median(ratios);
    sum.per_dilation_max.assign(per_k.begin(), per_k.end());
    rep.summaries.push_back(std::move(sum));
  }
  return rep;
}

Report run_leibniz(const ExperimentSpec& spec) {
  const RatioReport rr = run_leibniz_ratios(spec);
  const auto& lb = spec.leibniz;
  Report rep;
  rep.name = spec.name;
  rep.kind = spec.kind;
  nlohmann::json& b = rep.body;
  b["environment"] = {{"dim", spec.dim}, {"resolutions", spec.resolutions}, {"seed", spec.seed},
                      {"trials", spec.trials}};
  b["symbol"] = {{"name", rr.symbol}, {"order", rr.order}};
  b["target"] = space_to_json(rr.target);
  b["pairing"] = {{"endpoint", lb.endpoint == Endpoint::holder ? "holder" : "linf"},
                  {"p1", detail::number(lb.p1)},
                  {"p2", detail::number(lb.p2)},
                  {"w1", detail::weight_json(lb.w1)},
                  {"w2", detail::weight_json(lb.w2)}};
  b["dilation"] = {{"k_min", lb.dilation.k_min}, {"k_max", lb.dilation.k_max}};
  b["band"] = {lb.band[0], lb.band[1]};
  b["thresholds"] = detail::thresholds_json(rr.thresholds);
  b["smoothness"] = rr.target.s;
  b["below_threshold"] = rr.below_threshold;
  b["derivative_budget"] = rr.derivative_budget;

  Table trials{"trials", {"resolution", "trial", "k", "lhs", "rhs1", "rhs2", "ratio"}, {}};
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : rr.records) {
    records.push_back({{"resolution", r.resolution}, {"trial", r.trial}, {"k", r.k},
                       {"lhs", detail::number(r.lhs)}, {"rhs1", detail::number(r.rhs1)},
                       {"rhs2", detail::number(r.rhs2)}, {"ratio", detail::number(r.ratio)}});
    trials.rows.push_back({std::to_string(r.resolution), std::to_string(r.trial),
                           std::to_string(r.k), detail::fmt(r.lhs), detail::fmt(r.rhs1),
                           detail::fmt(r.rhs2), detail::fmt(r.ratio)});
  }
  b["records"] = std::move(records);

  Table summary{"summary", {"resolution", "evaluated", "skipped", "max_ratio", "median_ratio"}, {}};
  Table dil{"dilations", {"resolution", "k", "max_ratio"}, {}};
  nlohmann::json sums = nlohmann::json::array();
  std::vector<double> max_by_n;
  bool finite = true;
  double worst_dilation_spread = 1.0;
  for (const auto& s : rr.summaries) {
    nlohmann::json pk = nlohmann::json::array();
    std::vector<double> dm;
    for (const auto& [k, v] : s.per_dilation_max) {
      pk.push_back({{"k", k}, {"max_ratio", detail::number(v)}});
      dil.rows.push_back({std::to_string(s.resolution), std::to_string(k), detail::fmt(v)});
      dm.push_back(v);
    }
    sums.push_back({{"resolution", s.resolution}, {"evaluated", s.evaluated},
                    {"skipped", s.skipped}, {"max_ratio", detail::number(s.max_ratio)},
                    {"median_ratio", detail::number(s.median_ratio)}, {"per_dilation_max", pk}});
    summary.rows.push_back({std::to_string(s.resolution), std::to_string(s.evaluated),
                            std::to_string(s.skipped), detail::fmt(s.max_ratio),
                            detail::fmt(s.median_ratio)});
    max_by_n.push_back(s.max_ratio);
    finite = finite && std::isfinite(s.max_ratio) && s.evaluated > 0;
    worst_dilation_spread = std::max(worst_dilation_spread, detail::spread(dm));
  }
  b["summaries"] = std::move(sums);

  rep.assertions.push_back({"ratio_finite", finite || spec.trials == 0,
                            finite ? "max ratio finite at every resolution"
                                   : "a resolution has no finite ratios"});
  if (spec.limits.dilation_spread) {
    rep.assertions.push_back(detail::check_max("dilation_spread", worst_dilation_spread,
                                               spec.limits.dilation_spread,
                                               "max / min of per-dilation maxima"));
  }
  if (spec.limits.resolution_spread && max_by_n.size() > 1) {
    rep.assertions.push_back(detail::check_max("resolution_spread", detail::spread(max_by_n),
                                               spec.limits.resolution_spread,
                                               "max / min of max ratio across grids"));
  }
  if (spec.kind == ExperimentKind::leibniz_cm) {
    const BilinearSymbol sigma = make_symbol(lb.symbol);
    const int k = std::min(rr.derivative_budget, sigma.derivative_budget);
    const auto samples = default_cm_samples(spec.dim);
    const auto entries = cm_order_check(sigma, sigma.order, k, samples, spec.dim);
    double worst = 0.0;
    std::size_t flagged = 0;
    for (const auto& e : entries) {
      worst = std::max(worst, e.constant);
      flagged += e.flagged;
    }
    b["cm_check"] = {{"orders_checked", k}, {"max_constant", detail::number(worst)},
                     {"flagged", flagged}};
    rep.assertions.push_back({"symbol_budget", sigma.derivative_budget >= rr.derivative_budget,
                              "symbol supports " + std::to_string(sigma.derivative_budget) +
                                  " derivatives, estimate needs " +
                                  std::to_string(rr.derivative_budget)});
    rep.assertions.push_back(detail::check_max("cm_constants", worst, std::nullopt,
                                               "largest Coifman-Meyer constant"));
  }
  rep.tables = {summary, dil, trials};
  return rep;
}

}  // namespace dyadic::harness
