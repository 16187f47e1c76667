#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "dyadic/bilinear.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/harness.hpp"
#include "dyadic/nikolskij.hpp"
#include "dyadic/scattering.hpp"

namespace dyadic::harness {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\n");
  return s.substr(a, b - a + 1);
}

double to_number(const std::string& v, const std::string& what) {
  const std::string k = lower(trim(v));
  if (k == "inf" || k == "infinity" || k == ".inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double x = std::stod(k, &used);
    if (used != k.size()) throw std::invalid_argument(k);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + v + "' is not a number");
  }
}

bool parse_bool(const std::string& v, const std::string& what) {
  const std::string k = lower(trim(v));
  if (k == "true" || k == "yes" || k == "1") return true;
  if (k == "false" || k == "no" || k == "0") return false;
  throw ConfigError(what + ": '" + v + "' is not a boolean");
}

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!node.IsMap()) throw ConfigError(context + " must be a mapping" + where(node));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key '" + key + "' in " + context + where(kv.first) +
                        "; expected one of: " + list);
    }
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("cannot read " + what + where(node));
  }
}

double read_number(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) throw ConfigError(what + " must be a number" + where(node));
  return to_number(node.Scalar(), what);
}

template <class T>
void maybe(const YAML::Node& parent, const char* key, T& out, const std::string& ctx) {
  if (const auto n = parent[key]) {
    if constexpr (std::is_same_v<T, double>) {
      out = read_number(n, ctx + "." + key);
    } else {
      out = read<T>(n, ctx + "." + key);
    }
  }
}

std::vector<double> number_list(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return {read_number(n, what)};
  if (!n.IsSequence()) throw ConfigError(what + " must be a list of numbers" + where(n));
  std::vector<double> out;
  for (const auto& v : n) out.push_back(read_number(v, what));
  return out;
}

std::vector<int> int_list(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return {read<int>(n, what)};
  if (!n.IsSequence()) throw ConfigError(what + " must be a list of integers" + where(n));
  std::vector<int> out;
  for (const auto& v : n) out.push_back(read<int>(v, what));
  return out;
}

std::array<double, 2> pair(const YAML::Node& n, const std::string& what) {
  const auto v = number_list(n, what);
  if (v.size() != 2) throw ConfigError(what + " must be a pair [lo, hi]" + where(n));
  return {v[0], v[1]};
}

WeightSpec weight_node(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return WeightSpec::constant(read_number(n, what));
  check_keys(n, {"power", "scale"}, what);
  WeightSpec w;
  maybe(n, "power", w.exponent, what);
  maybe(n, "scale", w.scale, what);
  if (!(w.scale > 0.0)) throw ConfigError(what + ".scale must be positive");
  return w;
}

SpaceSpec space_node(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return parse_space(n.Scalar());
  check_keys(n,
             {"family", "homogeneous", "p", "q", "s", "t", "weight", "base", "exponent", "method"},
             what);
  SpaceSpec s;
  if (!n["family"]) throw ConfigError(what + " needs a 'family' key" + where(n));
  s.family = family_from_string(read<std::string>(n["family"], what + ".family"));
  maybe(n, "homogeneous", s.homogeneous, what);
  maybe(n, "p", s.p, what);
  maybe(n, "q", s.q, what);
  maybe(n, "s", s.s, what);
  maybe(n, "t", s.t, what);
  if (n["weight"]) s.weight = weight_node(n["weight"], what + ".weight");
  if (n["base"]) s.base = base_from_string(read<std::string>(n["base"], what + ".base"));
  if (const auto e = n["exponent"]) {
    check_keys(e, {"base", "amplitude"}, what + ".exponent");
    ExponentSpec x;
    maybe(e, "base", x.base, what + ".exponent");
    maybe(e, "amplitude", x.amplitude, what + ".exponent");
    s.exponent = x;
  }
  if (const auto m = n["method"]) {
    const auto name = lower(read<std::string>(m, what + ".method"));
    if (name != "square" && name != "maximal") {
      throw ConfigError(what + ".method must be 'square' or 'maximal'");
    }
    s.hardy_method = name == "square" ? HardyMethod::square : HardyMethod::maximal;
  }
  if (s.family == Family::LocalHardy) s.homogeneous = false;
  return s;
}

std::vector<SpaceSpec> space_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) return {space_node(n, what)};
  std::vector<SpaceSpec> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(space_node(n[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void read_limits(const YAML::Node& n, Limits& lim) {
  check_keys(n,
             {"dilation_spread", "resolution_spread", "sweep_spread", "hardy_constant",
              "lifting_band", "quadrature_error", "rate_error", "derivative_budget"},
             "assert");
  auto opt = [&](const char* key, std::optional<double>& out) {
    if (n[key]) out = read_number(n[key], std::string("assert.") + key);
  };
  opt("dilation_spread", lim.dilation_spread);
  opt("resolution_spread", lim.resolution_spread);
  opt("sweep_spread", lim.sweep_spread);
  opt("hardy_constant", lim.hardy_constant);
  opt("lifting_band", lim.lifting_band);
  opt("quadrature_error", lim.quadrature_error);
  opt("rate_error", lim.rate_error);
  if (n["derivative_budget"]) lim.derivative_budget = read<int>(n["derivative_budget"], "assert.derivative_budget");
}

void read_leibniz(const YAML::Node& n, LeibnizSettings& s, bool& weight_given) {
  maybe(n, "symbol", s.symbol, "experiment");
  if (n["target"]) {
    s.target = space_node(n["target"], "target");
    weight_given = n["target"].IsScalar() ? n["target"].Scalar().find("w=") != std::string::npos ||
                                                n["target"].Scalar().find("w =") != std::string::npos
                                          : static_cast<bool>(n["target"]["weight"]);
  }
  maybe(n, "p1", s.p1, "experiment");
  maybe(n, "p2", s.p2, "experiment");
  if (n["t1"]) s.t1 = read_number(n["t1"], "t1");
  if (n["t2"]) s.t2 = read_number(n["t2"], "t2");
  if (n["w1"]) s.w1 = weight_node(n["w1"], "w1");
  if (n["w2"]) s.w2 = weight_node(n["w2"], "w2");
  if (const auto e = n["endpoint"]) {
    const auto name = lower(read<std::string>(e, "endpoint"));
    if (name == "holder") {
      s.endpoint = Endpoint::holder;
    } else if (name == "linf") {
      s.endpoint = Endpoint::linf;
    } else {
      throw ConfigError("endpoint must be 'holder' or 'linf'" + where(e));
    }
  }
  if (const auto d = n["dilation"]) {
    check_keys(d, {"k_min", "k_max"}, "dilation");
    maybe(d, "k_min", s.dilation.k_min, "dilation");
    maybe(d, "k_max", s.dilation.k_max, "dilation");
  }
  if (n["band"]) s.band = pair(n["band"], "band");
}

void read_nikolskij(const YAML::Node& n, NikolskijSettings& s) {
  check_keys(n, {"D", "j_range", "profile", "spaces"}, "nikolskij");
  maybe(n, "D", s.D, "nikolskij");
  if (n["j_range"]) {
    const auto r = int_list(n["j_range"], "nikolskij.j_range");
    if (r.size() != 2) throw ConfigError("nikolskij.j_range must be [j_lo, j_hi]");
    s.j_lo = r[0];
    s.j_hi = r[1];
  }
  maybe(n, "profile", s.profile, "nikolskij");
  if (n["spaces"]) s.spaces = space_list(n["spaces"], "nikolskij.spaces");
}

void read_scattering(const YAML::Node& n, ScatteringSettings& s) {
  check_keys(n,
             {"type", "gammas", "delta", "times", "targets", "band", "p1", "p2", "w1", "w2",
              "quadrature_tolerance"},
             "scattering");
  maybe(n, "type", s.type, "scattering");
  if (n["gammas"]) s.gammas = number_list(n["gammas"], "scattering.gammas");
  if (n["delta"] && !n["delta"].IsNull()) s.delta = read_number(n["delta"], "scattering.delta");
  if (n["times"]) s.times = number_list(n["times"], "scattering.times");
  if (n["targets"]) s.targets = space_list(n["targets"], "scattering.targets");
  if (n["band"]) s.band = pair(n["band"], "scattering.band");
  maybe(n, "p1", s.p1, "scattering");
  maybe(n, "p2", s.p2, "scattering");
  if (n["w1"]) s.w1 = weight_node(n["w1"], "scattering.w1");
  if (n["w2"]) s.w2 = weight_node(n["w2"], "scattering.w2");
  maybe(n, "quadrature_tolerance", s.quadrature_tolerance, "scattering");
}

void read_lemmas(const YAML::Node& n, LemmaSettings& s) {
  check_keys(n, {"peetre", "convolution", "series", "lp_peetre"}, "lemmas");
  if (const auto p = n["peetre"]) {
    check_keys(p, {"scales", "R", "r", "d", "fields"}, "lemmas.peetre");
    if (p["scales"]) s.peetre.scales = int_list(p["scales"], "lemmas.peetre.scales");
    maybe(p, "R", s.peetre.R, "lemmas.peetre");
    maybe(p, "r", s.peetre.r, "lemmas.peetre");
    maybe(p, "d", s.peetre.d, "lemmas.peetre");
    maybe(p, "fields", s.peetre.fields, "lemmas.peetre");
  }
  if (const auto c = n["convolution"]) {
    check_keys(c, {"scales", "R", "b", "d", "p", "weight", "fields"}, "lemmas.convolution");
    if (c["scales"]) s.convolution.scales = int_list(c["scales"], "lemmas.convolution.scales");
    maybe(c, "R", s.convolution.R, "lemmas.convolution");
    maybe(c, "b", s.convolution.b, "lemmas.convolution");
    maybe(c, "d", s.convolution.d, "lemmas.convolution");
    maybe(c, "p", s.convolution.p, "lemmas.convolution");
    if (c["weight"]) s.convolution.weight = weight_node(c["weight"], "lemmas.convolution.weight");
    maybe(c, "fields", s.convolution.fields, "lemmas.convolution");
  }
  if (const auto q = n["series"]) {
    check_keys(q, {"sequences", "length", "taus", "qs", "k0s", "lambda"}, "lemmas.series");
    maybe(q, "sequences", s.series.sequences, "lemmas.series");
    maybe(q, "length", s.series.length, "lemmas.series");
    if (q["taus"]) s.series.taus = number_list(q["taus"], "lemmas.series.taus");
    if (q["qs"]) s.series.qs = number_list(q["qs"], "lemmas.series.qs");
    if (q["k0s"]) s.series.k0s = int_list(q["k0s"], "lemmas.series.k0s");
    maybe(q, "lambda", s.series.lambda, "lemmas.series");
  }
  if (const auto l = n["lp_peetre"]) {
    check_keys(l, {"scales", "shifts", "r", "eps", "fields"}, "lemmas.lp_peetre");
    if (l["scales"]) s.lp_peetre.scales = int_list(l["scales"], "lemmas.lp_peetre.scales");
    if (l["shifts"]) s.lp_peetre.shifts = number_list(l["shifts"], "lemmas.lp_peetre.shifts");
    maybe(l, "r", s.lp_peetre.r, "lemmas.lp_peetre");
    maybe(l, "eps", s.lp_peetre.eps, "lemmas.lp_peetre");
    maybe(l, "fields", s.lp_peetre.fields, "lemmas.lp_peetre");
  }
}

void read_bench(const YAML::Node& n, NormBenchSettings& s) {
  check_keys(n, {"hardy", "lifting", "band"}, "bench");
  if (const auto h = n["hardy"]) {
    check_keys(h, {"p", "weight", "local", "fields"}, "bench.hardy");
    s.hardy.enabled = true;
    maybe(h, "p", s.hardy.p, "bench.hardy");
    if (h["weight"]) s.hardy.weight = weight_node(h["weight"], "bench.hardy.weight");
    maybe(h, "local", s.hardy.local, "bench.hardy");
    maybe(h, "fields", s.hardy.fields, "bench.hardy");
  }
  if (const auto l = n["lifting"]) {
    check_keys(l, {"spaces", "fields"}, "bench.lifting");
    if (l["spaces"]) s.lifting.spaces = space_list(l["spaces"], "bench.lifting.spaces");
    maybe(l, "fields", s.lifting.fields, "bench.lifting");
  }
  if (n["band"]) s.band = pair(n["band"], "bench.band");
}

const std::set<std::string> kCommonKeys{"name", "kind", "dim", "resolutions", "grid", "seed",
                                        "trials", "threads", "assert"};

ExperimentSpec read_experiment(const YAML::Node& n, const YAML::Node& defaults,
                               const Overrides& ov, std::size_t index) {
  const std::string ctx = "experiment " + std::to_string(index);
  if (!n.IsMap()) throw ConfigError(ctx + " must be a mapping" + where(n));
  if (!n["kind"]) throw ConfigError(ctx + " needs a 'kind'" + where(n));
  ExperimentSpec spec;
  spec.kind = kind_from_string(read<std::string>(n["kind"], "kind"));

  std::set<std::string> allowed = kCommonKeys;
  switch (spec.kind) {
    case ExperimentKind::leibniz:
    case ExperimentKind::leibniz_cm:
    case ExperimentKind::hardy_leibniz:
      allowed.insert({"symbol", "target", "p1", "p2", "t1", "t2", "w1", "w2", "endpoint",
                      "dilation", "band"});
      break;
    case ExperimentKind::nikolskij: allowed.insert("nikolskij"); break;
    case ExperimentKind::scattering: allowed.insert("scattering"); break;
    case ExperimentKind::lemma_suite: allowed.insert("lemmas"); break;
    case ExperimentKind::norm_bench: allowed.insert("bench"); break;
  }
  check_keys(n, allowed, ctx);

  auto pick = [&](const char* key) -> YAML::Node {
    if (n[key]) return n[key];
    if (defaults && defaults.IsMap() && defaults[key]) return defaults[key];
    return YAML::Node(YAML::NodeType::Undefined);
  };
  spec.name = n["name"] ? read<std::string>(n["name"], "name")
                        : to_string(spec.kind) + "_" + std::to_string(index);
  if (const auto d = pick("dim")) spec.dim = read<int>(d, "dim");
  if (const auto r = pick("resolutions")) spec.resolutions = int_list(r, "resolutions");
  if (const auto g = pick("grid")) spec.resolutions = {read<int>(g, "grid")};
  if (const auto s = pick("seed")) spec.seed = read<std::uint64_t>(s, "seed");
  if (const auto t = pick("threads")) spec.threads = read<int>(t, "threads");
  maybe(n, "trials", spec.trials, ctx);
  if (n["assert"]) read_limits(n["assert"], spec.limits);

  bool weight_given = false;
  switch (spec.kind) {
    case ExperimentKind::leibniz:
    case ExperimentKind::leibniz_cm:
    case ExperimentKind::hardy_leibniz:
      read_leibniz(n, spec.leibniz, weight_given);
      break;
    case ExperimentKind::nikolskij:
      if (n["nikolskij"]) read_nikolskij(n["nikolskij"], spec.nikolskij);
      break;
    case ExperimentKind::scattering:
      if (n["scattering"]) read_scattering(n["scattering"], spec.scattering);
      break;
    case ExperimentKind::lemma_suite:
      if (n["lemmas"]) read_lemmas(n["lemmas"], spec.lemmas);
      break;
    case ExperimentKind::norm_bench:
      if (n["bench"]) read_bench(n["bench"], spec.bench);
      break;
  }

  if (ov.seed) spec.seed = *ov.seed;
  if (ov.grid) spec.resolutions = {*ov.grid};
  if (ov.dim) spec.dim = *ov.dim;

  // the target weight follows from w1, w2 unless given explicitly
  auto& lb = spec.leibniz;
  const bool leibniz_kind = spec.kind == ExperimentKind::leibniz ||
                            spec.kind == ExperimentKind::leibniz_cm ||
                            spec.kind == ExperimentKind::hardy_leibniz;
  if (leibniz_kind && lb.endpoint == Endpoint::holder && !weight_given) {
    lb.target.weight =
        WeightSpec::compose(lb.w1, lb.target.p / lb.p1, lb.w2, lb.target.p / lb.p2);
  }
  spec.validate();
  return spec;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::leibniz: return "leibniz";
    case ExperimentKind::leibniz_cm: return "leibniz_cm";
    case ExperimentKind::hardy_leibniz: return "hardy_leibniz";
    case ExperimentKind::nikolskij: return "nikolskij";
    case ExperimentKind::scattering: return "scattering";
    case ExperimentKind::lemma_suite: return "lemma_suite";
    case ExperimentKind::norm_bench: return "norm_bench";
  }
  return "?";
}

ExperimentKind kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::leibniz, ExperimentKind::leibniz_cm, ExperimentKind::hardy_leibniz,
                 ExperimentKind::nikolskij, ExperimentKind::scattering, ExperimentKind::lemma_suite,
                 ExperimentKind::norm_bench}) {
    if (to_string(k) == lower(name)) return k;
  }
  throw ConfigError("unknown experiment kind '" + name +
                    "'; expected leibniz, leibniz_cm, hardy_leibniz, nikolskij, scattering, "
                    "lemma_suite or norm_bench");
}

SpaceSpec parse_space(const std::string& text) {
  std::string src = trim(text);
  SpaceSpec s;
  if (lower(src.substr(0, 6)) == "inhom ") {
    s.homogeneous = false;
    src = trim(src.substr(6));
  }
  const auto open = src.find('(');
  if (open == std::string::npos || src.back() != ')') {
    throw ConfigError("space literal '" + text + "' must look like Family(key=value, ...)");
  }
  s.family = family_from_string(trim(src.substr(0, open)));
  if (s.family == Family::LocalHardy) s.homogeneous = false;
  std::stringstream body(src.substr(open + 1, src.size() - open - 2));
  std::string item;
  ExponentSpec exponent;
  bool variable = false;
  while (std::getline(body, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("space literal entry '" + item + "' needs key=value");
    const std::string key = lower(trim(item.substr(0, eq)));
    const std::string val = trim(item.substr(eq + 1));
    const std::string what = "space literal key " + key;
    if (key == "p") {
      s.p = to_number(val, what);
    } else if (key == "q") {
      s.q = to_number(val, what);
    } else if (key == "s") {
      s.s = to_number(val, what);
    } else if (key == "t") {
      s.t = to_number(val, what);
    } else if (key == "w") {
      s.weight.exponent = to_number(val, what);
    } else if (key == "w_scale") {
      s.weight.scale = to_number(val, what);
    } else if (key == "base") {
      s.base = base_from_string(val);
    } else if (key == "amp") {
      exponent.amplitude = to_number(val, what);
      variable = true;
    } else if (key == "method") {
      const auto m = lower(val);
      if (m != "square" && m != "maximal") throw ConfigError("method must be square or maximal");
      s.hardy_method = m == "square" ? HardyMethod::square : HardyMethod::maximal;
    } else if (key == "homogeneous") {
      s.homogeneous = parse_bool(val, what);
    } else {
      throw ConfigError("unknown space literal key '" + key +
                        "'; expected p, q, s, t, w, w_scale, base, amp, method, homogeneous");
    }
  }
  if (variable || s.base == Base::Variable || s.family == Family::VariableLebesgue) {
    exponent.base = s.p;
    s.exponent = exponent;
  }
  return s;
}

void ExperimentSpec::validate() const {
  auto fail = [&](const std::string& why) { throw ConfigError(name + ": " + why); };
  if (dim != 1 && dim != 2) fail("dim must be 1 or 2");
  if (resolutions.empty()) fail("at least one grid resolution is needed");
  for (int n : resolutions) {
    if (!power_of_two(n) || n < 16) fail("grid resolution " + std::to_string(n) + " must be a power of two >= 16");
  }
  if (trials < 0) fail("trials must be nonnegative");
  if (threads < 1) fail("threads must be at least 1");
  auto checked = [&](const SpaceSpec& s, const std::string& role) {
    try {
      s.validate();
    } catch (const PreconditionError& e) {
      fail(role + ": " + e.what());
    }
  };

  switch (kind) {
    case ExperimentKind::leibniz:
    case ExperimentKind::leibniz_cm:
    case ExperimentKind::hardy_leibniz: {
      const auto& lb = leibniz;
      checked(lb.target, "target");
      try {
        (void)make_symbol(lb.symbol);
      } catch (const Error& e) {
        fail(e.what());
      }
      if (kind == ExperimentKind::leibniz && lb.symbol != "one") {
        fail("kind leibniz estimates the product fg; use kind leibniz_cm for symbol '" +
             lb.symbol + "'");
      }
      const bool hardy = kind == ExperimentKind::hardy_leibniz;
      const Family fam = lb.target.family;
      if (hardy && fam != Family::Hardy && fam != Family::LocalHardy) {
        fail("hardy_leibniz needs a Hardy or LocalHardy target (s is the derivative order)");
      }
      if (!hardy && fam != Family::TriebelLizorkin && fam != Family::Besov) {
        fail("leibniz targets must be Triebel-Lizorkin or Besov spaces");
      }
      if (lb.endpoint == Endpoint::holder) {
        if (!(lb.p1 > 0.0) || !(lb.p2 > 0.0)) fail("p1 and p2 must be positive");
        const double lhs = 1.0 / lb.target.p;
        const double rhs = 1.0 / lb.p1 + 1.0 / lb.p2;
        if (std::abs(lhs - rhs) > 1e-12) {
          fail("Hölder-inconsistent exponents: 1/p = " + num(lhs) + " but 1/p1 + 1/p2 = " +
               num(rhs) + "; choose p1, p2 with 1/p1 + 1/p2 = 1/p (for example p1 = p2 = " +
               num(2.0 * lb.target.p) + ") or use endpoint: linf");
        }
        const WeightSpec w =
            WeightSpec::compose(lb.w1, lb.target.p / lb.p1, lb.w2, lb.target.p / lb.p2);
        if (!(std::abs(w.exponent - lb.target.weight.exponent) < 1e-12 &&
              std::abs(w.scale - lb.target.weight.scale) < 1e-12 * w.scale)) {
          fail("target weight " + lb.target.weight.describe() +
               " differs from w1^(p/p1) w2^(p/p2) = " + w.describe() +
               "; drop the target weight or make it consistent");
        }
        if (lb.target.base != Base::Lebesgue) {
          fail("Hölder pairing is only available for Lebesgue bases; use endpoint: linf for " +
               to_string(lb.target.base));
        }
      } else if (!lb.w1.is_constant() || !lb.w2.is_constant()) {
        fail("endpoint linf uses the target weight only; remove w1 and w2");
      }
      if (!(lb.band[0] > 0.0 && lb.band[0] <= lb.band[1])) fail("band must satisfy 0 < lo <= hi");
      if (lb.dilation.k_min > lb.dilation.k_max) fail("dilation needs k_min <= k_max");
      break;
    }
    case ExperimentKind::nikolskij: {
      const auto& nk = nikolskij;
      if (nk.spaces.empty()) fail("nikolskij.spaces is empty");
      for (const auto& s : nk.spaces) {
        checked(s, "nikolskij space");
        if (s.family != Family::TriebelLizorkin && s.family != Family::Besov) {
          fail("nikolskij spaces must be Triebel-Lizorkin or Besov");
        }
      }
      if (!(nk.D > 0.0)) fail("nikolskij.D must be positive");
      if (nk.j_lo > nk.j_hi) fail("nikolskij.j_range needs j_lo <= j_hi");
      if (nk.D * std::exp2(nk.j_lo) < 1.0) fail("nikolskij needs D 2^j_lo >= 1");
      (void)profile_from_string(nk.profile);
      for (int n : resolutions) {
        if (nk.D * std::exp2(nk.j_hi) > n / 2 - 1) {
          fail("D 2^j_hi = " + num(nk.D * std::exp2(nk.j_hi)) + " exceeds N/2 - 1 for N = " +
               std::to_string(n) + "; lower j_range or raise the grid");
        }
      }
      break;
    }
    case ExperimentKind::scattering: {
      const auto& sc = scattering;
      (void)operator_type_from_string(sc.type);
      if (sc.gammas.empty()) fail("scattering.gammas is empty");
      for (double g : sc.gammas) {
        if (!(g > 0.0)) fail("scattering gammas must be positive");
      }
      if (sc.times.size() < 2) fail("scattering.times needs at least two times");
      for (std::size_t i = 0; i < sc.times.size(); ++i) {
        if (!(sc.times[i] > 0.0) || (i > 0 && !(sc.times[i] > sc.times[i - 1]))) {
          fail("scattering.times must be positive and increasing");
        }
      }
      if (sc.delta && !(*sc.delta > 0.0 && *sc.delta < 1.0)) fail("scattering.delta must lie in (0, 1)");
      for (const auto& t : sc.targets) {
        checked(t, "scattering target");
        if (t.family != Family::TriebelLizorkin && t.family != Family::Besov) {
          fail("scattering targets must be Triebel-Lizorkin or Besov");
        }
      }
      if (!(sc.band[0] >= 1.0 && sc.band[0] <= sc.band[1])) fail("scattering.band needs 1 <= lo <= hi");
      if (!(sc.quadrature_tolerance > 0.0)) fail("scattering.quadrature_tolerance must be positive");
      break;
    }
    case ExperimentKind::lemma_suite: {
      const auto& lm = lemmas;
      if (!(lm.peetre.r > 0.0 && lm.peetre.r <= 1.0)) fail("lemmas.peetre.r must lie in (0, 1]");
      if (!(lm.peetre.d > dim / lm.peetre.r)) fail("lemmas.peetre needs d > n / r");
      if (!(lm.peetre.R >= 1.0) || !(lm.convolution.R >= 1.0)) fail("lemma sweeps need R >= 1");
      if (!(lm.convolution.d > lm.convolution.b)) fail("lemmas.convolution needs d > b");
      if (lm.series.sequences < 0 || lm.series.length < 1) fail("lemmas.series needs length >= 1");
      for (double t : lm.series.taus) {
        if (!(t < 0.0)) fail("lemmas.series.taus must be negative");
      }
      for (double q : lm.series.qs) {
        if (!(q > 0.0)) fail("lemmas.series.qs must be positive");
      }
      break;
    }
    case ExperimentKind::norm_bench: {
      for (const auto& s : bench.lifting.spaces) {
        checked(s, "lifting space");
        if (s.family != Family::TriebelLizorkin && s.family != Family::Besov) {
          fail("lifting spaces must be Triebel-Lizorkin or Besov");
        }
      }
      if (bench.hardy.enabled && !(bench.hardy.p > 0.0)) fail("bench.hardy.p must be positive");
      if (!(bench.band[0] >= 1.0)) fail("bench.band lower end must be at least 1");
      break;
    }
  }
}

std::vector<ExperimentSpec> parse_config(const std::string& text, const Overrides& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("config is empty");
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  std::vector<ExperimentSpec> out;
  if (const auto list = root["experiments"]) {
    check_keys(root, {"experiments", "dim", "resolutions", "grid", "seed", "threads"}, "config");
    if (!list.IsSequence()) throw ConfigError("'experiments' must be a list" + where(list));
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(read_experiment(list[i], root, overrides, i));
  } else {
    out.push_back(read_experiment(root, YAML::Node(), overrides, 0));
  }
  std::set<std::string> names;
  for (const auto& e : out) {
    if (!names.insert(e.name).second) throw ConfigError("duplicate experiment name '" + e.name + "'");
  }
  return out;
}

std::vector<ExperimentSpec> load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace dyadic::harness
