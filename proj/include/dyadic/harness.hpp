#pragma once
//
// Config-driven experiment campaigns.  A config file holds one experiment or
// an `experiments:` list; see docs/config.md for the schema.  Every runner
// returns a Report whose JSON body is a pure function of the spec (apart from
// the "generated_at" stamp) and a list of named assertions.
//

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic/spaces.hpp"
#include "dyadic/weights.hpp"

namespace dyadic::harness {

enum class ExperimentKind {
  leibniz,
  leibniz_cm,
  hardy_leibniz,
  nikolskij,
  scattering,
  lemma_suite,
  norm_bench
};

std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& name);

/// Right-hand side pairing of a Leibniz estimate.
enum class Endpoint { holder, linf };

/// Space literal: "[inhom ]Family(key=value, ...)".  Keys: p, q, s, t, w (power
/// exponent of the weight), w_scale, base, amp (variable exponent amplitude),
/// method (square | maximal).  Example: "TL(p=2, q=2, s=1, w=0.5)".
SpaceSpec parse_space(const std::string& text);

struct DilationRange {
  int k_min = 0;
  int k_max = 0;
};

struct LeibnizSettings {
  std::string symbol = "one";
  SpaceSpec target;  // LHS space; its weight is w1^(p/p1) w2^(p/p2)
  double p1 = 4.0;
  double p2 = 4.0;
  std::optional<double> t1;  // Lorentz / Morrey index of the f side (default t p1 / p)
  std::optional<double> t2;
  WeightSpec w1{};
  WeightSpec w2{};
  Endpoint endpoint = Endpoint::holder;
  DilationRange dilation;
  std::array<double, 2> band{1.0, 3.0};
};

struct NikolskijSettings {
  double D = 1.0;
  int j_lo = 0;
  int j_hi = 4;
  std::string profile = "random";
  std::vector<SpaceSpec> spaces;
};

struct ScatteringSettings {
  std::string type = "homogeneous";
  std::vector<double> gammas{2.0};
  std::optional<double> delta;
  std::vector<double> times{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<SpaceSpec> targets;
  std::array<double, 2> band{1.0, 4.0};
  double p1 = 4.0;
  double p2 = 4.0;
  WeightSpec w1{};
  WeightSpec w2{};
  double quadrature_tolerance = 1e-8;
};

struct PeetreSweep {
  std::vector<int> scales;  // A = 2^j
  double R = 2.0;
  double r = 0.5;
  double d = 4.0;
  int fields = 8;
};

struct ConvolutionSweep {
  std::vector<int> scales;
  double R = 2.0;
  double b = 1.5;
  double d = 3.0;
  double p = 2.0;
  WeightSpec weight{};
  int fields = 8;
};

struct SeriesSweep {
  int sequences = 0;
  int length = 12;
  std::vector<double> taus{-1.0, -0.5};
  std::vector<double> qs{0.5, 1.0};
  std::vector<int> k0s{0, 1};
  double lambda = 0.0;
};

struct LpPeetreSweep {
  std::vector<int> scales;
  std::vector<double> shifts{0.0, 1.0, 2.0, 4.0};
  double r = 0.5;
  double eps = 0.5;
  int fields = 4;
};

struct LemmaSettings {
  PeetreSweep peetre;
  ConvolutionSweep convolution;
  SeriesSweep series;
  LpPeetreSweep lp_peetre;
};

struct HardyBench {
  bool enabled = false;
  double p = 1.0;
  WeightSpec weight{};
  bool local = false;
  int fields = 50;
};

struct LiftingBench {
  std::vector<SpaceSpec> spaces;
  int fields = 100;
};

struct NormBenchSettings {
  HardyBench hardy;
  LiftingBench lifting;
  std::array<double, 2> band{1.0, 0.0};  // hi = 0 -> N / 4
};

/// Assertion thresholds; a missing value disables the check.
struct Limits {
  std::optional<double> dilation_spread;    // max / min of per-dilation maxima
  std::optional<double> resolution_spread;  // max / min across grid sizes
  std::optional<double> sweep_spread;       // lemma constants across A = 2^j
  std::optional<double> hardy_constant;     // fitted square/maximal constant
  std::optional<double> lifting_band;       // ratios inside [1/x, x]
  std::optional<double> quadrature_error;   // scattering quadrature vs closed form
  std::optional<double> rate_error;         // relative decay-rate mismatch
  std::optional<int> derivative_budget;     // expected budget of every target
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::leibniz;
  std::string name;
  int dim = 1;
  std::vector<int> resolutions{128};
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 1;
  LeibnizSettings leibniz;
  NikolskijSettings nikolskij;
  ScatteringSettings scattering;
  LemmaSettings lemmas;
  NormBenchSettings bench;
  Limits limits;

  /// Throws ConfigError with an actionable message.
  void validate() const;
};

/// Overrides applied on top of a config file (CLI flags).
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> dim;
};

std::vector<ExperimentSpec> load_config(const std::string& path, const Overrides& overrides = {});
std::vector<ExperimentSpec> parse_config(const std::string& text, const Overrides& overrides = {});

// --- reports -------------------------------------------------------------------------

struct Assertion {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string name;
  ExperimentKind kind = ExperimentKind::leibniz;
  nlohmann::json body;
  std::vector<Assertion> assertions;
  std::vector<Table> tables;

  bool passed() const;
  /// body plus name, kind, assertions and a "generated_at" stamp.
  nlohmann::json to_json(bool with_timestamp = true) const;
};

std::string to_csv(const Table& t);

struct TrialRecord {
  int resolution = 0;
  int trial = 0;
  int k = 0;
  double lhs = 0.0;
  double rhs1 = 0.0;
  double rhs2 = 0.0;
  double ratio = 0.0;
};

struct ResolutionSummary {
  int resolution = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // dilations pushing the band past N/2 - 1
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  std::vector<std::pair<int, double>> per_dilation_max;
};

struct RatioReport {
  std::string name;
  ExperimentKind kind = ExperimentKind::leibniz;
  std::string symbol;
  double order = 0.0;
  SpaceSpec target;
  Thresholds thresholds;
  bool below_threshold = false;
  int derivative_budget = 0;
  std::vector<ResolutionSummary> summaries;
  std::vector<TrialRecord> records;
};

RatioReport run_leibniz_ratios(const ExperimentSpec& spec);
Report run_leibniz(const ExperimentSpec& spec);
Report run_nikolskij(const ExperimentSpec& spec);
Report run_scattering(const ExperimentSpec& spec);
Report run_lemma_suite(const ExperimentSpec& spec);
Report run_norm_bench(const ExperimentSpec& spec);
/// Dispatches on spec.kind.
Report run(const ExperimentSpec& spec);

nlohmann::json space_to_json(const SpaceSpec& s);

}  // namespace dyadic::harness
