#include "dyadic/grid_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "dyadic/errors.hpp"
#include "dyadic/serialize.hpp"
#include "fft.hpp"

namespace dyadic {
namespace {

double parity_sign(const IVec& k, int dim) {
  int s = 0;
  for (int a = 0; a < dim; ++a) s += k[a];
  return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

Grid::Grid(int dim, int resolution) : dim_(dim), n_(resolution) {
  if (dim != 1 && dim != 2) throw StructuralError("grid dimension must be 1 or 2");
  if (resolution < 16 || !std::has_single_bit(static_cast<unsigned>(resolution))) {
    throw StructuralError("grid resolution must be a power of two >= 16, got " +
                          std::to_string(resolution));
  }
  log2n_ = std::countr_zero(static_cast<unsigned>(resolution));
  size_ = dim == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
  cell_volume_ = std::pow(static_cast<double>(n_), -dim_);
}

IVec Grid::frequency(std::size_t linear) const {
  if (dim_ == 1) return {axis_frequency(static_cast<int>(linear)), 0};
  const int i0 = static_cast<int>(linear / n_);
  const int i1 = static_cast<int>(linear % n_);
  return {axis_frequency(i0), axis_frequency(i1)};
}

std::ptrdiff_t Grid::index_of(const IVec& k) const {
  for (int a = 0; a < dim_; ++a) {
    if (k[a] < -n_ / 2 || k[a] >= n_ / 2) return -1;
  }
  if (dim_ == 1) return axis_index(k[0]);
  return static_cast<std::ptrdiff_t>(axis_index(k[0])) * n_ + axis_index(k[1]);
}

RVec Grid::point(std::size_t linear) const {
  const double h = 1.0 / n_;
  if (dim_ == 1) return {static_cast<double>(linear) * h - 0.5, 0.0};
  return {static_cast<double>(linear / n_) * h - 0.5, static_cast<double>(linear % n_) * h - 0.5};
}

double Grid::frequency_norm(std::size_t linear) const {
  const IVec k = frequency(linear);
  return dim_ == 1 ? std::abs(static_cast<double>(k[0])) : std::hypot(k[0], k[1]);
}

Grid Grid::refined(int factor) const { return Grid(dim_, n_ * factor); }

// ---------------------------------------------------------------------------

Field::Field(Grid grid, std::vector<cplx> spectrum, std::vector<cplx> samples)
    : grid_(grid), spectrum_(std::move(spectrum)), samples_(std::move(samples)) {}

Field Field::from_spectrum(const Grid& grid, std::vector<cplx> coefficients) {
  if (coefficients.size() != grid.size()) {
    throw StructuralError("spectrum has " + std::to_string(coefficients.size()) +
                          " coefficients, grid expects " + std::to_string(grid.size()));
  }
  std::vector<cplx> samples(coefficients.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = coefficients[i] * parity_sign(grid.frequency(i), grid.dim());
  }
  detail::fft_backward(grid.dim(), grid.resolution(), samples);
  return Field(grid, std::move(coefficients), std::move(samples));
}

Field Field::from_samples(const Grid& grid, std::vector<cplx> samples) {
  if (samples.size() != grid.size()) {
    throw StructuralError("sample array has " + std::to_string(samples.size()) +
                          " entries, grid expects " + std::to_string(grid.size()));
  }
  std::vector<cplx> spectrum = samples;
  detail::fft_forward(grid.dim(), grid.resolution(), spectrum);
  const double scale = grid.cell_volume();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    spectrum[i] *= scale * parity_sign(grid.frequency(i), grid.dim());
  }
  return Field(grid, std::move(spectrum), std::move(samples));
}

Field Field::from_real_samples(const Grid& grid, std::span<const double> samples) {
  return from_samples(grid, std::vector<cplx>(samples.begin(), samples.end()));
}

Field Field::zero(const Grid& grid) {
  return Field(grid, std::vector<cplx>(grid.size()), std::vector<cplx>(grid.size()));
}

Field Field::constant(const Grid& grid, cplx value) {
  std::vector<cplx> spectrum(grid.size());
  spectrum[0] = value;
  return Field(grid, std::move(spectrum), std::vector<cplx>(grid.size(), value));
}

Field Field::mode(const Grid& grid, const IVec& k, cplx amplitude) {
  const std::ptrdiff_t idx = grid.index_of(k);
  if (idx < 0) throw PreconditionError("frequency not representable on the grid");
  std::vector<cplx> spectrum(grid.size());
  spectrum[static_cast<std::size_t>(idx)] = amplitude;
  return from_spectrum(grid, std::move(spectrum));
}

cplx Field::coefficient(const IVec& k) const {
  const std::ptrdiff_t idx = grid_.index_of(k);
  return idx < 0 ? cplx{} : spectrum_[static_cast<std::size_t>(idx)];
}

std::vector<double> Field::magnitudes() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [](cplx v) { return std::abs(v); });
  return out;
}

double Field::spectral_radius() const {
  double r = 0.0;
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    if (spectrum_[i] != cplx{}) r = std::max(r, grid_.frequency_norm(i));
  }
  return r;
}

Field Field::refined(int factor) const {
  if (factor == 1) return *this;
  const Grid fine = grid_.refined(factor);
  std::vector<cplx> spectrum(fine.size());
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    if (spectrum_[i] == cplx{}) continue;
    spectrum[static_cast<std::size_t>(fine.index_of(grid_.frequency(i)))] = spectrum_[i];
  }
  return from_spectrum(fine, std::move(spectrum));
}

Field Field::without_mean() const {
  std::vector<cplx> spectrum = spectrum_;
  spectrum[0] = 0.0;
  return from_spectrum(grid_, std::move(spectrum));
}

// ---------------------------------------------------------------------------

Spectrum to_spectrum(const Field& f) {
  return Spectrum{f.grid(), std::vector<cplx>(f.spectrum().begin(), f.spectrum().end())};
}

Field to_field(const Spectrum& s) { return Field::from_spectrum(s.grid, s.coefficients); }

namespace {

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw StructuralError("fields live on different grids");
}

}  // namespace

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  std::vector<cplx> s(a.spectrum().begin(), a.spectrum().end());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += b.spectrum()[i];
  return Field::from_spectrum(a.grid(), std::move(s));
}

Field operator-(const Field& a, const Field& b) { return a + (-1.0) * b; }

Field operator*(cplx c, const Field& f) {
  std::vector<cplx> s(f.spectrum().begin(), f.spectrum().end());
  for (auto& v : s) v *= c;
  return Field::from_spectrum(f.grid(), std::move(s));
}

Field pointwise_product(const Field& a, const Field& b) {
  require_same_grid(a, b);
  std::vector<cplx> v(a.samples().begin(), a.samples().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= b.samples()[i];
  return Field::from_samples(a.grid(), std::move(v));
}

Field apply_multiplier(const Field& f, const FrequencyMultiplier& m) {
  const Grid& g = f.grid();
  std::vector<cplx> s(f.spectrum().begin(), f.spectrum().end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 0 && m.zero_frequency_rule == ZeroFrequencyRule::zero) {
      s[0] = 0.0;
      continue;
    }
    const IVec k = g.frequency(i);
    const cplx value = m.evaluator(RVec{static_cast<double>(k[0]), static_cast<double>(k[1])});
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      std::ostringstream os;
      os << "multiplier is not finite at k = (" << k[0];
      if (g.dim() == 2) os << ", " << k[1];
      os << ")";
      throw NumericDomainError(os.str());
    }
    s[i] *= value;
  }
  return Field::from_spectrum(g, std::move(s));
}

FrequencyMultiplier identity_multiplier() {
  return {[](const RVec&) { return cplx{1.0, 0.0}; }, ZeroFrequencyRule::keep};
}

FrequencyMultiplier homogeneous_power(double s) {
  return {[s](const RVec& xi) { return cplx{std::pow(std::hypot(xi[0], xi[1]), s), 0.0}; },
          ZeroFrequencyRule::zero};
}

FrequencyMultiplier inhomogeneous_power(double s) {
  return {[s](const RVec& xi) {
            return cplx{std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.5 * s), 0.0};
          },
          ZeroFrequencyRule::keep};
}

Field d_s(const Field& f, double s) {
  if (s < 0.0 && !f.is_mean_zero()) {
    throw PreconditionError("D^s with s < 0 requires a mean-zero field");
  }
  return apply_multiplier(f, homogeneous_power(s));
}

Field j_s(const Field& f, double s) { return apply_multiplier(f, inhomogeneous_power(s)); }

Field random_band_limited(const Grid& grid, double radius_lo, double radius_hi, std::uint64_t seed,
                          bool mean_zero) {
  const double limit = grid.resolution() / 2 - 1;
  if (radius_lo < 0.0 || radius_lo > radius_hi || radius_hi > limit) {
    throw PreconditionError("band must satisfy 0 <= lo <= hi <= N/2 - 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> spectrum(grid.size());
  double energy = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double r = grid.frequency_norm(i);
    if (r < radius_lo || r > radius_hi) continue;
    if (i == 0 && mean_zero) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    spectrum[i] = cplx{re, im};
    energy += re * re + im * im;
  }
  if (energy == 0.0) throw PreconditionError("annulus contains no admissible grid frequency");
  const double scale = 1.0 / std::sqrt(energy);
  for (auto& v : spectrum) v *= scale;
  return Field::from_spectrum(grid, std::move(spectrum));
}

Field dilate_dyadic(const Field& f, int k) {
  if (k < 0) throw PreconditionError("dilate_dyadic expects k >= 0");
  const Grid& g = f.grid();
  const int factor = 1 << k;
  std::vector<cplx> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (f.spectrum()[i] == cplx{}) continue;
    IVec m = g.frequency(i);
    m[0] *= factor;
    m[1] *= factor;
    const std::ptrdiff_t idx = g.index_of(m);
    if (idx < 0) throw PreconditionError("dilation pushes the spectrum past the grid band");
    s[static_cast<std::size_t>(idx)] = f.spectrum()[i];
  }
  return Field::from_spectrum(g, std::move(s));
}

double l2_norm(const Field& f) {
  double e = 0.0;
  for (cplx v : f.spectrum()) e += std::norm(v);
  return std::sqrt(e);
}

// ---------------------------------------------------------------------------

nlohmann::json field_to_json(const Field& f) {
  const Grid& g = f.grid();
  nlohmann::json spectral = nlohmann::json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx v = f.spectrum()[i];
    if (v == cplx{}) continue;
    const IVec k = g.frequency(i);
    nlohmann::json kv = nlohmann::json::array();
    for (int a = 0; a < g.dim(); ++a) kv.push_back(k[a]);
    spectral.push_back(nlohmann::json::array({kv, v.real(), v.imag()}));
  }
  return {{"n", g.dim()}, {"N", g.resolution()}, {"spectral", spectral}};
}

Field field_from_json(const nlohmann::json& j) {
  try {
    const Grid g(j.at("n").get<int>(), j.at("N").get<int>());
    std::vector<cplx> s(g.size());
    for (const auto& entry : j.at("spectral")) {
      if (!entry.is_array() || entry.size() != 3) throw StructuralError("bad spectral entry");
      const auto& kv = entry[0];
      if (static_cast<int>(kv.size()) != g.dim()) throw StructuralError("frequency arity mismatch");
      IVec k{kv[0].get<int>(), g.dim() == 2 ? kv[1].get<int>() : 0};
      const std::ptrdiff_t idx = g.index_of(k);
      if (idx < 0) throw StructuralError("frequency outside the grid");
      s[static_cast<std::size_t>(idx)] = cplx{entry[1].get<double>(), entry[2].get<double>()};
    }
    return Field::from_spectrum(g, std::move(s));
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed field JSON: ") + e.what());
  }
}

}  // namespace dyadic
