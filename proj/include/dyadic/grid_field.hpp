#pragma once
//
// Periodic-grid fields on the torus [-1/2, 1/2)^n with exact spectral views.
//
// Convention: f(x) = sum_k fhat(k) exp(2 pi i k.x) over integer frequencies
// k in [-N/2, N/2)^n, sampled at x_m = m/N - 1/2.  Homogeneous multipliers
// such as |k|^s act with no 2 pi factor.
//

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dyadic {

using cplx = std::complex<double>;

/// Frequency or lattice vector; only the first `dim` entries are used.
using IVec = std::array<int, 2>;
using RVec = std::array<double, 2>;

class Grid {
 public:
  Grid(int dim, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  int log2_resolution() const { return log2n_; }
  /// Finest Littlewood-Paley scale whose block lives on the grid: log2(N) - 2.
  int j_max() const { return log2n_ - 2; }

  /// Signed frequency of FFT-ordered axis index i.
  int axis_frequency(int i) const { return i < n_ / 2 ? i : i - n_; }
  /// FFT-ordered axis index of a signed frequency in [-N/2, N/2).
  int axis_index(int k) const { return k >= 0 ? k : k + n_; }

  IVec frequency(std::size_t linear) const;
  /// Linear index of k, or -1 if k is not representable.
  std::ptrdiff_t index_of(const IVec& k) const;
  /// Spatial coordinate x_m of the sample at `linear`.
  RVec point(std::size_t linear) const;
  double frequency_norm(std::size_t linear) const;

  /// Same dimension, resolution multiplied by `factor` (a power of two).
  Grid refined(int factor) const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  int n_;
  int log2n_;
  std::size_t size_;
  double cell_volume_;
};

/// Coefficients in FFT order paired with their grid.
struct Spectrum {
  Grid grid;
  std::vector<cplx> coefficients;
};

/// Immutable band-limited function carrying both spatial and spectral views.
class Field {
 public:
  static Field from_spectrum(const Grid& grid, std::vector<cplx> coefficients);
  static Field from_samples(const Grid& grid, std::vector<cplx> samples);
  static Field from_real_samples(const Grid& grid, std::span<const double> samples);
  static Field zero(const Grid& grid);
  static Field constant(const Grid& grid, cplx value);
  /// exp(2 pi i k.x)
  static Field mode(const Grid& grid, const IVec& k, cplx amplitude = 1.0);

  const Grid& grid() const { return grid_; }
  std::span<const cplx> spectrum() const { return spectrum_; }
  std::span<const cplx> samples() const { return samples_; }
  cplx coefficient(const IVec& k) const;

  /// True when fhat(0) is exactly zero.
  bool is_mean_zero() const { return spectrum_[0] == cplx{0.0, 0.0}; }
  std::vector<double> magnitudes() const;
  /// Largest |k| carrying a nonzero coefficient (0 for constants and zero).
  double spectral_radius() const;

  /// Zero-padded copy on the grid refined by `factor`; the function is unchanged.
  Field refined(int factor) const;
  /// f with fhat(0) set to zero.
  Field without_mean() const;

 private:
  Field(Grid grid, std::vector<cplx> spectrum, std::vector<cplx> samples);

  Grid grid_;
  std::vector<cplx> spectrum_;
  std::vector<cplx> samples_;
};

Spectrum to_spectrum(const Field& f);
Field to_field(const Spectrum& s);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx c, const Field& f);
/// Pointwise product on the common grid (aliasing is the caller's concern).
Field pointwise_product(const Field& a, const Field& b);

enum class ZeroFrequencyRule { keep, zero };

struct FrequencyMultiplier {
  std::function<cplx(const RVec& xi)> evaluator;
  ZeroFrequencyRule zero_frequency_rule = ZeroFrequencyRule::keep;
};

/// Mode-wise m(k) fhat(k); throws NumericDomainError on a non-finite m(k).
Field apply_multiplier(const Field& f, const FrequencyMultiplier& m);

FrequencyMultiplier identity_multiplier();
FrequencyMultiplier homogeneous_power(double s);    // |xi|^s, zero at xi = 0
FrequencyMultiplier inhomogeneous_power(double s);  // (1 + |xi|^2)^(s/2)

/// D^s; for s < 0 the input must be mean-zero.
Field d_s(const Field& f, double s);
/// J^s
Field j_s(const Field& f, double s);

/// Complex Gaussian coefficients on radius_lo <= |k| <= radius_hi, unit L2 norm.
Field random_band_limited(const Grid& grid, double radius_lo, double radius_hi,
                          std::uint64_t seed, bool mean_zero);

/// f(2^k x) for k >= 0 realized as spectral index doubling.
Field dilate_dyadic(const Field& f, int k);

double l2_norm(const Field& f);

}  // namespace dyadic
