#pragma once
// Closed-form references written independently of the library.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

inline double h(double u, double steep) { return u <= 0.0 ? 0.0 : std::exp(-steep / u); }

inline double chi(double t, double steep = 0.5) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double a = h(2.0 - t, steep);
  const double b = h(t - 1.0, steep);
  return a / (a + b);
}

inline double psi(double r, double steep = 0.5) { return chi(r, steep) - chi(2.0 * r, steep); }

inline double torus_point(int m, int n) { return double(m) / n - 0.5; }

/// sum_k c_k exp(2 pi i k x) in 1D.
inline std::complex<double> trig_sum(const std::vector<std::pair<int, std::complex<double>>>& terms,
                                     double x) {
  std::complex<double> s = 0.0;
  for (auto [k, c] : terms) s += c * std::polar(1.0, 2.0 * M_PI * k * x);
  return s;
}

}  // namespace oracle
