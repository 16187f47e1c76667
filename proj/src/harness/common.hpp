#pragma once
// Helpers shared by the campaign runners.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dyadic/harness.hpp"
#include "dyadic/seed.hpp"

namespace dyadic::harness::detail {

/// Runs fn(i) for i in [0, count) on up to `threads` workers.  Results land by
/// index, so the outcome does not depend on scheduling.  The first exception
/// (by index) is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < count; i += stride) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Seed of stream `stream` in trial `trial`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
  return splitmix64(splitmix64(seed ^ (0x9E3779B97F4A7C15ull * (trial + 1))) + stream);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// max / min of positive finite entries; infinity when any entry is not.
inline double spread(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || !(x > 0.0)) return std::numeric_limits<double>::infinity();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

inline bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

/// Finite numbers as-is, non-finite ones as strings ("inf", "nan").
inline nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

inline nlohmann::json weight_json(const WeightSpec& w) {
  return {{"scale", w.scale}, {"exponent", w.exponent}};
}

inline nlohmann::json thresholds_json(const Thresholds& t) {
  return {{"tau_w", {t.tau_w.lower, t.tau_w.upper}},
          {"tau_pq", t.tau_pq},
          {"tau_p", t.tau_p},
          {"tau_ptq", t.tau_ptq},
          {"relevant", t.relevant}};
}

inline Assertion check_max(const std::string& name, double value, std::optional<double> limit,
                           const std::string& what) {
  Assertion a{name, true, what + " = " + fmt(value)};
  if (limit) {
    a.passed = std::isfinite(value) && value <= *limit;
    a.detail += " (limit " + fmt(*limit) + ")";
  } else {
    a.passed = std::isfinite(value);
  }
  return a;
}

}  // namespace dyadic::harness::detail
