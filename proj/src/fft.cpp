#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace dyadic::detail {
namespace {

struct PlanKey {
  std::vector<int> shape;
  int sign;
  bool operator<(const PlanKey& o) const {
    return shape != o.shape ? shape < o.shape : sign < o.sign;
  }
};

// Planning is not thread-safe in FFTW; execution on new arrays is.
fftw_plan plan_for(const std::vector<int>& shape, int sign) {
  static std::mutex mutex;
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard lock(mutex);
  PlanKey key{shape, sign};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::size_t total = 1;
  for (int s : shape) total *= static_cast<std::size_t>(s);
  std::vector<std::complex<double>> scratch(total);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), p, p, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(std::move(key), plan);
  return plan;
}

void run(const std::vector<int>& shape, int sign, std::vector<std::complex<double>>& data) {
  fftw_plan plan = plan_for(shape, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void fft_forward(int dim, int n, std::vector<std::complex<double>>& data) {
  run(std::vector<int>(static_cast<std::size_t>(dim), n), FFTW_FORWARD, data);
}

void fft_backward(int dim, int n, std::vector<std::complex<double>>& data) {
  run(std::vector<int>(static_cast<std::size_t>(dim), n), FFTW_BACKWARD, data);
}

void fft_forward_shape(const std::vector<int>& shape, std::vector<std::complex<double>>& data) {
  run(shape, FFTW_FORWARD, data);
}

}  // namespace dyadic::detail
