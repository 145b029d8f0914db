#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace neuroloop::fft {
namespace {

enum class Direction { forward, inverse };

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, Direction dir) {
    std::lock_guard lock(mu_);
    auto key = std::make_pair(n, dir);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    double* real = fftw_alloc_real(n);
    fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dir == Direction::forward ? fftw_plan_dft_r2c_1d(len, real, cplx, flags)
                                               : fftw_plan_dft_c2r_1d(len, cplx, real, flags);
    fftw_free(real);
    fftw_free(cplx);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  if (n == 0) return out;
  std::vector<double> in(x.begin(), x.end());
  fftw_execute_dft_r2c(cache().get(n, Direction::forward), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n) {
  std::vector<double> out(n);
  if (n == 0) return out;
  // c2r destroys its input
  std::vector<std::complex<double>> in(n / 2 + 1);
  for (std::size_t i = 0; i < in.size() && i < spectrum.size(); ++i) in[i] = spectrum[i];
  fftw_execute_dft_c2r(cache().get(n, Direction::inverse),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace neuroloop::fft
