#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace music::detail {

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, p] : plans) fftw_destroy_plan(p);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    // Planning needs scratch buffers; FFTW_ESTIMATE leaves them untouched.
    fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_complex* b = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, a, b, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    if (!p) throw std::runtime_error("fftw planning failed");
    plans.emplace(std::make_pair(n, sign), p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void dft(const std::complex<double>* in, std::complex<double>* out, int n, int sign) {
  if (n <= 0) return;
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  fftw_plan p = cache().get(n, sign);
  if (in == out) {
    // Plans are out-of-place, so in-place requests go through a copy.
    std::vector<std::complex<double>> tmp(in, in + n);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()), reinterpret_cast<fftw_complex*>(out));
    return;
  }
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

int good_fft_size(int n) {
  if (n <= 1) return 1;
  int best = 1;
  while (best < n) best *= 2;
  for (int p2 = 1; p2 < best; p2 *= 2)
    for (int p3 = p2; p3 < best; p3 *= 3)
      for (int p5 = p3; p5 < best; p5 *= 5)
        if (p5 >= n && p5 < best) best = p5;
  return best;
}

}  // namespace music::detail
