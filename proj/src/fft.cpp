#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace nlsfloer::detail {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Planner calls are not thread safe in FFTW; execution with new-array
// interface is.
std::mutex plan_mutex;

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(static_cast<size_t>(n));
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  return cache.emplace(n, p).first->second;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void dft_forward(std::complex<double>* data, int n) {
  fftw_execute_dft(plans_for(n).fwd, as_fftw(data), as_fftw(data));
}

void dft_backward(std::complex<double>* data, int n) {
  fftw_execute_dft(plans_for(n).bwd, as_fftw(data), as_fftw(data));
}

}  // namespace nlsfloer::detail
