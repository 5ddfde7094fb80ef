#include "lpq/fft4.hpp"

#include <mutex>
#include <new>

namespace lpq {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft4::Fft4(int n) : n_(n) {
  size_ = static_cast<std::size_t>(n) * n * n * n;
  std::lock_guard lock(planner_mutex());
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(size_));
  if (!buf_) throw std::bad_alloc();
  auto* raw = reinterpret_cast<fftw_complex*>(buf_);
  const int dims[4] = {n, n, n, n};
  forward_ = fftw_plan_dft(4, dims, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft(4, dims, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
  for (std::size_t i = 0; i < size_; ++i) buf_[i] = 0.0;
}

Fft4::~Fft4() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(forward_);
  if (backward_) fftw_destroy_plan(backward_);
  fftw_free(buf_);
}

void Fft4::to_physical() { fftw_execute(backward_); }
void Fft4::to_spectral() { fftw_execute(forward_); }

}  // namespace lpq
