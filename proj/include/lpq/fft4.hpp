#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace lpq {

// In-place complex 4D FFT of an n^4 buffer owned by the object. Plans are made
// with FFTW_ESTIMATE so results do not depend on timing-driven plan choice.
class Fft4 {
 public:
  explicit Fft4(int n);
  ~Fft4();
  Fft4(const Fft4&) = delete;
  Fft4& operator=(const Fft4&) = delete;

  std::span<std::complex<double>> data() { return {buf_, size_}; }
  std::span<const std::complex<double>> data() const { return {buf_, size_}; }
  std::size_t size() const { return size_; }
  int n() const { return n_; }

  // Unnormalized sum_H c(H) exp(+i 2 pi H.j / n).
  void to_physical();
  // Unnormalized sum_j f(j) exp(-i 2 pi H.j / n); caller divides by size().
  void to_spectral();

 private:
  int n_;
  std::size_t size_;
  std::complex<double>* buf_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace lpq
