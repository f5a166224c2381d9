// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#ifndef CHQ_FFT3_HPP
#define CHQ_FFT3_HPP

#include <complex>
#include <span>
#include <vector>

namespace chq {

/// Real-to-complex 3D FFT workspace for an n^3 cube.
///
/// Owns aligned buffers and FFTW plans (FFTW_ESTIMATE, so planning is
/// deterministic).  Plan creation is serialized internally; execution on
/// distinct workspaces is safe from different threads.
class Fft3Real {
public:
  explicit Fft3Real(int n);
  ~Fft3Real();
  Fft3Real(const Fft3Real&) = delete;
  Fft3Real& operator=(const Fft3Real&) = delete;

  int n() const { return n_; }
  std::size_t real_size() const { return std::size_t(n_) * n_ * n_; }
  std::size_t complex_size() const { return std::size_t(n_) * n_ * (n_ / 2 + 1); }

  std::span<double> real_buf() { return {real_, real_size()}; }
  std::span<std::complex<double>> complex_buf() { return {cplx_, complex_size()}; }

  /// DFT of real_buf into complex_buf (unnormalized).
  void forward();
  /// Inverse DFT of complex_buf into real_buf, already divided by n^3.
  void backward();

  /// Integer frequency for index i (i <= n/2 ? i : i - n).
  int freq(int i) const { return i <= n_ / 2 ? i : i - n_; }

private:
  int n_;
  double* real_;
  std::complex<double>* cplx_;
  void* plan_fwd_;
  void* plan_bwd_;
};

}  // namespace chq

#endif
