// Copyright 2026 the choquard developers
// SPDX-License-Identifier: Apache-2.0
#include "chq/fft3.hpp"

#include <fftw3.h>

#include <mutex>

#include "chq/errors.hpp"

namespace chq {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft3Real::Fft3Real(int n) : n_(n) {
  real_ = fftw_alloc_real(real_size());
  cplx_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(complex_size()));
  require(real_ && cplx_, ErrorCode::invalid_argument, "fft: allocation failed");
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_3d(n_, n_, n_, real_,
                                   reinterpret_cast<fftw_complex*>(cplx_), FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_c2r_3d(n_, n_, n_, reinterpret_cast<fftw_complex*>(cplx_),
                                   real_, FFTW_ESTIMATE);
}

Fft3Real::~Fft3Real() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(real_);
  fftw_free(cplx_);
}

void Fft3Real::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }

void Fft3Real::backward() {
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  const double scale = 1.0 / double(real_size());
  for (std::size_t i = 0; i < real_size(); ++i) real_[i] *= scale;
}

}  // namespace chq
