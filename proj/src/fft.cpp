#include "tsscale/fft.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "tsscale/error.hpp"

namespace tsscale {

namespace {
// FFTW planning is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2) fail(ErrorKind::internal, "FFT length must be at least 2");
  std::lock_guard lock(planner_mutex());
  plans_->real = fftw_alloc_real(n);
  plans_->spec = fftw_alloc_complex(n / 2 + 1);
  const int len = static_cast<int>(n);
  plans_->fwd = fftw_plan_dft_r2c_1d(len, plans_->real, plans_->spec, FFTW_ESTIMATE);
  plans_->inv = fftw_plan_dft_c2r_1d(len, plans_->spec, plans_->real, FFTW_ESTIMATE);
  if (!plans_->fwd || !plans_->inv) fail(ErrorKind::internal, "FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  const auto* spec = reinterpret_cast<const std::complex<double>*>(plans_->spec);
  std::copy(spec, spec + bins(), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  auto* spec = reinterpret_cast<std::complex<double>*>(plans_->spec);
  std::copy(in.begin(), in.end(), spec);
  // c2r destroys its input, which is why it lives in the plan's own buffer.
  fftw_execute(plans_->inv);
  std::copy(plans_->real, plans_->real + n_, out.begin());
}

std::vector<double> periodogram(std::span<const double> x) {
  RealFft fft(x.size());
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(x, spec);
  std::vector<double> out(spec.size());
  std::transform(spec.begin(), spec.end(), out.begin(), [](auto c) { return std::norm(c); });
  return out;
}

}  // namespace tsscale
