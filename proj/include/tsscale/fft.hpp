#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tsscale {

/// Real-to-complex FFT of a fixed length, backed by FFTW with estimate-mode
/// plans (no timing measurements, so results are reproducible run to run).
/// The inverse is unnormalized: inverse(forward(x)) == n * x.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

/// One-sided periodogram |X_k|^2 for k = 0..n/2, no window, no normalization.
std::vector<double> periodogram(std::span<const double> x);

}  // namespace tsscale
