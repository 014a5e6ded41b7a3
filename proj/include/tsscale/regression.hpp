#pragma once

#include <span>

namespace tsscale {

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace tsscale
