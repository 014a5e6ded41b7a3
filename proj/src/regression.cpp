#include "tsscale/regression.hpp"

#include <algorithm>
#include <cmath>

#include "tsscale/error.hpp"

namespace tsscale {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorKind::numerical, "line fit needs at least two paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorKind::numerical, "line fit: abscissae are all equal");

  LineFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.stderr_slope = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

}  // namespace tsscale
