#pragma once

#include <string>
#include <variant>

#include <boost/random/uniform_real_distribution.hpp>

namespace tsscale {

enum class Family { weibull, gamma, gev };

const char* to_string(Family family) noexcept;
Family parse_family(const std::string& name);

struct WeibullParams {
  double shape = 1.0;  // k
  double scale = 1.0;  // lambda
};

struct GammaParams {
  double shape = 1.0;  // alpha
  double rate = 1.0;   // beta
};

/// Generalized extreme value, maxima convention: F(x) = exp(-(1 + xi z)^(-1/xi)).
struct GevParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;  // xi
};

using DistParams = std::variant<WeibullParams, GammaParams, GevParams>;

Family family_of(const DistParams& params) noexcept;

/// log density; -inf outside the support.
double log_pdf(const DistParams& params, double x);
double cdf(const DistParams& params, double x);
/// 1 - cdf, computed without cancellation in the upper tail.
double sf(const DistParams& params, double x);
double quantile(const DistParams& params, double p);

/// Draws one variate by inversion from a uniform on (0, 1).
template <class Engine>
double sample(const DistParams& params, Engine& engine) {
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(engine);
  while (u <= 0.0) u = unit(engine);
  return quantile(params, u);
}

}  // namespace tsscale
