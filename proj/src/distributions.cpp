#include "tsscale/distributions.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "tsscale/error.hpp"

namespace tsscale {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGumbelShape = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::weibull: return "Weibull";
    case Family::gamma: return "Gamma";
    case Family::gev: return "GEV";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "weibull" || name == "Weibull") return Family::weibull;
  if (name == "gamma" || name == "Gamma") return Family::gamma;
  if (name == "gev" || name == "GEV") return Family::gev;
  fail(ErrorKind::config, "unknown distribution family '" + name + "'");
}

Family family_of(const DistParams& params) noexcept {
  return std::visit(overloaded{[](const WeibullParams&) { return Family::weibull; },
                               [](const GammaParams&) { return Family::gamma; },
                               [](const GevParams&) { return Family::gev; }},
                    params);
}

double log_pdf(const DistParams& params, double x) {
  return std::visit(
      overloaded{
          [x](const WeibullParams& p) {
            if (x <= 0.0) return kNegInf;
            const double z = x / p.scale;
            return std::log(p.shape / p.scale) + (p.shape - 1.0) * std::log(z) - std::pow(z, p.shape);
          },
          [x](const GammaParams& p) {
            if (x <= 0.0) return kNegInf;
            return p.shape * std::log(p.rate) - std::lgamma(p.shape) + (p.shape - 1.0) * std::log(x) - p.rate * x;
          },
          [x](const GevParams& p) {
            const double z = (x - p.location) / p.scale;
            if (std::abs(p.shape) < kGumbelShape) return -std::log(p.scale) - z - std::exp(-z);
            const double t = 1.0 + p.shape * z;
            if (t <= 0.0) return kNegInf;
            const double lt = std::log(t);
            return -std::log(p.scale) - (1.0 + 1.0 / p.shape) * lt - std::exp(-lt / p.shape);
          }},
      params);
}

double cdf(const DistParams& params, double x) {
  return std::visit(overloaded{[x](const WeibullParams& p) {
                                 if (x <= 0.0) return 0.0;
                                 return -std::expm1(-std::pow(x / p.scale, p.shape));
                               },
                               [x](const GammaParams& p) {
                                 if (x <= 0.0) return 0.0;
                                 return boost::math::gamma_p(p.shape, p.rate * x);
                               },
                               [x](const GevParams& p) {
                                 const double z = (x - p.location) / p.scale;
                                 if (std::abs(p.shape) < kGumbelShape) return std::exp(-std::exp(-z));
                                 const double t = 1.0 + p.shape * z;
                                 if (t <= 0.0) return p.shape > 0.0 ? 0.0 : 1.0;
                                 return std::exp(-std::exp(-std::log(t) / p.shape));
                               }},
                    params);
}

double sf(const DistParams& params, double x) {
  return std::visit(overloaded{[x](const WeibullParams& p) {
                                 if (x <= 0.0) return 1.0;
                                 return std::exp(-std::pow(x / p.scale, p.shape));
                               },
                               [x](const GammaParams& p) {
                                 if (x <= 0.0) return 1.0;
                                 return boost::math::gamma_q(p.shape, p.rate * x);
                               },
                               [x](const GevParams& p) {
                                 const double z = (x - p.location) / p.scale;
                                 if (std::abs(p.shape) < kGumbelShape) return -std::expm1(-std::exp(-z));
                                 const double t = 1.0 + p.shape * z;
                                 if (t <= 0.0) return p.shape > 0.0 ? 1.0 : 0.0;
                                 return -std::expm1(-std::exp(-std::log(t) / p.shape));
                               }},
                    params);
}

double quantile(const DistParams& params, double u) {
  return std::visit(overloaded{[u](const WeibullParams& p) {
                                 return p.scale * std::pow(-std::log1p(-u), 1.0 / p.shape);
                               },
                               [u](const GammaParams& p) { return boost::math::gamma_p_inv(p.shape, u) / p.rate; },
                               [u](const GevParams& p) {
                                 const double e = -std::log(u);
                                 if (std::abs(p.shape) < kGumbelShape) return p.location - p.scale * std::log(e);
                                 return p.location + p.scale * std::expm1(-p.shape * std::log(e)) / p.shape;
                               }},
                    params);
}

}  // namespace tsscale
