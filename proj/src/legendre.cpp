#include "wiretap/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wiretap {

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::zero:
      return "zero";
    case Regime::parametric:
      return "parametric";
    case Regime::saturation:
      return "saturation";
    case Regime::degenerate:
      return "degenerate";
  }
  return "unknown";
}

double golden_section_argmax(const std::function<double(double)>& objective, double lo, double hi,
                             double tolerance) {
  if (!(lo <= hi)) throw std::invalid_argument("golden_section_argmax: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

LegendrePoint legendre_maximum(const ConvexTilt& tilt, double rate) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("rate must be finite and nonnegative");
  }
  if (rate <= tilt.slope_at_zero + kRegimeTolerance) return {0.0, 0.0, Regime::zero};
  if (rate >= tilt.slope_at_one - kRegimeTolerance) {
    return {rate - tilt.value_at_one, 1.0, Regime::saturation};
  }
  auto objective = [&](double lambda) { return lambda * rate - tilt.value(lambda); };
  const double lambda = golden_section_argmax(objective, 0.0, 1.0, kLambdaTolerance);
  // The objective is 0 at lambda = 0, so never report less than that.
  const double e = std::max(0.0, objective(lambda));
  return {e, lambda, Regime::parametric};
}

}  // namespace wiretap
