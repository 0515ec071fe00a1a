#pragma once

// max_{0 <= lambda <= 1} { lambda R - F(lambda) } for a convex F with
// F(0) = 0, evaluated through its three regimes:
//   R <= F'(0)            -> 0
//   F'(0) < R < F'(1)     -> interior maximizer, found by golden section
//   R >= F'(1)            -> R - F(1)

#include <functional>
#include <string_view>

namespace wiretap {

enum class Regime { zero, parametric, saturation, degenerate };

std::string_view to_string(Regime regime) noexcept;

/// Tolerance used when comparing a rate with the regime boundaries; ties go
/// to the closed-form regime.
inline constexpr double kRegimeTolerance = 1e-12;

/// Golden-section interval width at which the lambda search stops.
inline constexpr double kLambdaTolerance = 1e-10;

struct ConvexTilt {
  std::function<double(double)> value;  // F(lambda), lambda in [0, 1]
  double slope_at_zero = 0.0;           // F'(0)
  double slope_at_one = 0.0;            // F'(1), left derivative
  double value_at_one = 0.0;            // F(1)
};

struct LegendrePoint {
  double exponent = 0.0;
  double lambda = 0.0;
  Regime regime = Regime::zero;
};

LegendrePoint legendre_maximum(const ConvexTilt& tilt, double rate);

/// Maximizer of a unimodal function on [lo, hi]; stops once the bracket is
/// narrower than `tolerance`.
double golden_section_argmax(const std::function<double(double)>& objective, double lo, double hi,
                             double tolerance);

}  // namespace wiretap
