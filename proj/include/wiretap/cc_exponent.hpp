#pragma once

// Constant-composition secrecy exponent
//
//   E_cc(P, W, R) = min_V { D(V||W|P) + [R - g(V||W|P)]^+ },
//   g(V||W|P)     = omega(V||W|P) + H(P o V) + min_{V': P o V' = P o V} D(V'||W|P),
//
// its Gallager-type lower bound built on E0, and the concave dual used for
// the inner marginal-constrained divergence minimum.

#include <cstdint>
#include <memory>
#include <vector>

#include "wiretap/legendre.hpp"
#include "wiretap/prob_core.hpp"

namespace wiretap {

/// E0(P, W, lambda) = ln sum_z (sum_x P(x) W(z|x)^{1/(1-lambda)})^{1-lambda}.
/// At lambda = 1 the continuous extension ln sum_z max_{x in supp P} W(z|x)
/// is returned.
double e0(const Distribution& p, const Channel& w, double lambda);

/// dE0/dlambda; at lambda = 1 this is the left derivative.
double e0_slope(const Distribution& p, const Channel& w, double lambda);

/// max_{0<=lambda<=1} { lambda R - E0(lambda) }; +infinity with
/// Regime::degenerate when I(P, W) = 0.
LegendrePoint es_cc_lower(const Distribution& p, const Channel& w, double rate);

struct DualOptions {
  double gradient_tolerance = 1e-10;
  int max_iterations = 10'000;
  /// Iterates with a larger sup-norm mean the marginal cannot be reached.
  double divergence_bound = 1e4;
};

struct DualSolution {
  /// One entry per output symbol, shifted so that sum_z rho_z Q_Z(z) = 0.
  /// Symbols outside supp(Q_Z) carry -infinity (V' never reaches them).
  std::vector<double> rho;
  double value = 0.0;  // +infinity when Q_Z is unreachable
  /// V'(z|x) proportional to W(z|x) exp(rho_z); rows with P(x) = 0 copy W.
  Channel optimal_vprime;
  bool converged = false;
  int iterations = 0;
};

/// min_{V': P o V' = Q_Z} D(V'||W|P) through its concave dual
/// max_rho { sum_z rho_z Q_Z(z) - sum_x P(x) ln sum_z W(z|x) exp(rho_z) },
/// solved by damped Newton ascent.
DualSolution constrained_div_min(const Distribution& p, const Channel& w, const Distribution& qz,
                                 const DualOptions& options = {});

/// g(V||W|P); -infinity when V charges a cell where W vanishes.
double g_func(const Channel& v, const Channel& w, const Distribution& p);

struct CcSearchOptions {
  int resolution = 64;  // coarse step 1/resolution per row coordinate
  int rounds = 4;
  int shrink = 4;
  std::uint64_t budget = 4'000'000;  // coarse grid points
};

struct CCExponentResult {
  double exponent = 0.0;
  Channel minimizing_v;
  double g_at_optimum = 0.0;
  Regime regime = Regime::zero;
};

/// Grid solver for E_cc at a fixed (P, W). The coarse grid and its (D, g)
/// values are computed once at construction and shared by every rate.
class CcExponentSolver {
 public:
  /// Throws BudgetExceeded when the coarse grid is larger than the budget.
  CcExponentSolver(Distribution p, Channel w, CcSearchOptions options = {});
  ~CcExponentSolver();
  CcExponentSolver(CcExponentSolver&&) noexcept;
  CcExponentSolver& operator=(CcExponentSolver&&) noexcept;

  double mutual_information() const noexcept;

  /// Direct form min_V { D + [R - g]^+ }.
  CCExponentResult solve(double rate) const;

  /// Alternative form R + min_{V: g(V) <= R} { D - g }, meaningful for
  /// R > I(P, W); returns 0 below that.
  double solve_alternative(double rate) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

CCExponentResult es_cc(const Distribution& p, const Channel& w, double rate,
                       const CcSearchOptions& options = {});

/// Options whose coarse grid fits the budget: the resolution is lowered
/// (to no less than 4) until it does, with one extra refinement round per
/// factor 4 given up. Throws BudgetExceeded when even resolution 4 is too
/// large.
CcSearchOptions fit_search_budget(const Distribution& p, const Channel& w,
                                  CcSearchOptions options = {});

}  // namespace wiretap
