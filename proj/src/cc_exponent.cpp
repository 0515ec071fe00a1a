#include "wiretap/cc_exponent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

#include "simplex_grid.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/iid_exponent.hpp"
#include "wiretap/log_sum_exp.hpp"

namespace wiretap {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr double kFlatGain = 1e-13;
// Slack allowed when checking that Q_Z is reachable from P through supp W.
constexpr double kReachTolerance = 1e-12;
// Newton steps longer than this (in sup norm) are clipped; it keeps a nearly
// singular Hessian from throwing the iterate across the divergence bound in
// one step when the supremum is merely approached at infinity.
constexpr double kMaxStep = 50.0;
// Slack between g at the optimum and R below which the optimum is taken to
// sit on the g = R kink (parametric) rather than in the interior.
constexpr double kSaturationGap = 1e-3;

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1]");
  }
}

void check_shapes(const Distribution& p, const Channel& w) {
  if (p.size() != w.input_size()) {
    throw std::invalid_argument("input distribution does not match channel input alphabet");
  }
}

// Per output symbol: m_z = max_{x in supp P} W(z|x), and the log-sum
// S_z(s) = ln sum_x P(x) (W(z|x)/m_z)^s together with the weighted mean of
// ln(W/m_z) under the weights P (W/m_z)^s. s = +infinity keeps only the
// maximizing inputs.
struct E0Column {
  double log_max = -kInfinity;
  double log_sum = -kInfinity;
  double mean_log_ratio = 0.0;
};

E0Column e0_column(const Distribution& p, const Channel& w, std::size_t z, double s) {
  E0Column c;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0 && w(x, z) > 0.0) c.log_max = std::max(c.log_max, std::log(w(x, z)));
  }
  if (c.log_max == -kInfinity) return c;
  LogSumExp acc;
  std::vector<std::pair<double, double>> terms;  // (log weight, log ratio)
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0 || w(x, z) <= 0.0) continue;
    const double log_ratio = std::log(w(x, z)) - c.log_max;
    double lw;
    if (std::isinf(s)) {
      lw = log_ratio == 0.0 ? std::log(p[x]) : -kInfinity;
    } else {
      lw = std::log(p[x]) + s * log_ratio;
    }
    acc.add(lw);
    terms.emplace_back(lw, log_ratio);
  }
  c.log_sum = acc.value();
  double mean = 0.0;
  for (const auto& [lw, lr] : terms) {
    if (lw != -kInfinity) mean += std::exp(lw - c.log_sum) * lr;
  }
  c.mean_log_ratio = mean;
  return c;
}

// ------------------------------------------------------------------------
// Dual of the marginal-constrained divergence minimum, on raw arrays so the
// grid search can call it without re-validating channels.

struct DualCore {
  std::vector<double> rho;
  double value = kInfinity;
  bool converged = false;
  int iterations = 0;
};

class DualProblem {
 public:
  DualProblem(std::span<const double> p, std::span<const double> w, std::size_t nz,
              std::span<const double> qz)
      : p_(p), w_(w), nz_(nz), qz_(qz) {}

  DualCore solve(const DualOptions& options) {
    DualCore out;
    out.rho.assign(nz_, -kInfinity);
    for (std::size_t z = 0; z < nz_; ++z) {
      if (qz_[z] > 0.0) active_.push_back(z);
    }
    for (std::size_t x = 0; x < p_.size(); ++x) {
      if (p_[x] > 0.0) rows_.push_back(x);
    }
    if (!feasible_support()) {
      out.converged = true;
      return out;
    }
    const std::size_t k = active_.size();
    rho_.assign(k, 0.0);
    grad_.assign(k, 0.0);
    double phi = evaluate(rho_, true);
    for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
      double gmax = 0.0;
      for (double g : grad_) gmax = std::max(gmax, std::abs(g));
      if (gmax < options.gradient_tolerance) {
        out.converged = true;
        break;
      }
      std::vector<double> d = newton_direction();
      double slope = 0.0;
      double dmax = 0.0;
      for (std::size_t i = 0; i < k; ++i) dmax = std::max(dmax, std::abs(d[i]));
      if (dmax > kMaxStep) {
        for (double& di : d) di *= kMaxStep / dmax;
      }
      for (std::size_t i = 0; i < k; ++i) slope += grad_[i] * d[i];
      double t = 1.0;
      bool accepted = false;
      std::vector<double> trial(k);
      for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
        for (std::size_t i = 0; i < k; ++i) trial[i] = rho_[i] + t * d[i];
        const double phi_trial = evaluate(trial, false);
        if (phi_trial >= phi + kArmijo * t * slope) {
          accepted = true;
          break;
        }
        // Once the predicted gain drops below the rounding of phi, the
        // Armijo test is noise; fall back to gradient-norm decrease.
        if (t * slope < kFlatGain * (1.0 + std::abs(phi)) && gradient_norm(trial) < gmax) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;  // no further progress at double precision
      rho_ = trial;
      recenter();
      phi = evaluate(rho_, true);
      double rmax = 0.0;
      for (double r : rho_) rmax = std::max(rmax, std::abs(r));
      if (rmax > options.divergence_bound) {
        out.converged = true;
        return out;  // value stays +infinity: the marginal is unreachable
      }
    }
    out.value = std::max(0.0, phi);
    for (std::size_t i = 0; i < k; ++i) out.rho[active_[i]] = rho_[i];
    return out;
  }

  /// V'(z|x) proportional to W(z|x) exp(rho_z) on the active outputs.
  std::vector<double> primal(const std::vector<double>& rho) const {
    std::vector<double> v(w_.begin(), w_.end());
    for (std::size_t x : rows_) {
      LogSumExp acc;
      for (std::size_t z : active_) {
        if (w_[x * nz_ + z] > 0.0) acc.add(std::log(w_[x * nz_ + z]) + rho[z]);
      }
      const double lse = acc.value();
      for (std::size_t z = 0; z < nz_; ++z) {
        const double wz = w_[x * nz_ + z];
        v[x * nz_ + z] =
            (wz > 0.0 && rho[z] != -kInfinity) ? std::exp(std::log(wz) + rho[z] - lse) : 0.0;
      }
    }
    return v;
  }

 private:
  bool feasible_support() const {
    if (active_.empty()) return false;
    for (std::size_t x : rows_) {
      bool any = false;
      for (std::size_t z : active_) any = any || w_[x * nz_ + z] > 0.0;
      if (!any) return false;
    }
    // Gale's condition: every set S of outputs can draw at most the P-mass
    // of the inputs connected to it.
    const std::size_t k = active_.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      double demand = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask >> i & 1) demand += qz_[active_[i]];
      }
      double supply = 0.0;
      for (std::size_t x : rows_) {
        for (std::size_t i = 0; i < k; ++i) {
          if ((mask >> i & 1) && w_[x * nz_ + active_[i]] > 0.0) {
            supply += p_[x];
            break;
          }
        }
      }
      if (demand > supply + kReachTolerance) return false;
    }
    return true;
  }

  double gradient_norm(const std::vector<double>& rho) const {
    const std::size_t k = active_.size();
    std::vector<double> g(k);
    for (std::size_t i = 0; i < k; ++i) g[i] = qz_[active_[i]];
    std::vector<double> v(k);
    for (std::size_t x : rows_) {
      row_posterior(x, rho, v);
      for (std::size_t i = 0; i < k; ++i) g[i] -= p_[x] * v[i];
    }
    double m = 0.0;
    for (double gi : g) m = std::max(m, std::abs(gi));
    return m;
  }

  // v_i proportional to W(a_i|x) exp(rho_i) over the active outputs; returns
  // ln of the normalizer.
  double row_posterior(std::size_t x, const std::vector<double>& rho,
                       std::vector<double>& v) const {
    const std::size_t k = active_.size();
    double peak = -kInfinity;
    for (std::size_t i = 0; i < k; ++i) {
      const double wz = w_[x * nz_ + active_[i]];
      if (wz > 0.0) peak = std::max(peak, std::log(wz) + rho[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double wz = w_[x * nz_ + active_[i]];
      v[i] = wz > 0.0 ? std::exp(std::log(wz) + rho[i] - peak) : 0.0;
      sum += v[i];
    }
    for (std::size_t i = 0; i < k; ++i) v[i] /= sum;
    return peak + std::log(sum);
  }

  // Dual objective at `rho`; with `store`, also caches the gradient and the
  // negated Hessian at that point.
  double evaluate(const std::vector<double>& rho, bool store) {
    const std::size_t k = active_.size();
    double phi = 0.0;
    for (std::size_t i = 0; i < k; ++i) phi += rho[i] * qz_[active_[i]];
    if (store) {
      for (std::size_t i = 0; i < k; ++i) grad_[i] = qz_[active_[i]];
      hess_.assign(k * k, 0.0);
    }
    std::vector<double> v(k);
    for (std::size_t x : rows_) {
      phi -= p_[x] * row_posterior(x, rho, v);
      if (!store) continue;
      for (std::size_t i = 0; i < k; ++i) {
        grad_[i] -= p_[x] * v[i];
        for (std::size_t j = 0; j < k; ++j) {
          hess_[i * k + j] += p_[x] * ((i == j ? v[i] : 0.0) - v[i] * v[j]);
        }
      }
    }
    return phi;
  }

  // Solves H d = grad on all coordinates but the last (whose step is pinned
  // to 0; the objective is shift invariant). A ridge is added until the
  // Cholesky factorization succeeds.
  std::vector<double> newton_direction() const {
    const std::size_t k = active_.size();
    std::vector<double> d(k, 0.0);
    const std::size_t m = k - 1;
    if (m == 0) return d;
    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += hess_[i * k + i];
    double ridge = 0.0;
    for (int attempt = 0; attempt < 30; ++attempt) {
      std::vector<double> l(m * m, 0.0);
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          double s = hess_[i * k + j] + (i == j ? ridge : 0.0);
          for (std::size_t r = 0; r < j; ++r) s -= l[i * m + r] * l[j * m + r];
          if (i == j) {
            if (!(s > 0.0)) {
              ok = false;
              break;
            }
            l[i * m + i] = std::sqrt(s);
          } else {
            l[i * m + j] = s / l[j * m + j];
          }
        }
      }
      if (ok) {
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) {
          double s = grad_[i];
          for (std::size_t r = 0; r < i; ++r) s -= l[i * m + r] * y[r];
          y[i] = s / l[i * m + i];
        }
        for (std::size_t i = m; i-- > 0;) {
          double s = y[i];
          for (std::size_t r = i + 1; r < m; ++r) s -= l[r * m + i] * d[r];
          d[i] = s / l[i * m + i];
        }
        return d;
      }
      ridge = ridge == 0.0 ? 1e-14 * (1.0 + trace) : ridge * 100.0;
    }
    for (std::size_t i = 0; i < m; ++i) d[i] = grad_[i];
    return d;
  }

  void recenter() {
    double mean = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      mean += rho_[i] * qz_[active_[i]];
      mass += qz_[active_[i]];
    }
    mean /= mass;
    for (double& r : rho_) r -= mean;
  }

  std::span<const double> p_;
  std::span<const double> w_;
  std::size_t nz_;
  std::span<const double> qz_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> rows_;
  std::vector<double> rho_;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

// ------------------------------------------------------------------------
// Objective pieces on a flat conditional V (row-major, same shape as W).

double divergence_flat(std::span<const double> p, std::span<const double> v,
                       std::span<const double> w, std::size_t nz) {
  double d = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    double row = 0.0;
    for (std::size_t z = 0; z < nz; ++z) {
      const double a = v[x * nz + z];
      if (a <= 0.0) continue;
      const double b = w[x * nz + z];
      if (b <= 0.0) return kInfinity;
      row += a * std::log(a / b);
    }
    d += p[x] * row;
  }
  return std::max(0.0, d);
}

double g_flat(std::span<const double> p, std::span<const double> v, std::span<const double> w,
              std::size_t nz) {
  double om = 0.0;
  std::vector<double> qz(nz, 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    for (std::size_t z = 0; z < nz; ++z) {
      const double a = p[x] * v[x * nz + z];
      if (a <= 0.0) continue;
      const double b = w[x * nz + z];
      if (b <= 0.0) return -kInfinity;
      om += a * std::log(b);
      qz[z] += a;
    }
  }
  double h = 0.0;
  for (double q : qz) {
    if (q > 0.0) h -= q * std::log(q);
  }
  DualProblem dual(p, w, nz, qz);
  return om + h + dual.solve({}).value;
}

}  // namespace

// --------------------------------------------------------------------------

double e0(const Distribution& p, const Channel& w, double lambda) {
  check_lambda(lambda);
  check_shapes(p, w);
  const double s = lambda == 1.0 ? kInfinity : 1.0 / (1.0 - lambda);
  LogSumExp acc;
  for (std::size_t z = 0; z < w.output_size(); ++z) {
    const E0Column c = e0_column(p, w, z, s);
    if (c.log_max == -kInfinity) continue;
    // (1 - lambda) ln A_z with A_z = m_z^s exp(S_z).
    acc.add(c.log_max + (1.0 - lambda) * c.log_sum);
  }
  return acc.value();
}

double e0_slope(const Distribution& p, const Channel& w, double lambda) {
  check_lambda(lambda);
  check_shapes(p, w);
  const double s = lambda == 1.0 ? kInfinity : 1.0 / (1.0 - lambda);
  // d/dlambda of (1 - lambda) ln A_z is -S_z + s * E[ln(W/m_z)]; at s = inf
  // the second term vanishes because only ratio-one inputs keep weight.
  std::vector<double> log_b;
  std::vector<double> db;
  for (std::size_t z = 0; z < w.output_size(); ++z) {
    const E0Column c = e0_column(p, w, z, s);
    if (c.log_max == -kInfinity) continue;
    log_b.push_back(c.log_max + (1.0 - lambda) * c.log_sum);
    db.push_back(-c.log_sum + (std::isinf(s) ? 0.0 : s * c.mean_log_ratio));
  }
  const double peak = *std::max_element(log_b.begin(), log_b.end());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < log_b.size(); ++i) {
    const double b = std::exp(log_b[i] - peak);
    num += b * db[i];
    den += b;
  }
  return num / den;
}

LegendrePoint es_cc_lower(const Distribution& p, const Channel& w, double rate) {
  check_shapes(p, w);
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("es_cc_lower: rate must be finite and nonnegative");
  }
  if (is_zero_capacity(p, w)) return {kInfinity, 0.0, Regime::degenerate};
  ConvexTilt tilt;
  tilt.value = [&](double lambda) { return e0(p, w, lambda); };
  tilt.slope_at_zero = mutual_information(p, w);
  tilt.slope_at_one = e0_slope(p, w, 1.0);
  tilt.value_at_one = e0(p, w, 1.0);
  return legendre_maximum(tilt, rate);
}

DualSolution constrained_div_min(const Distribution& p, const Channel& w, const Distribution& qz,
                                 const DualOptions& options) {
  check_shapes(p, w);
  if (qz.size() != w.output_size()) {
    throw std::invalid_argument("constrained_div_min: Q_Z does not match channel output alphabet");
  }
  DualProblem problem(p.masses(), w.data(), w.output_size(), qz.masses());
  DualCore core = problem.solve(options);
  DualSolution out;
  out.value = core.value;
  out.converged = core.converged;
  out.iterations = core.iterations;
  if (std::isfinite(core.value)) {
    out.optimal_vprime = Channel(p.size(), w.output_size(), problem.primal(core.rho));
  } else {
    out.optimal_vprime = w;
  }
  out.rho = std::move(core.rho);
  return out;
}

double g_func(const Channel& v, const Channel& w, const Distribution& p) {
  check_shapes(p, w);
  if (v.input_size() != w.input_size() || v.output_size() != w.output_size()) {
    throw std::invalid_argument("g_func: channel shapes differ");
  }
  return g_flat(p.masses(), v.data(), w.data(), w.output_size());
}

namespace {

// Free coordinates: V(z|x) on supp W(.|x) for inputs with P(x) > 0. The
// remaining entries stay at W, which keeps D finite everywhere on the grid.
detail::SimplexProduct search_space(const Distribution& p, const Channel& w) {
  detail::SimplexProduct space;
  const std::size_t nz = w.output_size();
  space.base.assign(w.data().begin(), w.data().end());
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    std::vector<std::size_t> block;
    for (std::size_t z = 0; z < nz; ++z) {
      if (w(x, z) > 0.0) {
        block.push_back(x * nz + z);
        space.base[x * nz + z] = 0.0;
      }
    }
    space.blocks.push_back(std::move(block));
  }
  return space;
}

}  // namespace

// --------------------------------------------------------------------------

struct CcExponentSolver::State {
  Distribution p;
  Channel w;
  CcSearchOptions options;
  double information = 0.0;
  bool degenerate = false;
  detail::SimplexProduct space;
  // D and g at every coarse point, in enumeration order.
  std::vector<double> coarse_d;
  std::vector<double> coarse_g;

  detail::GridSearchOptions grid() const {
    detail::GridSearchOptions g;
    g.resolution = options.resolution;
    g.rounds = options.rounds;
    g.shrink = options.shrink;
    g.budget = options.budget;
    return g;
  }

  std::vector<double> coarse_point(std::size_t index) const {
    std::vector<double> out;
    std::size_t i = 0;
    detail::for_each_coarse_point(space, options.resolution, options.budget,
                                  [&](const std::vector<double>& pt) {
                                    if (i++ == index) out = pt;
                                  });
    return out;
  }

  double divergence(const std::vector<double>& v) const {
    return divergence_flat(p.masses(), v, w.data(), w.output_size());
  }
  double g(const std::vector<double>& v) const {
    return g_flat(p.masses(), v, w.data(), w.output_size());
  }
};

CcExponentSolver::CcExponentSolver(Distribution p, Channel w, CcSearchOptions options)
    : state_(std::make_unique<State>()) {
  check_shapes(p, w);
  State& s = *state_;
  s.p = std::move(p);
  s.w = std::move(w);
  s.options = options;
  s.information = wiretap::mutual_information(s.p, s.w);
  s.degenerate = is_zero_capacity(s.p, s.w);
  if (s.degenerate) return;

  s.space = search_space(s.p, s.w);
  detail::for_each_coarse_point(s.space, options.resolution, options.budget,
                                [&](const std::vector<double>& v) {
                                  s.coarse_d.push_back(s.divergence(v));
                                  s.coarse_g.push_back(s.g(v));
                                });
}

CcSearchOptions fit_search_budget(const Distribution& p, const Channel& w,
                                  CcSearchOptions options) {
  check_shapes(p, w);
  const detail::SimplexProduct space = search_space(p, w);
  const int wanted = options.resolution;
  while (detail::coarse_point_count(space, options.resolution) > options.budget) {
    if (options.resolution <= 4) {
      throw BudgetExceeded("cc search: even a 1/4 grid exceeds the budget of " +
                           std::to_string(options.budget) + " points");
    }
    options.resolution = std::max(4, options.resolution / 2);
  }
  for (int r = options.resolution; r < wanted; r *= 4) ++options.rounds;
  return options;
}

CcExponentSolver::~CcExponentSolver() = default;
CcExponentSolver::CcExponentSolver(CcExponentSolver&&) noexcept = default;
CcExponentSolver& CcExponentSolver::operator=(CcExponentSolver&&) noexcept = default;

double CcExponentSolver::mutual_information() const noexcept { return state_->information; }

CCExponentResult CcExponentSolver::solve(double rate) const {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("es_cc: rate must be finite and nonnegative");
  }
  const State& s = *state_;
  if (s.degenerate) return {kInfinity, s.w, s.information, Regime::degenerate};
  if (rate <= s.information + kRegimeTolerance) {
    return {0.0, s.w, s.information, Regime::zero};
  }

  std::size_t best_index = 0;
  double best_value = kInfinity;
  for (std::size_t i = 0; i < s.coarse_d.size(); ++i) {
    const double v = s.coarse_d[i] + std::max(0.0, rate - s.coarse_g[i]);
    if (v < best_value) {
      best_value = v;
      best_index = i;
    }
  }
  detail::GridSearchResult start{s.coarse_point(best_index), best_value};

  // The objective is bounded below by D, so g is only needed when D alone
  // does not already rule the point out.
  double incumbent = start.value;
  auto objective = [&](const std::vector<double>& v) {
    const double d = s.divergence(v);
    if (d >= incumbent) return d;
    const double value = d + std::max(0.0, rate - s.g(v));
    incumbent = std::min(incumbent, value);
    return value;
  };
  const Channel tilted_v = es_iid(s.p, s.w, rate).solution.tilted.conditional(s.w);
  const std::vector<double> tilted(tilted_v.data().begin(), tilted_v.data().end());
  for (const auto& seed : {std::vector<double>(s.w.data().begin(), s.w.data().end()), tilted}) {
    const double v = objective(seed);
    if (v < start.value) start = {seed, v};
  }
  detail::GridSearchResult best = detail::grid_refine(s.space, objective, start, s.grid());

  CCExponentResult out;
  out.exponent = best.value;
  out.minimizing_v = Channel(s.p.size(), s.w.output_size(), best.point);
  out.g_at_optimum = s.g(best.point);
  out.regime = out.g_at_optimum < rate - kSaturationGap ? Regime::saturation : Regime::parametric;
  return out;
}

double CcExponentSolver::solve_alternative(double rate) const {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("es_cc: rate must be finite and nonnegative");
  }
  const State& s = *state_;
  if (s.degenerate) return kInfinity;
  if (rate <= s.information + kRegimeTolerance) return 0.0;

  auto objective = [&](const std::vector<double>& v) {
    const double g = s.g(v);
    if (g > rate) return kInfinity;
    return s.divergence(v) - g;
  };
  std::size_t best_index = 0;
  double best_value = kInfinity;
  for (std::size_t i = 0; i < s.coarse_d.size(); ++i) {
    if (s.coarse_g[i] > rate) continue;
    const double v = s.coarse_d[i] - s.coarse_g[i];
    if (v < best_value) {
      best_value = v;
      best_index = i;
    }
  }
  detail::GridSearchResult start{s.coarse_point(best_index), best_value};
  const std::vector<double> w_flat(s.w.data().begin(), s.w.data().end());
  const double at_w = objective(w_flat);
  if (at_w < start.value) start = {w_flat, at_w};
  const detail::GridSearchResult best = detail::grid_refine(s.space, objective, start, s.grid());
  return rate + best.value;
}

CCExponentResult es_cc(const Distribution& p, const Channel& w, double rate,
                       const CcSearchOptions& options) {
  return CcExponentSolver(p, w, options).solve(rate);
}

}  // namespace wiretap
