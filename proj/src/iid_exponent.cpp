#include "wiretap/iid_exponent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "simplex_grid.hpp"
#include "wiretap/log_sum_exp.hpp"

namespace wiretap {
namespace {

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

// ln of the unnormalized tilted weights P(x) W^{1+l} Pz^{-l}, -inf off support.
std::vector<double> log_tilt_weights(const Distribution& p, const Channel& w, double lambda) {
  const Distribution pz = output_marginal(p, w);
  std::vector<double> t(p.size() * w.output_size(), -kInfinity);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    for (std::size_t z = 0; z < w.output_size(); ++z) {
      if (w(x, z) <= 0.0) continue;
      t[x * w.output_size() + z] =
          std::log(p[x]) + (1.0 + lambda) * std::log(w(x, z)) - lambda * std::log(pz[z]);
    }
  }
  return t;
}

}  // namespace

double f0(const Distribution& p, const Channel& w, double lambda) {
  check_lambda(lambda);
  check_shapes(p, w);
  LogSumExp acc;
  for (double t : log_tilt_weights(p, w, lambda)) acc.add(t);
  return acc.value();
}

double f0_slope(const Distribution& p, const Channel& w, double lambda) {
  check_lambda(lambda);
  check_shapes(p, w);
  const Distribution pz = output_marginal(p, w);
  const std::vector<double> t = log_tilt_weights(p, w, lambda);
  const double peak = *std::max_element(t.begin(), t.end());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (std::size_t z = 0; z < w.output_size(); ++z) {
      const double lt = t[x * w.output_size() + z];
      if (lt == -kInfinity) continue;
      const double weight = std::exp(lt - peak);
      num += weight * std::log(w(x, z) / pz[z]);
      den += weight;
    }
  }
  return num / den;
}

JointDistribution tilted_joint(const Distribution& p, const Channel& w, double lambda) {
  check_lambda(lambda);
  check_shapes(p, w);
  std::vector<double> t = log_tilt_weights(p, w, lambda);
  LogSumExp acc;
  for (double v : t) acc.add(v);
  const double norm = acc.value();
  double total = 0.0;
  for (double& v : t) {
    v = v == -kInfinity ? 0.0 : std::exp(v - norm);
    total += v;
  }
  for (double& v : t) v /= total;
  return JointDistribution(p.size(), w.output_size(), std::move(t));
}

IidExponent es_iid(const Distribution& p, const Channel& w, double rate) {
  check_shapes(p, w);
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("es_iid: rate must be finite and nonnegative");
  }
  if (is_zero_capacity(p, w)) {
    return {kInfinity, {0.0, kInfinity, JointDistribution::product(p, w)}, Regime::degenerate};
  }
  ConvexTilt tilt;
  tilt.value = [&](double lambda) { return f0(p, w, lambda); };
  tilt.slope_at_zero = mutual_information(p, w);
  tilt.slope_at_one = f0_slope(p, w, 1.0);
  tilt.value_at_one = f0(p, w, 1.0);
  const LegendrePoint lp = legendre_maximum(tilt, rate);
  IidExponent out;
  out.exponent = lp.exponent;
  out.regime = lp.regime;
  out.solution.lambda = lp.lambda;
  out.solution.objective = lp.exponent;
  out.solution.tilted = tilted_joint(p, w, lp.lambda);
  return out;
}

BruteForceResult es_iid_brute(const Distribution& p, const Channel& w, double rate,
                              const BruteForceOptions& options) {
  check_shapes(p, w);
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("es_iid_brute: rate must be finite and nonnegative");
  }
  const JointDistribution pxz = JointDistribution::product(p, w);
  const Distribution pz = output_marginal(p, w);
  const std::size_t nz = w.output_size();

  // Only cells charged by P x W can carry mass at finite objective.
  detail::SimplexProduct space;
  space.base.assign(pxz.data().size(), 0.0);
  std::vector<std::size_t> active;
  std::vector<double> log_ref(pxz.data().size(), 0.0);
  std::vector<double> log_ratio(pxz.data().size(), 0.0);
  for (std::size_t i = 0; i < pxz.data().size(); ++i) {
    if (pxz.data()[i] <= 0.0) continue;
    active.push_back(i);
    log_ref[i] = std::log(pxz.data()[i]);
    log_ratio[i] = std::log(w(i / nz, i % nz) / pz[i % nz]);
  }
  space.blocks.push_back(active);

  auto objective = [&](const std::vector<double>& q) {
    double d = 0.0;
    double f = 0.0;
    for (std::size_t i : active) {
      if (q[i] <= 0.0) continue;
      d += q[i] * (std::log(q[i]) - log_ref[i]);
      f += q[i] * log_ratio[i];
    }
    return std::max(0.0, d) + std::max(0.0, rate - f);
  };

  detail::GridSearchOptions grid;
  grid.resolution = options.grid;
  grid.rounds = options.rounds;
  grid.shrink = options.shrink;
  grid.budget = options.budget;
  const std::vector<std::vector<double>> seeds = {
      std::vector<double>(pxz.data().begin(), pxz.data().end())};
  detail::GridSearchResult best = detail::grid_minimize(space, objective, seeds, grid);

  double total = 0.0;
  for (double v : best.point) total += v;
  for (double& v : best.point) v /= total;
  return {best.value, JointDistribution(p.size(), nz, std::move(best.point))};
}

}  // namespace wiretap
