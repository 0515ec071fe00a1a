#pragma once

// Exact secrecy (resolvability) exponent of the i.i.d. random-coding
// ensemble, evaluated through its lambda form
//
//   E(P, W, R) = max_{0<=lambda<=1} { lambda R - F0(P, W, lambda) },
//   F0 = ln sum_{x,z} P(x) W(z|x)^{1+lambda} (P o W)(z)^{-lambda},
//
// plus an independent brute-force oracle that minimizes the primal
// D(Q || P x W) + [R - f(Q || P x W)]^+ over a refined simplex grid.

#include <cstdint>

#include "wiretap/legendre.hpp"
#include "wiretap/prob_core.hpp"

namespace wiretap {

/// F0(P, W, lambda). Throws std::invalid_argument for lambda outside [0, 1].
double f0(const Distribution& p, const Channel& w, double lambda);

/// dF0/dlambda, computed analytically; equals f(Q_lambda || P x W) for the
/// tilted joint Q_lambda.
double f0_slope(const Distribution& p, const Channel& w, double lambda);

/// Q_lambda(x,z) proportional to P(x) W(z|x)^{1+lambda} (P o W)(z)^{-lambda},
/// the minimizer of D(Q || P x W) - lambda f(Q || P x W).
JointDistribution tilted_joint(const Distribution& p, const Channel& w, double lambda);

struct LambdaSolution {
  double lambda = 0.0;
  double objective = 0.0;  // lambda R - F0(lambda)
  JointDistribution tilted;
};

struct IidExponent {
  double exponent = 0.0;  // +infinity when I(P, W) = 0
  LambdaSolution solution;
  Regime regime = Regime::zero;
};

IidExponent es_iid(const Distribution& p, const Channel& w, double rate);

struct BruteForceOptions {
  int grid = 64;
  int rounds = 4;
  int shrink = 8;
  std::uint64_t budget = 2'000'000;
};

struct BruteForceResult {
  double value = 0.0;
  JointDistribution minimizer;
};

/// Primal oracle: grid minimum of D(Q || P x W) + [R - f(Q || P x W)]^+ over
/// joints Q << P x W. Throws BudgetExceeded when the coarse grid is too big.
BruteForceResult es_iid_brute(const Distribution& p, const Channel& w, double rate,
                              const BruteForceOptions& options = {});

}  // namespace wiretap
