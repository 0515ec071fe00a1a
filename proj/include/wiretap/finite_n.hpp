#pragma once

// Blocklength-n exponents obtained by exact enumeration of joint n-types,
// and the type-sum surrogate for E[D(P_C || P̄)] that they approximate.

#include <cstdint>
#include <string>
#include <vector>

#include "wiretap/ntype.hpp"
#include "wiretap/prob_core.hpp"

namespace wiretap {

struct FiniteNExponent {
  int n = 0;
  double value = 0.0;
  JointNType minimizing_type;
  std::string ensemble;
};

/// min over joint n-types Q << P x W of D(Q||P x W) + [R - f(Q||P x W)]^+.
/// Throws DegenerateInput when I(P, W) = 0 and BudgetExceeded past `cap`.
FiniteNExponent es_n_iid(const Distribution& p, const Channel& w, double rate, int n,
                         std::uint64_t cap = kDefaultEnumerationCap);

/// g_n for the conditional carried by `joint` (a joint n-type P_n x V): the
/// inner divergence minimum runs over joint n-types sharing both marginals
/// with `joint`. Returns -infinity when V charges a cell where W vanishes.
double g_n_func(const JointNType& joint, const Channel& w,
                std::uint64_t cap = kDefaultEnumerationCap);

/// Same quantity for a conditional V given as a matrix; P_n x V must have
/// integer counts (within 1e-9) or std::invalid_argument is thrown.
double g_n_func(const Channel& v, const Channel& w, const NType& pn,
                std::uint64_t cap = kDefaultEnumerationCap);

/// min over V with P_n x V a joint n-type of D(V||W|P_n) + [R - g_n(V)]^+.
FiniteNExponent es_n_cc(const NType& pn, const Channel& w, double rate,
                        std::uint64_t cap = kDefaultEnumerationCap);

struct SurrogateTerm {
  JointNType type;
  double log_term = 0.0;
};

struct SurrogateValue {
  int n = 0;
  double rate = 0.0;
  double log_value = 0.0;
  /// Filled only on request; one entry per contributing joint type.
  std::vector<SurrogateTerm> per_type_terms;
};

/// ln sum_Q exp(-n D(Q||Q_X x W)) P_{X^n}(T_{Q_X}) min{1, l(Q)/M} with
/// M = max(1, floor(exp(nR))) and l(Q) evaluated exactly. For constant
/// composition, n is the composition's blocklength.
SurrogateValue surrogate_sum(const Ensemble& ensemble, const Channel& w, int n, double rate,
                             bool keep_terms = false,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// ln max(1, floor(exp(nR))).
double log_codebook_size(int n, double rate);

}  // namespace wiretap
