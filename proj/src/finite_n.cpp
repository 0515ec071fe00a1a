#include "wiretap/finite_n.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/log_sum_exp.hpp"

namespace wiretap {
namespace {

void check_rate(double rate) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("rate must be finite and nonnegative");
  }
}

void require_capacity(const Distribution& p, const Channel& w) {
  if (p.size() != w.input_size()) {
    throw std::invalid_argument("input distribution does not match channel input alphabet");
  }
  if (is_zero_capacity(p, w)) {
    throw DegenerateInput("I(P, W) = 0: the exponent is +infinity at every blocklength");
  }
}

// sum_{x,z} c(x,z) ln W(z|x) / n, or -infinity when a count sits where W = 0.
double omega_of(const JointNType& q, const Channel& w) {
  double s = 0.0;
  for (std::size_t x = 0; x < q.x_size(); ++x) {
    for (std::size_t z = 0; z < q.z_size(); ++z) {
      if (q(x, z) == 0) continue;
      if (w(x, z) <= 0.0) return -kInfinity;
      s += q(x, z) * std::log(w(x, z));
    }
  }
  return s / q.n();
}

// D(V||W|Q_X) for the conditional carried by q, i.e. D(Q || Q_X x W).
double conditional_divergence_of(const JointNType& q, const Channel& w) {
  const NType qx = q.x_marginal();
  double s = 0.0;
  for (std::size_t x = 0; x < q.x_size(); ++x) {
    if (qx[x] == 0) continue;
    for (std::size_t z = 0; z < q.z_size(); ++z) {
      if (q(x, z) == 0) continue;
      if (w(x, z) <= 0.0) return kInfinity;
      s += q(x, z) * std::log(static_cast<double>(q(x, z)) / (qx[x] * w(x, z)));
    }
  }
  return std::max(0.0, s / q.n());
}

double entropy_of(const NType& t) {
  double h = 0.0;
  for (int c : t.counts()) {
    if (c > 0) h -= c * std::log(static_cast<double>(c) / t.n());
  }
  return h / t.n();
}

// g_n with the inner minimum memoized per output type.
class GnEvaluator {
 public:
  GnEvaluator(const Channel& w, std::uint64_t cap) : w_(w), cap_(cap) {}

  double operator()(const JointNType& joint) {
    const double om = omega_of(joint, w_);
    if (om == -kInfinity) return -kInfinity;
    const NType qz = joint.z_marginal();
    auto it = inner_.find(qz.counts());
    if (it == inner_.end()) {
      double best = kInfinity;
      for_each_joint_ntype(
          joint.x_size(), joint.z_size(), joint.n(), {joint.x_marginal(), qz},
          [&](const JointNType& alt) { best = std::min(best, conditional_divergence_of(alt, w_)); },
          cap_);
      it = inner_.emplace(qz.counts(), best).first;
    }
    return om + entropy_of(qz) + it->second;
  }

 private:
  const Channel& w_;
  std::uint64_t cap_;
  std::map<std::vector<int>, double> inner_;
};

}  // namespace

double log_codebook_size(int n, double rate) {
  check_rate(rate);
  const double nr = n * rate;
  // Beyond 2^53 floor() no longer changes the value.
  if (nr > 36.0) return nr;
  return std::log(std::max(1.0, std::floor(std::exp(nr))));
}

FiniteNExponent es_n_iid(const Distribution& p, const Channel& w, double rate, int n,
                         std::uint64_t cap) {
  check_rate(rate);
  require_capacity(p, w);
  if (n < 1) throw std::invalid_argument("es_n_iid: n must be positive");
  const JointDistribution ref = JointDistribution::product(p, w);
  const Distribution pz = ref.z_marginal();
  const std::size_t nx = w.input_size();
  const std::size_t nz = w.output_size();
  std::vector<double> log_ref(nx * nz, -kInfinity);
  std::vector<double> log_ratio(nx * nz, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t z = 0; z < nz; ++z) {
      if (ref(x, z) <= 0.0) continue;
      log_ref[x * nz + z] = std::log(ref(x, z));
      log_ratio[x * nz + z] = std::log(w(x, z) / pz[z]);
    }
  }

  FiniteNExponent best{n, kInfinity, {}, "iid"};
  for_each_joint_ntype(
      nx, nz, n, {},
      [&](const JointNType& q) {
        double d = 0.0;
        double f = 0.0;
        for (std::size_t i = 0; i < nx * nz; ++i) {
          const int c = q.counts()[i];
          if (c == 0) continue;
          if (log_ref[i] == -kInfinity) return;
          const double qi = static_cast<double>(c) / n;
          d += qi * (std::log(qi) - log_ref[i]);
          f += qi * log_ratio[i];
        }
        const double value = std::max(0.0, d) + std::max(0.0, rate - f);
        if (value < best.value) {
          best.value = value;
          best.minimizing_type = q;
        }
      },
      cap);
  return best;
}

double g_n_func(const JointNType& joint, const Channel& w, std::uint64_t cap) {
  if (joint.x_size() != w.input_size() || joint.z_size() != w.output_size()) {
    throw std::invalid_argument("g_n_func: joint type does not match the channel");
  }
  GnEvaluator g(w, cap);
  return g(joint);
}

double g_n_func(const Channel& v, const Channel& w, const NType& pn, std::uint64_t cap) {
  if (v.input_size() != pn.size() || v.input_size() != w.input_size() ||
      v.output_size() != w.output_size()) {
    throw std::invalid_argument("g_n_func: shape mismatch");
  }
  std::vector<int> counts(v.input_size() * v.output_size());
  for (std::size_t x = 0; x < v.input_size(); ++x) {
    for (std::size_t z = 0; z < v.output_size(); ++z) {
      const double c = pn[x] * v(x, z);
      const double r = std::round(c);
      if (std::abs(c - r) > 1e-9) {
        throw std::invalid_argument("g_n_func: P_n x V is not a joint n-type");
      }
      counts[x * v.output_size() + z] = static_cast<int>(r);
    }
  }
  return g_n_func(JointNType(v.input_size(), v.output_size(), std::move(counts)), w, cap);
}

FiniteNExponent es_n_cc(const NType& pn, const Channel& w, double rate, std::uint64_t cap) {
  check_rate(rate);
  if (pn.size() != w.input_size()) {
    throw std::invalid_argument("es_n_cc: composition does not match channel input alphabet");
  }
  require_capacity(pn.distribution(), w);
  GnEvaluator g(w, cap);
  FiniteNExponent best{pn.n(), kInfinity, {}, "cc"};
  for_each_joint_ntype(
      w.input_size(), w.output_size(), pn.n(), {pn, std::nullopt},
      [&](const JointNType& q) {
        const double d = conditional_divergence_of(q, w);
        if (d == kInfinity || d >= best.value) return;
        const double value = d + std::max(0.0, rate - g(q));
        if (value < best.value) {
          best.value = value;
          best.minimizing_type = q;
        }
      },
      cap);
  return best;
}

SurrogateValue surrogate_sum(const Ensemble& ensemble, const Channel& w, int n, double rate,
                             bool keep_terms, std::uint64_t cap) {
  check_rate(rate);
  require_capacity(ensemble.input(), w);
  if (ensemble.kind() == Ensemble::Kind::constant_composition && ensemble.composition().n() != n) {
    throw std::invalid_argument("surrogate_sum: n differs from the composition's blocklength");
  }
  if (n < 1) throw std::invalid_argument("surrogate_sum: n must be positive");
  const double log_m = log_codebook_size(n, rate);

  std::map<std::vector<int>, double> log_ref_cache;
  auto log_ref = [&](const NType& qz) {
    auto it = log_ref_cache.find(qz.counts());
    if (it == log_ref_cache.end()) {
      it = log_ref_cache
               .emplace(qz.counts(), log_reference_sequence_probability(ensemble, w, qz, cap))
               .first;
    }
    return it->second;
  };

  JointTypeConstraints constraints;
  if (ensemble.kind() == Ensemble::Kind::constant_composition) {
    constraints.x_marginal = ensemble.composition();
  }
  SurrogateValue out{n, rate, -kInfinity, {}};
  LogSumExp acc;
  for_each_joint_ntype(
      w.input_size(), w.output_size(), n, constraints,
      [&](const JointNType& q) {
        const double d = conditional_divergence_of(q, w);
        if (d == kInfinity) return;
        const NType qx = q.x_marginal();
        const double log_px = ensemble.log_type_probability(qx);
        if (log_px == -kInfinity) return;
        // l(Q) = W^n(z^n|x^n) / P̄(z^n) for any pair of joint type Q.
        const double log_l = n * omega_of(q, w) - log_ref(q.z_marginal());
        const double term = -n * d + log_px + std::min(0.0, log_l - log_m);
        acc.add(term);
        if (keep_terms) out.per_type_terms.push_back({q, term});
      },
      cap);
  out.log_value = acc.value();
  return out;
}

}  // namespace wiretap
