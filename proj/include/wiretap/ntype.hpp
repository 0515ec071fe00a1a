#pragma once

// Method-of-types machinery: n-types, joint n-types, type-class sizes, the
// two codeword sampling ensembles, and the per-type probabilities that the
// finite-blocklength formulas and the simulator share.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "wiretap/prob_core.hpp"

namespace wiretap {

/// Default cap on the number of types any single enumeration may visit.
inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

/// Empirical distribution with denominator n, stored as integer counts.
class NType {
 public:
  NType() = default;
  explicit NType(std::vector<int> counts);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return counts_.size(); }
  int operator[](std::size_t symbol) const { return counts_[symbol]; }
  const std::vector<int>& counts() const noexcept { return counts_; }
  Distribution distribution() const;

  bool operator==(const NType&) const = default;
  auto operator<=>(const NType&) const = default;

 private:
  std::vector<int> counts_;
  int n_ = 0;
};

/// Joint n-type on X x Z, counts row-major in x.
class JointNType {
 public:
  JointNType() = default;
  JointNType(std::size_t x_size, std::size_t z_size, std::vector<int> counts);

  int n() const noexcept { return n_; }
  std::size_t x_size() const noexcept { return x_size_; }
  std::size_t z_size() const noexcept { return z_size_; }
  int operator()(std::size_t x, std::size_t z) const { return counts_[x * z_size_ + z]; }
  const std::vector<int>& counts() const noexcept { return counts_; }

  NType x_marginal() const;
  NType z_marginal() const;
  JointDistribution distribution() const;
  /// Conditional V with P_n x V equal to this type; rows with zero count
  /// are copied from `fallback`.
  Channel conditional(const Channel& fallback) const;

  bool operator==(const JointNType&) const = default;

 private:
  std::size_t x_size_ = 0;
  std::size_t z_size_ = 0;
  std::vector<int> counts_;
  int n_ = 0;
};

/// Number of n-types on an alphabet of size k, C(n+k-1, k-1), saturated at
/// UINT64_MAX.
std::uint64_t count_ntypes(std::size_t alphabet_size, int n);

/// Streams the n-types of a k-letter alphabet in descending lexicographic
/// order: (n,0,...,0) first, (0,...,0,n) last. No random access.
class NTypeEnumerator {
 public:
  NTypeEnumerator(std::size_t alphabet_size, int n,
                  std::uint64_t cap = kDefaultEnumerationCap);

  /// Advances to the next type; returns false once exhausted. The first call
  /// yields the first type.
  bool next();
  const std::vector<int>& counts() const noexcept { return counts_; }
  NType current() const { return NType(counts_); }

 private:
  std::vector<int> counts_;
  int n_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<NType> enumerate_ntypes(std::size_t alphabet_size, int n,
                                    std::uint64_t cap = kDefaultEnumerationCap);

struct JointTypeConstraints {
  std::optional<NType> x_marginal;
  std::optional<NType> z_marginal;
};

/// Calls `visit` once per joint n-type on an x_size-by-z_size alphabet that
/// matches the given marginals. Deterministic order. Returns the number of
/// types visited; an infeasible marginal pair visits nothing.
std::uint64_t for_each_joint_ntype(std::size_t x_size, std::size_t z_size, int n,
                                   const JointTypeConstraints& constraints,
                                   const std::function<void(const JointNType&)>& visit,
                                   std::uint64_t cap = kDefaultEnumerationCap);

std::vector<JointNType> enumerate_joint_ntypes(std::size_t x_size, std::size_t z_size, int n,
                                               const JointTypeConstraints& constraints = {},
                                               std::uint64_t cap = kDefaultEnumerationCap);

/// ln |T_t|, the log-multinomial coefficient n! / prod_i t_i!.
double log_type_class_size(const NType& t);
double log_type_class_size(const JointNType& t);

/// Codeword sampling law: i.i.d. from P_X, or uniform on the type class of a
/// fixed composition P_n.
class Ensemble {
 public:
  enum class Kind { iid, constant_composition };

  static Ensemble iid(Distribution p);
  static Ensemble constant_composition(NType composition);

  Kind kind() const noexcept { return kind_; }
  std::string_view label() const noexcept;
  std::size_t alphabet_size() const noexcept { return input_.size(); }
  /// P_X for i.i.d.; P_n as a distribution for constant composition.
  const Distribution& input() const noexcept { return input_; }
  /// Throws std::logic_error for the i.i.d. ensemble.
  const NType& composition() const;

  /// ln P_{X^n}(T_{qx}); -infinity when the type class has zero probability.
  double log_type_probability(const NType& qx) const;

 private:
  Ensemble(Kind kind, Distribution input, NType composition);

  Kind kind_;
  Distribution input_;
  NType composition_;
};

/// p_Q: probability that a single codeword drawn from `ensemble` has joint
/// type Q with a fixed z^n of type Q_Z.
double success_probability(const JointNType& q, const Ensemble& ensemble);

/// ln P̄_{Z^n}(z^n) for any z^n of type `z_type`, where P̄ = P_{X^n} o W^n.
/// Constant composition uses the exact sum over conditional types; -infinity
/// when the sequence is outside the reference support.
double log_reference_sequence_probability(const Ensemble& ensemble, const Channel& w,
                                          const NType& z_type,
                                          std::uint64_t cap = kDefaultEnumerationCap);

/// Support-preserving largest-remainder rounding of n P.
///
/// Every symbol in supp(P) gets at least one count; the remaining counts go
/// by largest remainder, ties to the lower symbol index. Throws
/// std::invalid_argument when n is smaller than |supp(P)|.
NType quantize_to_ntype(const Distribution& p, int n);

}  // namespace wiretap
