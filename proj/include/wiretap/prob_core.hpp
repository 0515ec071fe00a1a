#pragma once

// Probability and information primitives on finite alphabets.
//
// All information quantities are in nats. Divergences of pairs that are not
// absolutely continuous evaluate to +infinity (a value, not an error), and
// 0 ln 0 is taken as 0 throughout.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace wiretap {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Absolute tolerance on the total mass of a distribution.
inline constexpr double kMassTolerance = 1e-12;

/// Probability mass function on {0, ..., size()-1}.
///
/// Construction validates nonnegativity and normalization; inputs are never
/// silently renormalized.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> masses);

  static Distribution uniform(std::size_t size);
  static Distribution point_mass(std::size_t size, std::size_t symbol);

  std::size_t size() const noexcept { return masses_.size(); }
  double operator[](std::size_t symbol) const { return masses_[symbol]; }
  std::span<const double> masses() const noexcept { return masses_; }

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<double> masses_;
};

/// Stochastic matrix W: X -> Z stored row-major; row x is W(.|x).
///
/// Columns are not required to be nonzero: auxiliary prefix channels may
/// legitimately never produce some symbol.
class Channel {
 public:
  Channel() = default;
  Channel(std::size_t input_size, std::size_t output_size, std::vector<double> row_major);
  explicit Channel(const std::vector<std::vector<double>>& rows);

  static Channel identity(std::size_t size);
  static Channel binary_symmetric(double crossover);
  static Channel binary_erasure(double erasure);
  /// Binary asymmetric channel with W(1|0) = flip_zero and W(0|1) = flip_one.
  static Channel binary_asymmetric(double flip_zero, double flip_one);

  std::size_t input_size() const noexcept { return inputs_; }
  std::size_t output_size() const noexcept { return outputs_; }

  /// W(z|x).
  double operator()(std::size_t x, std::size_t z) const { return data_[x * outputs_ + z]; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(data_).subspan(x * outputs_, outputs_);
  }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Channel&) const = default;

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::vector<double> data_;
};

/// Distribution on X x Z, row-major in x.
class JointDistribution {
 public:
  JointDistribution() = default;
  JointDistribution(std::size_t x_size, std::size_t z_size, std::vector<double> row_major);

  /// P x V, i.e. (x, z) -> P(x) V(z|x).
  static JointDistribution product(const Distribution& p, const Channel& v);

  std::size_t x_size() const noexcept { return x_size_; }
  std::size_t z_size() const noexcept { return z_size_; }
  double operator()(std::size_t x, std::size_t z) const { return data_[x * z_size_ + z]; }
  std::span<const double> data() const noexcept { return data_; }

  Distribution x_marginal() const;
  Distribution z_marginal() const;
  /// Q(z|x) on rows with Q_X(x) > 0; other rows are set to `fallback`'s rows.
  Channel conditional(const Channel& fallback) const;

 private:
  std::size_t x_size_ = 0;
  std::size_t z_size_ = 0;
  std::vector<double> data_;
};

double entropy(const Distribution& p);
double kl_divergence(const Distribution& p, const Distribution& q);
double kl_divergence(const JointDistribution& p, const JointDistribution& q);

/// D(V||W|P) = D(P x V || P x W).
double conditional_divergence(const Channel& v, const Channel& w, const Distribution& p);

/// I(P, V) = D(P x V || P x (P o V)).
double mutual_information(const Distribution& p, const Channel& v);

/// P o V, the output marginal of P x V.
Distribution output_marginal(const Distribution& p, const Channel& v);

/// sum_{x,z} P(x) V(z|x) ln W(z|x); -infinity when V puts mass where W is 0.
double omega(const Channel& v, const Channel& w, const Distribution& p);

/// sum_{x,z} Q(x,z) ln[Q'(x,z) / (Q'_X(x) Q'_Z(z))]; -infinity when Q
/// charges a cell where Q' vanishes.
double f_tilt(const JointDistribution& q, const JointDistribution& q_ref);

/// Effective channel U -> Z obtained by feeding W through the prefix P_{X|U}.
Channel compose_prefix(const Channel& prefix, const Channel& w);

/// True when every row of W with P(x) > 0 equals P o W within kMassTolerance,
/// i.e. I(P, W) = 0.
bool is_zero_capacity(const Distribution& p, const Channel& w);

}  // namespace wiretap
