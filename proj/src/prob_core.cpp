#include "wiretap/prob_core.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wiretap {
namespace {

void validate_masses(std::span<const double> masses, const char* what) {
  if (masses.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty alphabet");
  }
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument(std::string(what) + ": masses must be finite and nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument(std::string(what) + ": masses sum to " + std::to_string(total) +
                                ", not 1");
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": alphabet mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

// p ln(p/q) with the conventions 0 ln(0/q) = 0 and p ln(p/0) = +inf.
double divergence_term(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return kInfinity;
  return p * std::log(p / q);
}

}  // namespace

Distribution::Distribution(std::vector<double> masses) : masses_(std::move(masses)) {
  validate_masses(masses_, "Distribution");
}

Distribution Distribution::uniform(std::size_t size) {
  if (size == 0) throw std::invalid_argument("Distribution::uniform: empty alphabet");
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Distribution Distribution::point_mass(std::size_t size, std::size_t symbol) {
  if (symbol >= size) throw std::invalid_argument("Distribution::point_mass: symbol out of range");
  std::vector<double> m(size, 0.0);
  m[symbol] = 1.0;
  return Distribution(std::move(m));
}

Channel::Channel(std::size_t input_size, std::size_t output_size, std::vector<double> row_major)
    : inputs_(input_size), outputs_(output_size), data_(std::move(row_major)) {
  if (inputs_ == 0 || outputs_ == 0) throw std::invalid_argument("Channel: empty alphabet");
  if (data_.size() != inputs_ * outputs_) {
    throw std::invalid_argument("Channel: expected " + std::to_string(inputs_ * outputs_) +
                                " entries, got " + std::to_string(data_.size()));
  }
  for (std::size_t x = 0; x < inputs_; ++x) validate_masses(row(x), "Channel row");
}

Channel::Channel(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("Channel: empty alphabet");
  inputs_ = rows.size();
  outputs_ = rows.front().size();
  data_.reserve(inputs_ * outputs_);
  for (const auto& r : rows) {
    require_same_size(r.size(), outputs_, "Channel: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  for (std::size_t x = 0; x < inputs_; ++x) validate_masses(row(x), "Channel row");
}

Channel Channel::identity(std::size_t size) {
  std::vector<double> d(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) d[i * size + i] = 1.0;
  return Channel(size, size, std::move(d));
}

Channel Channel::binary_symmetric(double crossover) {
  return Channel(2, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
}

Channel Channel::binary_erasure(double erasure) {
  return Channel(2, 3, {1.0 - erasure, erasure, 0.0, 0.0, erasure, 1.0 - erasure});
}

Channel Channel::binary_asymmetric(double flip_zero, double flip_one) {
  return Channel(2, 2, {1.0 - flip_zero, flip_zero, flip_one, 1.0 - flip_one});
}

JointDistribution::JointDistribution(std::size_t x_size, std::size_t z_size,
                                     std::vector<double> row_major)
    : x_size_(x_size), z_size_(z_size), data_(std::move(row_major)) {
  if (data_.size() != x_size_ * z_size_) {
    throw std::invalid_argument("JointDistribution: shape does not match data");
  }
  validate_masses(data_, "JointDistribution");
}

JointDistribution JointDistribution::product(const Distribution& p, const Channel& v) {
  require_same_size(p.size(), v.input_size(), "JointDistribution::product");
  std::vector<double> d(v.input_size() * v.output_size());
  for (std::size_t x = 0; x < v.input_size(); ++x) {
    for (std::size_t z = 0; z < v.output_size(); ++z) d[x * v.output_size() + z] = p[x] * v(x, z);
  }
  return JointDistribution(v.input_size(), v.output_size(), std::move(d));
}

Distribution JointDistribution::x_marginal() const {
  std::vector<double> m(x_size_, 0.0);
  for (std::size_t x = 0; x < x_size_; ++x) {
    for (std::size_t z = 0; z < z_size_; ++z) m[x] += (*this)(x, z);
  }
  return Distribution(std::move(m));
}

Distribution JointDistribution::z_marginal() const {
  std::vector<double> m(z_size_, 0.0);
  for (std::size_t x = 0; x < x_size_; ++x) {
    for (std::size_t z = 0; z < z_size_; ++z) m[z] += (*this)(x, z);
  }
  return Distribution(std::move(m));
}

Channel JointDistribution::conditional(const Channel& fallback) const {
  require_same_size(fallback.input_size(), x_size_, "JointDistribution::conditional");
  require_same_size(fallback.output_size(), z_size_, "JointDistribution::conditional");
  std::vector<double> d(x_size_ * z_size_);
  for (std::size_t x = 0; x < x_size_; ++x) {
    double row_mass = 0.0;
    for (std::size_t z = 0; z < z_size_; ++z) row_mass += (*this)(x, z);
    for (std::size_t z = 0; z < z_size_; ++z) {
      d[x * z_size_ + z] = row_mass > 0.0 ? (*this)(x, z) / row_mass : fallback(x, z);
    }
    if (row_mass > 0.0) {
      // Division can leave the row a few ulps off unit mass; absorb the
      // residue in the largest entry.
      double s = 0.0;
      std::size_t big = 0;
      for (std::size_t z = 0; z < z_size_; ++z) {
        s += d[x * z_size_ + z];
        if (d[x * z_size_ + z] > d[x * z_size_ + big]) big = z;
      }
      d[x * z_size_ + big] += 1.0 - s;
    }
  }
  return Channel(x_size_, z_size_, std::move(d));
}

double entropy(const Distribution& p) {
  double h = 0.0;
  for (double m : p.masses()) {
    if (m > 0.0) h -= m * std::log(m);
  }
  return h;
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  require_same_size(p.size(), q.size(), "kl_divergence");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += divergence_term(p[i], q[i]);
  return d < 0.0 ? 0.0 : d;
}

double kl_divergence(const JointDistribution& p, const JointDistribution& q) {
  require_same_size(p.x_size(), q.x_size(), "kl_divergence");
  require_same_size(p.z_size(), q.z_size(), "kl_divergence");
  double d = 0.0;
  for (std::size_t i = 0; i < p.data().size(); ++i) d += divergence_term(p.data()[i], q.data()[i]);
  return d < 0.0 ? 0.0 : d;
}

double conditional_divergence(const Channel& v, const Channel& w, const Distribution& p) {
  require_same_size(v.input_size(), w.input_size(), "conditional_divergence");
  require_same_size(v.output_size(), w.output_size(), "conditional_divergence");
  require_same_size(p.size(), v.input_size(), "conditional_divergence");
  double d = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    double row = 0.0;
    for (std::size_t z = 0; z < v.output_size(); ++z) row += divergence_term(v(x, z), w(x, z));
    d += p[x] * row;
  }
  return d < 0.0 ? 0.0 : d;
}

Distribution output_marginal(const Distribution& p, const Channel& v) {
  require_same_size(p.size(), v.input_size(), "output_marginal");
  std::vector<double> m(v.output_size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (std::size_t z = 0; z < v.output_size(); ++z) m[z] += p[x] * v(x, z);
  }
  return Distribution(std::move(m));
}

double mutual_information(const Distribution& p, const Channel& v) {
  const Distribution pz = output_marginal(p, v);
  double i = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    for (std::size_t z = 0; z < v.output_size(); ++z) {
      const double vz = v(x, z);
      if (vz > 0.0) i += p[x] * vz * std::log(vz / pz[z]);
    }
  }
  return i < 0.0 ? 0.0 : i;
}

double omega(const Channel& v, const Channel& w, const Distribution& p) {
  require_same_size(v.input_size(), w.input_size(), "omega");
  require_same_size(v.output_size(), w.output_size(), "omega");
  require_same_size(p.size(), v.input_size(), "omega");
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (std::size_t z = 0; z < v.output_size(); ++z) {
      const double mass = p[x] * v(x, z);
      if (mass <= 0.0) continue;
      if (w(x, z) <= 0.0) return -kInfinity;
      s += mass * std::log(w(x, z));
    }
  }
  return s;
}

double f_tilt(const JointDistribution& q, const JointDistribution& q_ref) {
  require_same_size(q.x_size(), q_ref.x_size(), "f_tilt");
  require_same_size(q.z_size(), q_ref.z_size(), "f_tilt");
  const Distribution rx = q_ref.x_marginal();
  const Distribution rz = q_ref.z_marginal();
  double s = 0.0;
  for (std::size_t x = 0; x < q.x_size(); ++x) {
    for (std::size_t z = 0; z < q.z_size(); ++z) {
      const double mass = q(x, z);
      if (mass <= 0.0) continue;
      if (q_ref(x, z) <= 0.0) return -kInfinity;
      s += mass * std::log(q_ref(x, z) / (rx[x] * rz[z]));
    }
  }
  return s;
}

Channel compose_prefix(const Channel& prefix, const Channel& w) {
  require_same_size(prefix.output_size(), w.input_size(), "compose_prefix");
  const std::size_t nu = prefix.input_size();
  const std::size_t nz = w.output_size();
  std::vector<double> d(nu * nz, 0.0);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t x = 0; x < w.input_size(); ++x) {
      const double a = prefix(u, x);
      for (std::size_t z = 0; z < nz; ++z) d[u * nz + z] += a * w(x, z);
    }
  }
  return Channel(nu, nz, std::move(d));
}

bool is_zero_capacity(const Distribution& p, const Channel& w) {
  const Distribution pz = output_marginal(p, w);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) continue;
    for (std::size_t z = 0; z < w.output_size(); ++z) {
      if (std::abs(w(x, z) - pz[z]) > kMassTolerance) return false;
    }
  }
  return true;
}

}  // namespace wiretap
