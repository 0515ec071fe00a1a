#include "wiretap/ntype.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wiretap/errors.hpp"
#include "wiretap/log_sum_exp.hpp"

namespace wiretap {
namespace {

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

double log_multinomial(int n, const std::vector<int>& counts) {
  double s = log_factorial(n);
  for (int c : counts) s -= log_factorial(c);
  return s;
}

void check_cap(std::uint64_t count, std::uint64_t cap, const char* what) {
  if (count > cap) {
    throw BudgetExceeded(std::string(what) + ": " + std::to_string(count) +
                         " types exceed the enumeration cap of " + std::to_string(cap));
  }
}

}  // namespace

NType::NType(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("NType: empty alphabet");
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("NType: negative count");
    n_ += c;
  }
  if (n_ <= 0) throw std::invalid_argument("NType: blocklength must be positive");
}

Distribution NType::distribution() const {
  std::vector<double> m(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) m[i] = static_cast<double>(counts_[i]) / n_;
  // Quotients of integers by n can miss unit mass by an ulp or two, well
  // inside the validation tolerance.
  return Distribution(std::move(m));
}

JointNType::JointNType(std::size_t x_size, std::size_t z_size, std::vector<int> counts)
    : x_size_(x_size), z_size_(z_size), counts_(std::move(counts)) {
  if (x_size_ == 0 || z_size_ == 0) throw std::invalid_argument("JointNType: empty alphabet");
  if (counts_.size() != x_size_ * z_size_) {
    throw std::invalid_argument("JointNType: shape does not match counts");
  }
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("JointNType: negative count");
    n_ += c;
  }
  if (n_ <= 0) throw std::invalid_argument("JointNType: blocklength must be positive");
}

NType JointNType::x_marginal() const {
  std::vector<int> m(x_size_, 0);
  for (std::size_t x = 0; x < x_size_; ++x) {
    for (std::size_t z = 0; z < z_size_; ++z) m[x] += (*this)(x, z);
  }
  return NType(std::move(m));
}

NType JointNType::z_marginal() const {
  std::vector<int> m(z_size_, 0);
  for (std::size_t x = 0; x < x_size_; ++x) {
    for (std::size_t z = 0; z < z_size_; ++z) m[z] += (*this)(x, z);
  }
  return NType(std::move(m));
}

JointDistribution JointNType::distribution() const {
  std::vector<double> m(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) m[i] = static_cast<double>(counts_[i]) / n_;
  return JointDistribution(x_size_, z_size_, std::move(m));
}

Channel JointNType::conditional(const Channel& fallback) const {
  if (fallback.input_size() != x_size_ || fallback.output_size() != z_size_) {
    throw std::invalid_argument("JointNType::conditional: fallback shape mismatch");
  }
  std::vector<double> d(counts_.size());
  for (std::size_t x = 0; x < x_size_; ++x) {
    int row = 0;
    for (std::size_t z = 0; z < z_size_; ++z) row += (*this)(x, z);
    for (std::size_t z = 0; z < z_size_; ++z) {
      d[x * z_size_ + z] =
          row > 0 ? static_cast<double>((*this)(x, z)) / row : fallback(x, z);
    }
  }
  return Channel(x_size_, z_size_, std::move(d));
}

std::uint64_t count_ntypes(std::size_t alphabet_size, int n) {
  if (alphabet_size == 0 || n < 0) return 0;
  // C(n+k-1, k-1) via the multiplicative formula with saturation.
  const std::uint64_t k1 = alphabet_size - 1;
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k1; ++i) {
    c = c * (static_cast<std::uint64_t>(n) + i) / i;
    if (c > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(c);
}

NTypeEnumerator::NTypeEnumerator(std::size_t alphabet_size, int n, std::uint64_t cap)
    : counts_(alphabet_size, 0), n_(n) {
  if (alphabet_size == 0) throw std::invalid_argument("NTypeEnumerator: empty alphabet");
  if (n < 1) throw std::invalid_argument("NTypeEnumerator: n must be at least 1");
  check_cap(count_ntypes(alphabet_size, n), cap, "NTypeEnumerator");
}

bool NTypeEnumerator::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    std::fill(counts_.begin(), counts_.end(), 0);
    counts_[0] = n_;
    return true;
  }
  const std::size_t k = counts_.size();
  // Rightmost position before the last slot that can give up a unit.
  std::size_t i = k - 1;
  while (i-- > 0) {
    if (counts_[i] > 0) break;
  }
  if (i >= k - 1 || counts_[i] == 0) {
    done_ = true;
    return false;
  }
  int tail = 0;
  for (std::size_t j = i + 1; j < k; ++j) {
    tail += counts_[j];
    counts_[j] = 0;
  }
  --counts_[i];
  counts_[i + 1] = tail + 1;
  return true;
}

std::vector<NType> enumerate_ntypes(std::size_t alphabet_size, int n, std::uint64_t cap) {
  NTypeEnumerator e(alphabet_size, n, cap);
  std::vector<NType> out;
  while (e.next()) out.push_back(e.current());
  return out;
}

std::uint64_t for_each_joint_ntype(std::size_t x_size, std::size_t z_size, int n,
                                   const JointTypeConstraints& constraints,
                                   const std::function<void(const JointNType&)>& visit,
                                   std::uint64_t cap) {
  if (x_size == 0 || z_size == 0) throw std::invalid_argument("joint types: empty alphabet");
  if (n < 1) throw std::invalid_argument("joint types: n must be at least 1");
  const auto& xm = constraints.x_marginal;
  const auto& zm = constraints.z_marginal;
  if (xm && xm->size() != x_size) throw std::invalid_argument("joint types: x-marginal size");
  if (zm && zm->size() != z_size) throw std::invalid_argument("joint types: z-marginal size");
  if ((xm && xm->n() != n) || (zm && zm->n() != n)) return 0;
  if (!xm && !zm) check_cap(count_ntypes(x_size * z_size, n), cap, "joint types");

  std::vector<int> cells(x_size * z_size, 0);
  std::vector<int> col_left = zm ? zm->counts() : std::vector<int>(z_size, n);
  std::uint64_t visited = 0;

  // Fills row x cell by cell; `row_left` is what the row still needs.
  std::function<void(const std::vector<int>&, std::size_t, std::size_t, int)> fill =
      [&](const std::vector<int>& rows, std::size_t x, std::size_t z, int row_left) {
        if (x == x_size) {
          if (zm && std::any_of(col_left.begin(), col_left.end(), [](int c) { return c != 0; })) {
            return;
          }
          check_cap(++visited, cap, "joint types");
          visit(JointNType(x_size, z_size, cells));
          return;
        }
        if (z + 1 == z_size) {
          if (row_left > col_left[z]) return;
          cells[x * z_size + z] = row_left;
          col_left[z] -= row_left;
          if (x + 1 < x_size) {
            fill(rows, x + 1, 0, rows[x + 1]);
          } else {
            fill(rows, x_size, 0, 0);
          }
          col_left[z] += row_left;
          return;
        }
        for (int c = std::min(row_left, col_left[z]); c >= 0; --c) {
          cells[x * z_size + z] = c;
          col_left[z] -= c;
          fill(rows, x, z + 1, row_left - c);
          col_left[z] += c;
        }
      };

  auto run_rows = [&](const std::vector<int>& rows) { fill(rows, 0, 0, rows[0]); };
  if (xm) {
    run_rows(xm->counts());
  } else {
    NTypeEnumerator rows(x_size, n, cap);
    while (rows.next()) run_rows(rows.counts());
  }
  return visited;
}

std::vector<JointNType> enumerate_joint_ntypes(std::size_t x_size, std::size_t z_size, int n,
                                               const JointTypeConstraints& constraints,
                                               std::uint64_t cap) {
  std::vector<JointNType> out;
  for_each_joint_ntype(
      x_size, z_size, n, constraints, [&](const JointNType& t) { out.push_back(t); }, cap);
  return out;
}

double log_type_class_size(const NType& t) { return log_multinomial(t.n(), t.counts()); }

double log_type_class_size(const JointNType& t) { return log_multinomial(t.n(), t.counts()); }

Ensemble::Ensemble(Kind kind, Distribution input, NType composition)
    : kind_(kind), input_(std::move(input)), composition_(std::move(composition)) {}

Ensemble Ensemble::iid(Distribution p) { return Ensemble(Kind::iid, std::move(p), NType()); }

Ensemble Ensemble::constant_composition(NType composition) {
  Distribution p = composition.distribution();
  return Ensemble(Kind::constant_composition, std::move(p), std::move(composition));
}

std::string_view Ensemble::label() const noexcept {
  return kind_ == Kind::iid ? "iid" : "cc";
}

const NType& Ensemble::composition() const {
  if (kind_ != Kind::constant_composition) {
    throw std::logic_error("Ensemble::composition: i.i.d. ensemble has no fixed composition");
  }
  return composition_;
}

double Ensemble::log_type_probability(const NType& qx) const {
  if (qx.size() != input_.size()) throw std::invalid_argument("log_type_probability: size");
  if (kind_ == Kind::constant_composition) return qx == composition_ ? 0.0 : -kInfinity;
  double s = log_type_class_size(qx);
  for (std::size_t x = 0; x < qx.size(); ++x) {
    if (qx[x] == 0) continue;
    if (input_[x] <= 0.0) return -kInfinity;
    s += qx[x] * std::log(input_[x]);
  }
  return s;
}

double success_probability(const JointNType& q, const Ensemble& ensemble) {
  if (q.x_size() != ensemble.alphabet_size()) {
    throw std::invalid_argument("success_probability: input alphabet mismatch");
  }
  const NType qx = q.x_marginal();
  const double log_px = ensemble.log_type_probability(qx);
  if (log_px == -kInfinity) return 0.0;
  const double log_p = log_type_class_size(q) - log_type_class_size(q.z_marginal()) -
                       log_type_class_size(qx) + log_px;
  return std::min(1.0, std::exp(log_p));
}

double log_reference_sequence_probability(const Ensemble& ensemble, const Channel& w,
                                          const NType& z_type, std::uint64_t cap) {
  if (w.input_size() != ensemble.alphabet_size() || w.output_size() != z_type.size()) {
    throw std::invalid_argument("log_reference_sequence_probability: shape mismatch");
  }
  if (ensemble.kind() == Ensemble::Kind::iid) {
    const Distribution pz = output_marginal(ensemble.input(), w);
    double s = 0.0;
    for (std::size_t z = 0; z < z_type.size(); ++z) {
      if (z_type[z] == 0) continue;
      if (pz[z] <= 0.0) return -kInfinity;
      s += z_type[z] * std::log(pz[z]);
    }
    return s;
  }
  const NType& pn = ensemble.composition();
  if (pn.n() != z_type.n()) {
    throw std::invalid_argument("log_reference_sequence_probability: blocklength mismatch");
  }
  const double base = -log_type_class_size(pn) - log_type_class_size(z_type);
  LogSumExp acc;
  for_each_joint_ntype(
      w.input_size(), w.output_size(), pn.n(), {pn, z_type},
      [&](const JointNType& q) {
        double log_w = 0.0;
        for (std::size_t x = 0; x < q.x_size(); ++x) {
          for (std::size_t z = 0; z < q.z_size(); ++z) {
            if (q(x, z) == 0) continue;
            if (w(x, z) <= 0.0) return;
            log_w += q(x, z) * std::log(w(x, z));
          }
        }
        acc.add(log_type_class_size(q) + base + log_w);
      },
      cap);
  return acc.value();
}

NType quantize_to_ntype(const Distribution& p, int n) {
  if (n < 1) throw std::invalid_argument("quantize_to_ntype: n must be at least 1");
  const std::size_t k = p.size();
  const auto support = static_cast<int>(
      std::count_if(p.masses().begin(), p.masses().end(), [](double m) { return m > 0.0; }));
  if (n < support) {
    throw std::invalid_argument("quantize_to_ntype: n = " + std::to_string(n) +
                                " cannot keep all " + std::to_string(support) +
                                " support symbols");
  }
  std::vector<int> c(k, 0);
  std::vector<double> remainder(k, 0.0);
  int total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double target = n * p[i];
    // Guard against targets like 2.9999999999999996 for exactly-representable types.
    c[i] = static_cast<int>(std::floor(target + 1e-9));
    if (p[i] > 0.0 && c[i] == 0) c[i] = 1;
    remainder[i] = target - c[i];
    total += c[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (total < n) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t j = 0; total < n; j = (j + 1) % k) {
      if (p[order[j]] <= 0.0) continue;
      ++c[order[j]];
      remainder[order[j]] -= 1.0;
      ++total;
    }
  } else if (total > n) {
    // Support bumps overshot; take units back where rounding gained the most.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] < remainder[b]; });
    while (total > n) {
      bool moved = false;
      for (std::size_t j : order) {
        if (c[j] > 1 && total > n) {
          --c[j];
          remainder[j] += 1.0;
          --total;
          moved = true;
          break;
        }
      }
      if (!moved) break;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return remainder[a] < remainder[b]; });
    }
  }
  return NType(std::move(c));
}

}  // namespace wiretap
