#pragma once

#include <cmath>
#include <limits>

namespace wiretap {

/// Streaming accumulator for ln(sum_i exp(a_i)).
///
/// Terms of -infinity contribute nothing; an empty accumulator reports
/// -infinity. The running maximum is rescaled on the fly, so terms may span
/// any number of orders of magnitude. Results depend on insertion order only
/// through floating-point rounding; callers that need bit-stable results feed
/// terms in a fixed order.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }

  void merge(const LogSumExp& other) {
    if (other.empty()) return;
    if (empty()) {
      *this = other;
      return;
    }
    if (other.max_ <= max_) {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    }
  }

  bool empty() const noexcept { return sum_ == 0.0; }

  double value() const noexcept {
    return empty() ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

}  // namespace wiretap
