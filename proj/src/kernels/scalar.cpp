#include "wiretap/kernels.hpp"

namespace wiretap::kernels {
namespace {

void scale(const double* src, double factor, double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = factor * src[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

double sum(const double* x, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    for (std::size_t k = 0; k < 4; ++k) lane[k] += x[i + k];
  }
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) s += x[i];
  return s;
}

constexpr KernelTable kTable{"scalar", &scale, &axpy, &sum};

}  // namespace

const KernelTable& scalar() { return kTable; }

}  // namespace wiretap::kernels
