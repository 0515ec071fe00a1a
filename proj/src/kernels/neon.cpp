#include "variants.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace wiretap::kernels::detail {
namespace {

void scale(const double* src, double factor, double* dst, std::size_t n) {
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(f, vld1q_f64(src + i)));
  for (; i < n; ++i) dst[i] = factor * src[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod = vmulq_f64(av, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

double sum(const double* x, std::size_t n) {
  // Lanes (0,1) and (2,3) of the four-lane reduction.
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  double s = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
             (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (std::size_t i = n4; i < n; ++i) s += x[i];
  return s;
}

constexpr KernelTable kTable{"neon", &scale, &axpy, &sum};

}  // namespace

const KernelTable* neon_table() { return &kTable; }

}  // namespace wiretap::kernels::detail

#else

namespace wiretap::kernels::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace wiretap::kernels::detail

#endif
