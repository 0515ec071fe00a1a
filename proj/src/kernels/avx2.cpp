#include "variants.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace wiretap::kernels::detail {
namespace {

void scale(const double* src, double factor, double* dst, std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, _mm256_mul_pd(f, _mm256_loadu_pd(src + i)));
  for (; i < n; ++i) dst[i] = factor * src[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) s += x[i];
  return s;
}

constexpr KernelTable kTable{"avx2", &scale, &axpy, &sum};

}  // namespace

const KernelTable* avx2_table() { return __builtin_cpu_supports("avx2") ? &kTable : nullptr; }

}  // namespace wiretap::kernels::detail

#else

namespace wiretap::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace wiretap::kernels::detail

#endif
