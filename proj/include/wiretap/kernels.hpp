#pragma once

// Dense vector kernels behind the simulator's output-law computations.
//
// Every variant produces bit-identical results: products and sums are
// evaluated in the same order with no fused multiply-add, and `sum` uses a
// fixed four-lane interleaved reduction ((l0 + l1) + (l2 + l3)) followed by
// a sequential tail.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace wiretap::kernels {

struct KernelTable {
  std::string_view name;
  /// dst[i] = factor * src[i]
  void (*scale)(const double* src, double factor, double* dst, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
};

const KernelTable& scalar();

/// Variants compiled into this build and supported by the running CPU,
/// scalar first.
std::vector<const KernelTable*> available();

/// The widest available variant. The environment variable WIRETAP_KERNELS
/// (scalar, avx2, neon) forces a choice when that variant is available.
const KernelTable& active();

}  // namespace wiretap::kernels
