#pragma once

#include "wiretap/kernels.hpp"

namespace wiretap::kernels::detail {

// Null when the variant is not compiled for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace wiretap::kernels::detail
