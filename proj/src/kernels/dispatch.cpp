#include <cstdlib>
#include <string_view>

#include "variants.hpp"

namespace wiretap::kernels {

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const KernelTable* t = detail::avx2_table()) out.push_back(t);
  if (const KernelTable* t = detail::neon_table()) out.push_back(t);
  return out;
}

const KernelTable& active() {
  static const KernelTable* const chosen = [] {
    const std::vector<const KernelTable*> all = available();
    if (const char* forced = std::getenv("WIRETAP_KERNELS")) {
      for (const KernelTable* t : all) {
        if (t->name == std::string_view(forced)) return t;
      }
    }
    return all.back();
  }();
  return *chosen;
}

}  // namespace wiretap::kernels
