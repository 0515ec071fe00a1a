#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "wiretap/kernels.hpp"

using namespace wiretap;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar reference") {
    const kernels::KernelTable& s = kernels::scalar();
    CHECK(s.name == "scalar");
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y(5, 1.0);
    s.scale(x.data(), 0.5, y.data(), 5);
    CHECK(y == std::vector<double>{0.5, 1, 1.5, 2, 2.5});
    s.axpy(2.0, x.data(), y.data(), 5);
    CHECK(y == std::vector<double>{2.5, 5, 7.5, 10, 12.5});
    CHECK(s.sum(x.data(), 5) == 15.0);
    CHECK(s.sum(x.data(), 0) == 0.0);
    // In-place scaling is allowed.
    s.scale(x.data(), 2.0, x.data(), 5);
    CHECK(x[4] == 10.0);
  }

  TEST_CASE("active variant is one of the available ones") {
    const auto all = kernels::available();
    REQUIRE(!all.empty());
    CHECK(all.front() == &kernels::scalar());
    bool found = false;
    for (const auto* t : all) found |= t == &kernels::active();
    CHECK(found);
  }

  TEST_CASE("every variant is bit-identical to scalar") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const kernels::KernelTable& ref = kernels::scalar();
    for (const kernels::KernelTable* t : kernels::available()) {
      CAPTURE(t->name);
      for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 33u, 1000u, 4099u}) {
        CAPTURE(n);
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (double& v : x) v = u(rng) * 1e3;
        for (double& v : y) v = u(rng);
        const double a = u(rng);

        std::vector<double> s1(n), s2(n);
        ref.scale(x.data(), a, s1.data(), n);
        t->scale(x.data(), a, s2.data(), n);
        CHECK(same_bits(s1, s2));

        std::vector<double> y1 = y, y2 = y;
        ref.axpy(a, x.data(), y1.data(), n);
        t->axpy(a, x.data(), y2.data(), n);
        CHECK(same_bits(y1, y2));

        CHECK(same_bits(ref.sum(x.data(), n), t->sum(x.data(), n)));
      }
    }
  }
}
