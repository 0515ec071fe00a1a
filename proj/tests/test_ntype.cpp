#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "wiretap/errors.hpp"
#include "wiretap/ntype.hpp"

using namespace wiretap;

TEST_SUITE("ntype") {
  TEST_CASE("type counts match the binomial formula") {
    CHECK(count_ntypes(4, 6) == 84);
    CHECK(count_ntypes(4, 2) == 10);
    CHECK(count_ntypes(1, 7) == 1);
    CHECK(enumerate_ntypes(4, 6).size() == 84);
    CHECK(count_ntypes(64, 1000) == UINT64_MAX);
  }

  TEST_CASE("streamed counts for small alphabets") {
    for (std::size_t k = 1; k <= 4; ++k) {
      for (int n = 1; n <= 20; ++n) {
        NTypeEnumerator it(k, n);
        std::uint64_t seen = 0;
        double total = 0.0;
        while (it.next()) {
          ++seen;
          total += std::exp(log_type_class_size(it.current()));
        }
        CHECK(seen == count_ntypes(k, n));
        // Type classes partition the k^n sequences.
        CHECK(total == doctest::Approx(std::pow(static_cast<double>(k), n)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("enumeration order and distinctness") {
    const auto types = enumerate_ntypes(3, 4);
    CHECK(types.front().counts() == std::vector<int>{4, 0, 0});
    CHECK(types.back().counts() == std::vector<int>{0, 0, 4});
    std::set<std::vector<int>> seen;
    for (const NType& t : types) {
      CHECK(t.n() == 4);
      seen.insert(t.counts());
    }
    CHECK(seen.size() == types.size());
    CHECK_THROWS_AS(enumerate_ntypes(3, 40, 100), BudgetExceeded);
  }

  TEST_CASE("type class sizes") {
    CHECK(log_type_class_size(NType({3, 2, 1})) == doctest::Approx(4.0943445622221).epsilon(1e-13));
    CHECK(log_type_class_size(NType({1, 1, 1})) == doctest::Approx(1.791759469228055).epsilon(1e-13));
    CHECK(log_type_class_size(NType({5, 0})) == 0.0);
    CHECK(log_type_class_size(JointNType(2, 2, {1, 1, 0, 1})) == doctest::Approx(std::log(6.0)));
  }

  TEST_CASE("joint types under marginal constraints") {
    CHECK(enumerate_joint_ntypes(2, 2, 2).size() == 10);
    const NType half({2, 2});
    const auto both = enumerate_joint_ntypes(2, 2, 4, {half, half});
    CHECK(both.size() == 3);
    for (const JointNType& q : both) {
      CHECK(q.x_marginal() == half);
      CHECK(q.z_marginal() == half);
    }
    const auto xonly = enumerate_joint_ntypes(2, 3, 3, {NType({1, 2}), std::nullopt});
    CHECK(xonly.size() == count_ntypes(3, 1) * count_ntypes(3, 2));
    CHECK(enumerate_joint_ntypes(2, 2, 4, {NType({3, 0}), NType({2, 2})}).empty());
  }

  TEST_CASE("joint type conditional keeps fallback rows") {
    const JointNType q(2, 2, {3, 1, 0, 0});
    const Channel v = q.conditional(Channel::binary_symmetric(0.2));
    CHECK(v(0, 0) == doctest::Approx(0.75));
    CHECK(v(1, 1) == doctest::Approx(0.8));
  }

  TEST_CASE("ensemble type probabilities") {
    const Ensemble iid = Ensemble::iid(Distribution({0.3, 0.7}));
    CHECK(iid.log_type_probability(NType({1, 2})) ==
          doctest::Approx(std::log(3.0) + std::log(0.3) + 2 * std::log(0.7)));
    const Ensemble cc = Ensemble::constant_composition(NType({1, 2}));
    CHECK(cc.log_type_probability(NType({1, 2})) == 0.0);
    CHECK(cc.log_type_probability(NType({2, 1})) == -kInfinity);
    CHECK_THROWS_AS(iid.composition(), std::logic_error);
    // Summed over all types the i.i.d. probabilities are 1.
    double total = 0.0;
    for (const NType& t : enumerate_ntypes(2, 9)) total += std::exp(iid.log_type_probability(t));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("success probabilities sum to one over joint types with a fixed output type") {
    const Channel w = Channel::binary_erasure(0.3);
    const NType qz({2, 1, 2});
    for (const Ensemble& e : {Ensemble::iid(Distribution({0.4, 0.6})),
                              Ensemble::constant_composition(NType({3, 2}))}) {
      double total = 0.0;
      for (const JointNType& q : enumerate_joint_ntypes(2, 3, 5, {std::nullopt, qz})) {
        total += success_probability(q, e);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("success probabilities over random output sequences") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 10; ++n) {
      std::vector<int> zc(2, 0);
      for (int t = 0; t < n; ++t) ++zc[rng() % 2];
      const NType qz(zc);
      const NType comp = quantize_to_ntype(Distribution({0.42, 0.58}), std::max(n, 2));
      std::vector<Ensemble> ensembles{Ensemble::iid(Distribution({0.42, 0.58}))};
      if (comp.n() == n) ensembles.push_back(Ensemble::constant_composition(comp));
      for (const Ensemble& e : ensembles) {
        double total = 0.0;
        for_each_joint_ntype(2, 2, n, {std::nullopt, qz},
                             [&](const JointNType& q) { total += success_probability(q, e); });
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("reference sequence probability") {
    const Channel z({{1.0, 0.0}, {0.303, 0.697}});
    const Ensemble cc = Ensemble::constant_composition(NType({1, 2}));
    // Oracle: exact average over the three codewords of composition (1,2).
    CHECK(std::exp(log_reference_sequence_probability(cc, z, NType({3, 0}))) ==
          doctest::Approx(0.09180899999999999).epsilon(1e-13));
    CHECK(std::exp(log_reference_sequence_probability(cc, z, NType({2, 1}))) ==
          doctest::Approx(0.140794).epsilon(1e-13));
    CHECK(std::exp(log_reference_sequence_probability(cc, z, NType({1, 2}))) ==
          doctest::Approx(0.16193633333333332).epsilon(1e-13));
    CHECK(log_reference_sequence_probability(cc, z, NType({0, 3})) == -kInfinity);
    const Ensemble iid = Ensemble::iid(Distribution({0.36, 0.64}));
    const double pz0 = 0.36 + 0.64 * 0.303;
    CHECK(log_reference_sequence_probability(iid, z, NType({2, 1})) ==
          doctest::Approx(2 * std::log(pz0) + std::log(1 - pz0)));
  }

  TEST_CASE("quantization keeps support and stays close") {
    CHECK(quantize_to_ntype(Distribution({0.5, 0.5}), 7).counts() == std::vector<int>{4, 3});
    CHECK(quantize_to_ntype(Distribution({0.999, 0.001, 0.0}), 4).counts() ==
          std::vector<int>{3, 1, 0});
    CHECK_THROWS_AS(quantize_to_ntype(Distribution({0.4, 0.3, 0.3}), 2), std::invalid_argument);
    std::mt19937_64 rng(7);
    std::gamma_distribution<double> gamma(0.7);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t k = 2 + trial % 4;
      std::vector<double> m(k);
      double s = 0.0;
      for (double& v : m) s += (v = gamma(rng));
      for (double& v : m) v /= s;
      double fix = 1.0;
      for (std::size_t i = 0; i + 1 < k; ++i) fix -= m[i];
      m.back() = std::max(0.0, fix);
      const Distribution p(m);
      for (int n : {4, 5, 12, 33, 64}) {
        if (static_cast<std::size_t>(n) < k) continue;
        const NType t = quantize_to_ntype(p, n);
        CHECK(t.n() == n);
        double l1 = 0.0;
        double pmin = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
          l1 += std::abs(t[i] / static_cast<double>(n) - p[i]);
          CHECK((t[i] > 0) == (p[i] > 0));
          if (p[i] > 0) pmin = std::min(pmin, p[i]);
        }
        // Forced minimum counts can move mass beyond plain rounding.
        const double bound = pmin >= 1.0 / n ? static_cast<double>(k) / n : 2.0 * (k - 1) / n;
        CHECK(l1 <= bound + 1e-12);
      }
    }
  }
}
