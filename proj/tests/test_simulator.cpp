#include <doctest.h>

#include <cmath>
#include <map>

#include "wiretap/errors.hpp"
#include "wiretap/simulator.hpp"

using namespace wiretap;

namespace {

Codebook fixed(int n, std::vector<std::uint8_t> symbols) {
  return Codebook(n, 2, std::move(symbols), "fixed", 0);
}

}  // namespace

// Expected laws and divergences: tests/oracles/frozen_values.py.

TEST_SUITE("simulator") {
  const Channel bsc = Channel::binary_symmetric(0.11);
  const Distribution uniform = Distribution::uniform(2);

  TEST_CASE("output law of a fixed codebook") {
    const Codebook cb = fixed(2, {0, 0, 1, 1});
    const OutputLaw law = output_law(cb, bsc);
    const double expected[] = {0.4021, 0.0979, 0.0979, 0.4021};
    for (int i = 0; i < 4; ++i) CHECK(law.masses[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    const OutputLaw ref = reference_law(Ensemble::iid(uniform), 2, bsc);
    for (double m : ref.masses) CHECK(m == 0.25);
    CHECK(divergence_between(law, ref).value ==
          doctest::Approx(0.1986226110779696).epsilon(1e-14));
  }

  TEST_CASE("sequence indexing puts the first symbol in the lowest digit") {
    const Codebook cb = fixed(3, {1, 0, 0});
    const OutputLaw law = output_law(cb, Channel::identity(2));
    CHECK(law.masses[1] == 1.0);
    CHECK(law.masses[4] == 0.0);
  }

  TEST_CASE("constant-composition reference law") {
    const OutputLaw ref = reference_law(Ensemble::constant_composition(NType({1, 1})), 2, bsc);
    const double expected[] = {0.0979, 0.4021, 0.4021, 0.0979};
    for (int i = 0; i < 4; ++i) CHECK(ref.masses[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    const Channel zch({{1.0, 0.0}, {0.303, 0.697}});
    const OutputLaw zref = reference_law(Ensemble::constant_composition(NType({1, 2})), 3, zch);
    CHECK(zref.masses[0] == doctest::Approx(0.09180899999999999).epsilon(1e-14));
    CHECK(zref.masses[3] == doctest::Approx(0.16193633333333332).epsilon(1e-14));
    CHECK(zref.masses[7] == 0.0);
  }

  TEST_CASE("support violations make the divergence infinite") {
    const Channel zch({{1.0, 0.0}, {0.303, 0.697}});
    const OutputLaw ref = reference_law(Ensemble::constant_composition(NType({1, 2})), 3, zch);
    OutputLaw bad = ref;
    bad.masses.assign(8, 0.0);
    bad.masses[7] = 0.5;
    bad.masses[0] = 0.5;
    const DivergenceReport r = divergence_between(bad, ref);
    CHECK(r.value == kInfinity);
    CHECK(r.support_violations == 1);
    CHECK(r.first_violation == 7u);
  }

  TEST_CASE("leakage identity on a hand-built binned code") {
    Codebook cb = fixed(2, {0, 0, 1, 1, 0, 1, 1, 0});
    cb.partition(2);
    const OutputLaw ref = reference_law(Ensemble::iid(uniform), 2, bsc);
    const LeakageReport r = wiretap_leakage(cb, bsc, ref);
    CHECK(r.leak == doctest::Approx(0.19862261107796964).epsilon(1e-14));
    CHECK(r.cond_div == doctest::Approx(0.19862261107796964).epsilon(1e-14));
    CHECK(r.uncond_div == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(std::abs(r.identity_residual()) < 1e-14);
    CHECK_THROWS_AS(fixed(2, {0, 0, 1, 1}).partition(3), std::invalid_argument);
    CHECK_THROWS_AS(wiretap_leakage(fixed(2, {0, 0}), bsc, ref), std::invalid_argument);
  }

  TEST_CASE("sampling is deterministic in the seed") {
    const Ensemble e = Ensemble::iid(Distribution({0.3, 0.7}));
    const Codebook a = sample_codebook(e, 10, 50, 123);
    const Codebook b = sample_codebook(e, 10, 50, 123);
    const Codebook c = sample_codebook(e, 10, 50, 124);
    bool differs = false;
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(std::equal(a.codeword(i).begin(), a.codeword(i).end(), b.codeword(i).begin()));
      differs |= !std::equal(a.codeword(i).begin(), a.codeword(i).end(), c.codeword(i).begin());
    }
    CHECK(differs);
    CHECK(trial_seed(42, 0) == 42);
    CHECK(trial_seed(42, 1) == (42 ^ kSeedStride));
  }

  TEST_CASE("i.i.d. symbol frequencies follow P") {
    const Codebook cb = sample_codebook(Ensemble::iid(Distribution({0.2, 0.0, 0.8})), 100, 200, 9);
    std::map<int, int> counts;
    for (std::size_t i = 0; i < cb.size(); ++i) {
      for (std::uint8_t s : cb.codeword(i)) ++counts[s];
    }
    CHECK(counts[1] == 0);
    CHECK(counts[0] / 20000.0 == doctest::Approx(0.2).epsilon(0.05));
  }

  TEST_CASE("constant-composition codewords have the composition") {
    const NType comp({3, 5, 2});
    const Codebook cb = sample_codebook(Ensemble::constant_composition(comp), 10, 40, 77);
    std::map<std::vector<std::uint8_t>, int> distinct;
    for (std::size_t i = 0; i < cb.size(); ++i) {
      std::vector<int> c(3, 0);
      for (std::uint8_t s : cb.codeword(i)) ++c[s];
      CHECK(c == comp.counts());
      ++distinct[{cb.codeword(i).begin(), cb.codeword(i).end()}];
    }
    CHECK(distinct.size() > 30);
    CHECK_THROWS_AS(sample_codebook(Ensemble::constant_composition(comp), 9, 4, 1),
                    std::invalid_argument);
  }

  TEST_CASE("budget on the output alphabet") {
    CHECK(law_size(2, 16, 65536) == 65536);
    CHECK_THROWS_AS(law_size(2, 17, 65536), BudgetExceeded);
    CHECK_THROWS_AS(law_size(3, 11, 65536), BudgetExceeded);
  }

  TEST_CASE("averaged over codebooks the output law is the reference law") {
    const Channel bec = Channel::binary_erasure(0.3);
    for (const Ensemble& e : {Ensemble::iid(Distribution({0.4, 0.6})),
                              Ensemble::constant_composition(NType({2, 2}))}) {
      const OutputLaw ref = reference_law(e, 4, bec);
      std::vector<double> mean(ref.masses.size(), 0.0);
      const int trials = 4000;
      for (int t = 0; t < trials; ++t) {
        const OutputLaw law = output_law(sample_codebook(e, 4, 3, trial_seed(1, t)), bec);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += law.masses[i] / trials;
      }
      double worst = 0.0;
      for (std::size_t i = 0; i < mean.size(); ++i) worst = std::max(worst, std::abs(mean[i] - ref.masses[i]));
      CHECK(worst < 0.01);
    }
  }

  TEST_CASE("empirical exponent bookkeeping") {
    SimulationOptions o;
    o.trials = 5;
    o.seed = 3;
    o.bins = 2;
    const ExponentFit fit = empirical_exponent(Ensemble::Kind::iid, uniform, bsc, 0.4, {4, 6, 8}, o);
    REQUIRE(fit.points.size() == 3);
    for (const ExponentPoint& p : fit.points) {
      CHECK(p.mean_d > 0.0);
      CHECK(p.minus_log_mean_d == doctest::Approx(-std::log(p.mean_d)));
      CHECK(p.mean_leak.has_value());
      CHECK(*p.max_identity_residual < 1e-10);
      CHECK(p.probes.size() == 5);
      CHECK(p.probes.back().sequence == (std::size_t{1} << p.n) - 1);
    }
    CHECK(fit.points[2].codebook_size == 24);
    const ExponentFit again = empirical_exponent(Ensemble::Kind::iid, uniform, bsc, 0.4, {4, 6, 8}, o);
    CHECK(again.slope == fit.slope);
    CHECK_THROWS_AS(empirical_exponent(Ensemble::Kind::iid, uniform, bsc, 0.4, {4, 6}, o),
                    std::invalid_argument);
    CHECK_THROWS_AS(empirical_exponent(Ensemble::Kind::iid, uniform, Channel::binary_symmetric(0.5),
                                       0.4, {4, 6, 8}, o),
                    DegenerateInput);
    CHECK_THROWS_AS(empirical_exponent(Ensemble::Kind::iid, uniform, bsc, 0.4, {4, 6, 20}, o),
                    BudgetExceeded);
  }

  TEST_CASE("least-squares fit and confidence flag") {
    ExponentFit fit;
    for (int n : {2, 4, 6}) {
      ExponentPoint p;
      p.n = n;
      p.minus_log_mean_d = 0.5 + 0.1 * n;
      fit.points.push_back(p);
    }
    fit_exponent(fit);
    CHECK(fit.slope == doctest::Approx(0.1));
    CHECK(fit.intercept == doctest::Approx(0.5));
    CHECK(fit.residual_rms == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK_FALSE(fit.low_confidence);
    fit.points[1].minus_log_mean_d += 0.3;
    fit_exponent(fit);
    CHECK(fit.low_confidence);
  }
}
