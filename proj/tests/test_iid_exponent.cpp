#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "wiretap/iid_exponent.hpp"

using namespace wiretap;

// Oracle values: tests/oracles/frozen_values.py (closed forms and an SLSQP
// solve of the primal problem).

TEST_SUITE("iid_exponent") {
  const Distribution uniform = Distribution::uniform(2);
  const Channel bsc = Channel::binary_symmetric(0.11);
  const Channel zch({{1.0, 0.0}, {0.303, 0.697}});

  TEST_CASE("F0 values and slopes") {
    CHECK(f0(uniform, bsc, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(f0(uniform, bsc, 1.0) == doctest::Approx(0.47523989604098194).epsilon(1e-13));
    CHECK(f0_slope(uniform, bsc, 0.0) == doctest::Approx(0.34663184364127914).epsilon(1e-12));
    const double h = 1e-6;
    for (double l : {0.1, 0.5, 0.9}) {
      const double fd = (f0(uniform, zch, l + h) - f0(uniform, zch, l - h)) / (2 * h);
      CHECK(f0_slope(uniform, zch, l) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK_THROWS_AS(f0(uniform, bsc, 1.5), std::invalid_argument);
  }

  TEST_CASE("F0 is convex") {
    const Distribution p({0.42, 0.58});
    const Channel bac = Channel::binary_asymmetric(0.01, 0.303);
    for (int i = 1; i < 50; ++i) {
      const double l = i / 50.0;
      const double second = f0(p, bac, l + 0.02) - 2 * f0(p, bac, l) + f0(p, bac, l - 0.02);
      CHECK(second >= -1e-14);
    }
  }

  TEST_CASE("tilted joint") {
    const JointDistribution q0 = tilted_joint(uniform, bsc, 0.0);
    CHECK(q0(0, 1) == doctest::Approx(0.5 * 0.11));
    const JointDistribution q1 = tilted_joint(uniform, bsc, 1.0);
    CHECK(q1(0, 0) == doctest::Approx(0.89 * 0.89 / (2 * (0.89 * 0.89 + 0.11 * 0.11))));
  }

  TEST_CASE("exponent against the primal oracle") {
    const double expected[][2] = {{0.4, 0.0035843647},
                                  {0.5, 0.0360189490},
                                  {0.6, 0.1247601040},
                                  {0.8, 0.3247601040},
                                  {2.0, 1.5247601040}};
    for (const auto& row : expected) {
      CAPTURE(row[0]);
      CHECK(es_iid(uniform, bsc, row[0]).exponent == doctest::Approx(row[1]).epsilon(1e-9));
    }
    const Distribution p({0.36, 0.64});
    CHECK(es_iid(p, zch, 0.3).exponent == doctest::Approx(0.0000698185).epsilon(1e-9));
    CHECK(es_iid(p, zch, 0.5).exponent == doctest::Approx(0.1263767721).epsilon(1e-9));
  }

  TEST_CASE("regimes") {
    const IidExponent below = es_iid(uniform, bsc, 0.3);
    CHECK(below.exponent == 0.0);
    CHECK(below.regime == Regime::zero);
    CHECK(es_iid(uniform, bsc, 0.5).regime == Regime::parametric);
    const double knee = f0_slope(uniform, bsc, 1.0);
    const IidExponent sat = es_iid(uniform, bsc, knee + 0.1);
    CHECK(sat.regime == Regime::saturation);
    CHECK(sat.exponent == doctest::Approx(knee + 0.1 - 0.47523989604098194).epsilon(1e-12));
    const IidExponent sat2 = es_iid(uniform, bsc, knee + 0.3);
    CHECK(sat2.exponent - sat.exponent == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("zero mutual information gives an infinite exponent") {
    const IidExponent e = es_iid(uniform, Channel::binary_symmetric(0.5), 0.2);
    CHECK(e.exponent == kInfinity);
    CHECK(e.regime == Regime::degenerate);
    CHECK(es_iid(Distribution::point_mass(2, 0), bsc, 0.0).exponent == kInfinity);
  }

  TEST_CASE("brute-force oracle agrees on random channels") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.02, 0.98);
    for (int c = 0; c < 3; ++c) {
      const double a = u(rng);
      const double b = u(rng);
      const Channel w({{a, 1 - a}, {b, 1 - b}});
      const double px = u(rng);
      const Distribution p({px, 1 - px});
      const double i = mutual_information(p, w);
      for (double r : {0.5 * i, i + 0.02, i + 0.2, 1.5}) {
        CAPTURE(r);
        CHECK(es_iid_brute(p, w, r).value == doctest::Approx(es_iid(p, w, r).exponent).epsilon(1e-6).scale(1.0));
      }
    }
  }
}
