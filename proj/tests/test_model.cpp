#include <cmath>
#include <random>

#include "doctest.h"
#include "shus/estimators.hpp"
#include "shus/model.hpp"
#include "test_util.hpp"

using namespace shus;

TEST_CASE("two-well potential is even in x1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double x1 = u(rng), x2 = u(rng);
    const double a = two_well_potential(x1, x2);
    const double b = two_well_potential(-x1, x2);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("two-well potential at the origin") {
  // Independent term-by-term evaluation of the six-term formula at (0,0).
  const double expected = 3.0 * std::exp(-1.0 / 9.0) -
                          3.0 * std::exp(-25.0 / 9.0) - 10.0 * std::exp(-1.0) +
                          0.2 * std::pow(1.0 / 3.0, 4);
  CHECK(two_well_potential(0.0, 0.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(two_well_potential(0.0, 0.0) ==
        doctest::Approx(-1.1783368975351938).epsilon(1e-12));
}

TEST_CASE("two-well minima sit near (+-1.05, -0.04)") {
  for (const double sign : {-1.0, 1.0}) {
    double x1 = sign * 1.05, x2 = -0.04;
    for (int it = 0; it < 5000; ++it) {
      const auto g = two_well_gradient(x1, x2);
      x1 -= 0.01 * g[0];
      x2 -= 0.01 * g[1];
    }
    const auto g = two_well_gradient(x1, x2);
    CHECK(std::hypot(g[0], g[1]) < 1e-3);
    CHECK(std::abs(x1 - sign * 1.05) < 0.02);
    CHECK(std::abs(x2 + 0.04) < 0.02);
  }
}

TEST_CASE("continuous target log-density") {
  const ContinuousTarget target(4.0, 1.2);
  CHECK(target.log_density({0.0, 0.0}) ==
        doctest::Approx(-4.0 * two_well_potential(0.0, 0.0)).epsilon(1e-15));
  CHECK(target.log_density({1.21, 0.0}) == neg_inf);
  CHECK(target.log_density({-1.2, 5.0}) != neg_inf);
  CHECK(target.log_density({-1.0, 0.0}) ==
        doctest::Approx(target.log_density({1.0, 0.0})).epsilon(1e-14));
  CHECK_THROWS_AS(ContinuousTarget(-1.0, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(ContinuousTarget(4.0, 0.0), std::invalid_argument);
}

TEST_CASE("stratum index on the default R = 1.2, d = 24 grid") {
  const auto part = Partition::uniform(1.2, 24);
  CHECK(part.size() == 24);
  CHECK(part.index_of(-1.2) == 0);       // left boundary -> first stratum
  CHECK(part.index_of(-1.0) == 2);       // a_3 = -1.0, half-open convention
  CHECK(part.index_of(1.15) == 23);      // a_24 = 1.1, a_25 = 1.2
  CHECK(part.index_of(1.2) == 23);       // last stratum closed on the right
  CHECK_THROWS_AS(part.index_of(1.2000001), std::domain_error);
  CHECK_THROWS_AS(part.index_of(-1.3), std::domain_error);
}

TEST_CASE("stratum index is total and consistent with the edges") {
  const auto part = Partition::uniform(1.2, 24);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int l = 0; l < part.size(); ++l) {
    CHECK(part.index_of(part.left_edge(l)) == l);
    for (int k = 0; k < 50; ++k) {
      const double x =
          part.left_edge(l) + u(rng) * (part.right_edge(l) - part.left_edge(l));
      if (x < part.right_edge(l)) CHECK(part.index_of(x) == l);
    }
  }
}

TEST_CASE("toy reference weights are analytic") {
  const ToyTarget toy(0.1);
  const auto w = toy.reference_weights();
  CHECK(w[0] == doctest::Approx(1.0 / 2.1).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(0.1 / 2.1).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(1.0 / 2.1).epsilon(1e-15));
  CHECK_THROWS_AS(ToyTarget(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ToyTarget(1.0), std::invalid_argument);
}

TEST_CASE("2D reference weights: symmetry, normalization, refinement") {
  const ContinuousTarget target(4.0, 1.2);
  const auto part = Partition::uniform(1.2, 24);
  const auto w = reference_weights(target, part);
  REQUIRE(w.size() == 24);
  double sum = 0.0;
  for (double x : w) {
    CHECK(x > 0.0);
    sum += x;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 24; ++i)
    CHECK(w[i] == doctest::Approx(w[23 - i]).epsilon(1e-6));

  // Doubling the node count per axis changes nothing beyond 1e-6 relative.
  QuadratureSpec coarse;
  coarse.n1_per_stratum = 32;
  coarse.n2 = 512;
  coarse.max_refinements = 0;
  QuadratureSpec fine = coarse;
  fine.n1_per_stratum = 64;
  fine.n2 = 1024;
  const auto wc = reference_weights(target, part, coarse);
  const auto wf = reference_weights(target, part, fine);
  for (int i = 0; i < 24; ++i)
    CHECK(wc[i] == doctest::Approx(wf[i]).epsilon(1e-6));

  // Non-convergence within the refinement budget is an error.
  QuadratureSpec strict;
  strict.rel_tol = 1e-300;
  strict.max_refinements = 1;
  CHECK_THROWS_AS(reference_weights(target, part, strict), std::runtime_error);
}

TEST_CASE("toy transition matrix") {
  const double eps = 0.1;

  SUBCASE("uniform weights give P(0,1) = eps/3") {
    const auto p = toy_transition_matrix({1.0 / 3, 1.0 / 3, 1.0 / 3}, eps, 0.7);
    CHECK(p[0][1] == doctest::Approx(eps / 3.0).epsilon(1e-14));
  }

  SUBCASE("a = 0 makes the matrix independent of theta") {
    const auto p1 = toy_transition_matrix({0.5, 0.25, 0.25}, eps, 0.0);
    const auto p2 = toy_transition_matrix({0.1, 0.8, 0.1}, eps, 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(p1[i][j] == p2[i][j]);
  }

  SUBCASE("rows sum to one, detailed balance, stationary vector") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 25; ++trial) {
      const auto tv = testutil::random_simplex(rng, 3);
      const std::array<double, 3> theta{tv[0], tv[1], tv[2]};
      const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto p = toy_transition_matrix(theta, eps, a);

      std::array<double, 3> pi_rho{};
      const double raw[3] = {1.0 / std::pow(theta[0], a),
                             eps / std::pow(theta[1], a),
                             1.0 / std::pow(theta[2], a)};
      const double z = raw[0] + raw[1] + raw[2];
      for (int i = 0; i < 3; ++i) pi_rho[i] = raw[i] / z;

      for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        for (int j = 0; j < 3; ++j) {
          row += p[i][j];
          CHECK(pi_rho[i] * p[i][j] ==
                doctest::Approx(pi_rho[j] * p[j][i]).epsilon(1e-13));
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
      }

      const auto stat = testutil::stationary_of(p);
      for (int i = 0; i < 3; ++i)
        CHECK(stat[i] == doctest::Approx(pi_rho[i]).epsilon(1e-10));
    }
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(toy_transition_matrix({0.5, 0.5, 0.0}, eps, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(toy_transition_matrix({0.4, 0.3, 0.3}, 0.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(toy_transition_matrix({0.4, 0.3, 0.3}, eps, 1.5),
                    std::invalid_argument);
  }
}
