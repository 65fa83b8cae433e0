#include <cmath>
#include <random>

#include "doctest.h"
#include "shus/estimators.hpp"
#include "test_util.hpp"

using namespace shus;

TEST_CASE("instantaneous IS weight is 1 at uniform theta") {
  const RhoSpec rho{RhoFamily::power, 0.7, 0.0};
  for (const int d : {3, 24}) {
    std::vector<double> lt(d, std::log(1.0 / d));
    for (int hit = 0; hit < d; ++hit)
      CHECK(instantaneous_is_weight(lt, rho, hit) ==
            doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("online IS: uniform theta reduces to the plain mean of f") {
  const RhoSpec rho{RhoFamily::power, 0.5, 0.0};
  const std::vector<double> theta(4, 0.25);
  OnlineIsAccumulator acc;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double plain = 0.0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    const double f = u(rng);
    plain += f;
    online_is_update(acc, theta, k % 4, f, rho);
  }
  CHECK(acc.mean() == doctest::Approx(plain / n).epsilon(1e-12));
  CHECK(acc.count == static_cast<std::uint64_t>(n));
}

TEST_CASE("online IS: constant rho degenerates to the running mean exactly") {
  const RhoSpec rho{RhoFamily::constant, 0.0, 0.0};
  std::mt19937_64 rng(5);
  OnlineIsAccumulator acc;
  double plain = 0.0;
  for (int k = 0; k < 500; ++k) {
    const auto theta = testutil::random_simplex(rng, 5);
    const double f = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    online_is_update(acc, theta, k % 5, f, rho);
    plain += f;
  }
  CHECK(acc.mean() == doctest::Approx(plain / 500).epsilon(1e-12));
}

TEST_CASE("online IS converges on the adaptive toy run") {
  // f == 1 and f = indicator of state 2, both over the same converged run.
  const double eps = 0.1, a = 0.5;
  SamplerConfig cfg;
  cfg.model.kind = ModelSpec::Kind::toy;
  cfg.model.epsilon = eps;
  cfg.bias = BiasSpec::validated(RhoSpec{RhoFamily::power, a, 0.0}, 1.0, 1.0,
                                 std::nullopt);
  cfg.n_steps = 1000000;
  cfg.seed = 12;
  cfg.record.record_is_weight = true;
  const auto rec = run(cfg);

  double sum_w = 0.0, sum_w_f3 = 0.0;
  for (std::size_t k = 0; k < rec.is_weight.size(); ++k) {
    sum_w += rec.is_weight[k];
    if (rec.hit[k] == 2) sum_w_f3 += rec.is_weight[k];
  }
  const double n = static_cast<double>(rec.is_weight.size());
  CHECK(sum_w / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sum_w_f3 / n == doctest::Approx(1.0 / 2.1).epsilon(0.01));
}

TEST_CASE("static IS estimate") {
  const std::vector<double> theta_star{1.0 / 2.1, 0.1 / 2.1, 1.0 / 2.1};

  SUBCASE("a = 0 reduces to the plain sample mean") {
    std::vector<StratumSample> samples;
    std::mt19937_64 rng(7);
    double plain = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double f = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
      samples.push_back({k % 3, f});
      plain += f;
    }
    CHECK(static_is_estimate(samples, theta_star, 0.0) ==
          doctest::Approx(plain / 100).epsilon(1e-12));
  }

  SUBCASE("a = 1, f == 1, strata visited uniformly telescopes to 1") {
    std::vector<double> ts{0.3, 0.5, 0.2};
    std::vector<StratumSample> samples{{0, 1.0}, {1, 1.0}, {2, 1.0}};
    CHECK(static_is_estimate(samples, ts, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("toy middle-state mass from exact biased sampling") {
    // Brute-force oracle: sample strata directly from pi_theta*^rho.
    const double a = 0.5, eps = 0.1;
    std::array<double, 3> p{};
    double z = 0.0;
    for (int i = 0; i < 3; ++i) z += p[i] = std::pow(theta_star[i], 1.0 - a);
    for (double& x : p) x /= z;
    std::mt19937_64 rng(11);
    std::discrete_distribution<int> pick({p[0], p[1], p[2]});
    std::vector<StratumSample> samples;
    const int n = 1000000;
    samples.reserve(n);
    for (int k = 0; k < n; ++k) {
      const int s = pick(rng);
      samples.push_back({s, s == 1 ? 1.0 : 0.0});
    }
    const double est = static_is_estimate(samples, theta_star, a);
    const double expect = eps / (2.0 + eps);
    // Monte Carlo error: w in {theta*^a}, f indicator; 5 sigma margin
    const double se = std::sqrt(p[1] * (1.0 - p[1]) / n) * z *
                      std::pow(theta_star[1], a);
    CHECK(std::abs(est - expect) < 5.0 * se);
  }

  SUBCASE("empty sample list is an error") {
    CHECK_THROWS_AS(static_is_estimate({}, theta_star, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("effective sample size") {
  CHECK(ess(std::vector<double>(17, 3.5)) == doctest::Approx(17.0).epsilon(1e-14));
  CHECK(ess(std::vector<double>{2, 2, 1, 1}) ==
        doctest::Approx(3.6).epsilon(1e-15));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::vector<double> w(50);
  for (double& x : w) x = u(rng);
  const double base = ess(w);
  for (const double c : {1e-8, 3.0, 1e8}) {
    auto scaled = w;
    for (double& x : scaled) x *= c;
    CHECK(ess(scaled) == doctest::Approx(base).epsilon(1e-12));
  }
  CHECK(base <= 50.0);
  CHECK(base < 50.0);  // unequal weights: strictly below n

  CHECK_THROWS_AS(ess({}), std::invalid_argument);
  CHECK_THROWS_AS(ess(std::vector<double>{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("efficiency factor limit") {
  const std::vector<double> toy_star{1.0 / 2.1, 0.1 / 2.1, 1.0 / 2.1};

  SUBCASE("a = 0 gives exactly 1") {
    CHECK(ef_limit(toy_star, 0.0) == 1.0);
  }

  SUBCASE("uniform theta* gives 1 for every a") {
    const std::vector<double> uni(8, 1.0 / 8.0);
    for (double a = 0.0; a <= 1.0; a += 0.1)
      CHECK(ef_limit(uni, a) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("always in (0, 1], non-increasing for the 2D weights") {
    const ContinuousTarget target(4.0, 1.2);
    const auto part = Partition::uniform(1.2, 24);
    const auto ts = reference_weights(target, part);
    double prev = 1.0 + 1e-12;
    for (int k = 0; k <= 10; ++k) {
      const double a = k / 10.0;
      const double ef = ef_limit(ts, a);
      CHECK(ef > 0.0);
      CHECK(ef <= 1.0 + 1e-12);
      CHECK(ef <= prev);
      prev = ef;
    }
  }

  SUBCASE("Cauchy-Schwarz bound holds for random simplex points") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const auto ts = testutil::random_simplex(rng, 6);
      const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double ef = ef_limit(ts, a);
      CHECK(ef > 0.0);
      CHECK(ef <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("g_frak") {
  const std::vector<double> toy_star{1.0 / 2.1, 0.1 / 2.1, 1.0 / 2.1};
  CHECK(g_frak(toy_star, 1.0) == 3.0);  // sum of theta*^0 is exactly d
  CHECK(g_frak(toy_star, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  // Quadrature values at beta = 4 against the reference numbers.
  const ContinuousTarget target(4.0, 1.2);
  const auto part = Partition::uniform(1.2, 24);
  const auto ts = reference_weights(target, part);
  CHECK(g_frak(ts, 1.0) == 24.0);
  CHECK(g_frak(ts, 0.8) == doctest::Approx(9.07).epsilon(0.02));
  CHECK(g_frak(ts, 0.6) == doctest::Approx(4.49).epsilon(0.02));
  CHECK(g_frak(ts, 0.2) == doctest::Approx(1.58).epsilon(0.02));
}

namespace {

std::vector<RunRecord> toy_replicas(double a, double alpha, double mu, int n_rep,
                                    std::uint64_t steps, std::uint64_t stride) {
  std::vector<RunRecord> recs;
  recs.reserve(n_rep);
  for (int r = 0; r < n_rep; ++r) {
    SamplerConfig cfg;
    cfg.model.kind = ModelSpec::Kind::toy;
    cfg.model.epsilon = 0.1;
    cfg.bias = BiasSpec::validated(RhoSpec{RhoFamily::power, a, 0.0}, alpha, mu,
                                   std::nullopt);
    cfg.n_steps = steps;
    cfg.seed = derive_seed(2025, 0, r);
    cfg.record.scalar_stride = stride;
    recs.push_back(run(cfg));
  }
  return recs;
}

}  // namespace

TEST_CASE("stepsize diagnostic") {
  SUBCASE("single record at alpha = mu = 1 is n * gamma_n") {
    const auto recs = toy_replicas(0.5, 1.0, 1.0, 1, 5000, 10);
    const auto diag = stepsize_diagnostic(recs, 1.0, 1.0);
    REQUIRE(diag.step.size() == recs[0].step.size());
    for (std::size_t k = 0; k < diag.step.size(); ++k)
      CHECK(diag.mean[k] ==
            doctest::Approx(static_cast<double>(recs[0].step[k]) *
                            recs[0].gamma[k])
                .epsilon(1e-15));
  }

  SUBCASE("toy plateau reaches g(a) for alpha = 0.8") {
    const auto recs = toy_replicas(0.5, 0.8, 1.0, 20, 200000, 100);
    const auto diag = stepsize_diagnostic(recs, 0.8, 1.0);
    const auto est = plateau(diag, 0.1);
    const std::vector<double> ts{1.0 / 2.1, 0.1 / 2.1, 1.0 / 2.1};
    CHECK(est.mean == doctest::Approx(g_frak(ts, 0.5)).epsilon(0.10));
  }

  SUBCASE("normalized curve tends to 1 for alpha = 1, mu = 0.25") {
    const auto recs = toy_replicas(0.5, 1.0, 0.25, 20, 1000000, 500);
    const auto diag = stepsize_diagnostic(recs, 1.0, 0.25);
    const std::vector<double> ts{1.0 / 2.1, 0.1 / 2.1, 1.0 / 2.1};
    const auto curve = normalized_curve(diag, g_frak(ts, 0.5));
    CHECK(curve.back() == doctest::Approx(1.0).epsilon(0.10));
  }

  SUBCASE("mismatched records are rejected") {
    auto recs = toy_replicas(0.5, 1.0, 1.0, 2, 1000, 10);
    recs[1].step.pop_back();
    recs[1].gamma.pop_back();
    CHECK_THROWS_AS(stepsize_diagnostic(recs, 1.0, 1.0), std::invalid_argument);
  }
}
