// Shared helpers for the test suites.
#pragma once

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace shus::testutil {

// Mean and batch-means standard error for correlated chain output.
struct BatchStats {
  double mean = 0.0;
  double se = 0.0;
};

inline BatchStats batch_stats(std::span<const double> values, int n_batches = 100) {
  const std::size_t n = values.size();
  if (n < static_cast<std::size_t>(2 * n_batches))
    throw std::invalid_argument("batch_stats: too few samples");
  const std::size_t len = n / n_batches;
  std::vector<double> bm;
  bm.reserve(n_batches);
  double total = 0.0;
  for (int b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t k = b * len; k < (b + 1) * len; ++k) s += values[k];
    bm.push_back(s / static_cast<double>(len));
    total += s;
  }
  BatchStats st;
  st.mean = total / static_cast<double>(len * n_batches);
  double var = 0.0;
  for (double m : bm) var += (m - st.mean) * (m - st.mean);
  var /= (n_batches - 1.0);
  st.se = std::sqrt(var / n_batches);
  return st;
}

// Random point in the open simplex, away from the boundary.
inline std::vector<double> random_simplex(std::mt19937_64& rng, int d,
                                          double floor = 0.02) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> t(d);
  double s = 0.0;
  for (double& x : t) {
    x = u(rng);
    s += x;
  }
  for (double& x : t) x /= s;
  return t;
}

// Stationary left eigenvector of a 3x3 stochastic matrix by power iteration;
// independent of any library routine under test.
inline std::array<double, 3> stationary_of(
    const std::array<std::array<double, 3>, 3>& p, int iters = 20000) {
  std::array<double, 3> v{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (int it = 0; it < iters; ++it) {
    std::array<double, 3> w{};
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) w[j] += v[i] * p[i][j];
    const double s = w[0] + w[1] + w[2];
    for (double& x : w) x /= s;
    v = w;
  }
  return v;
}

}  // namespace shus::testutil
