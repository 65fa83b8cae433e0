// Stable log-domain arithmetic used throughout the occupation updates.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace shus {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// log(1 + exp(x)) without overflow for large |x|.
inline double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum_i exp(v_i)).
inline double log_sum_exp(std::span<const double> v) {
  double hi = neg_inf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == neg_inf) return neg_inf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

/// log(log(1 + s)) given log(s). Stable when s is astronomically large.
inline double log_log1p_from_log(double log_s) {
  return std::log(log1p_exp(log_s));
}

}  // namespace shus
