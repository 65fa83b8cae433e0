// Importance-sampling estimators and efficiency diagnostics.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shus/bias.hpp"
#include "shus/sampler.hpp"

namespace shus {

/// Per-sample weight of the online estimator at pre-update weights theta:
/// (sum_i theta(i)/rho(theta(i))) * rho(theta(hit)).
double instantaneous_is_weight(std::span<const double> log_theta,
                               const RhoSpec& rho, int hit);

/// Running average of w_k f(X_k) whose limit is the plain target expectation
/// of f, even though samples come from the adaptively biased chain.
struct OnlineIsAccumulator {
  double weighted_sum = 0.0;
  std::uint64_t count = 0;

  double mean() const { return count == 0 ? 0.0 : weighted_sum / count; }
};

/// Accumulates one summand using the weights theta_prev available *before*
/// the occupation update of the step that produced the sample.
void online_is_update(OnlineIsAccumulator& acc,
                      std::span<const double> theta_prev, int hit,
                      double f_value, const RhoSpec& rho);

/// Static estimate from samples approximately distributed as pi_{theta*}^{t^a}:
/// (sum_j theta*(j)/theta*(j)^a) * mean_k theta*(stratum_k)^a f_k.
struct StratumSample {
  int stratum;  // 0-based
  double f_value;
};
double static_is_estimate(std::span<const StratumSample> samples,
                          std::span<const double> theta_star, double a);

/// Effective sample size (sum w)^2 / sum w^2 of positive weights.
double ess(std::span<const double> weights);

/// Large-n limit of the efficiency factor ESS/n at equilibrium:
/// 1 / [(sum theta*^{1-a}) (sum theta*^{1+a})], in (0, 1].
double ef_limit(std::span<const double> theta_star, double a);

/// g(a) = sum_i theta*(i)^{1-a}, the normalizer Z_{theta*}^{t^a} that the
/// rescaled stepsize sequence converges to.
double g_frak(std::span<const double> theta_star, double a);

/// Replica-averaged effective-stepsize curve: at each recorded step n,
/// mean and standard error over records of n * gamma_n^{1/alpha}.
struct StepsizeDiagnostic {
  std::vector<std::uint64_t> step;
  std::vector<double> mean;
  std::vector<double> stderr_;
  double alpha = 1.0;
  double mu = 1.0;
};
StepsizeDiagnostic stepsize_diagnostic(std::span<const RunRecord> records,
                                       double alpha, double mu);

/// Normalized curve for the alpha = 1 plots: mu * n * gamma_n / g(a) -> 1.
/// For alpha < 1 the same call with mu = 1 divides the raw curve by g(a).
std::vector<double> normalized_curve(const StepsizeDiagnostic& diag,
                                     double g_frak_value);

/// Mean and replica standard error of the curve over recorded steps with
/// n > tail_start_fraction * n_max (0.1 covers the last decade).
struct PlateauEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t tail_start = 0;
};
PlateauEstimate plateau(const StepsizeDiagnostic& diag,
                        double tail_start_fraction = 0.1);

}  // namespace shus
