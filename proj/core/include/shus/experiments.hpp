// Exit-time campaign drivers and slope fits.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shus/bias.hpp"
#include "shus/kernel.hpp"
#include "shus/sampler.hpp"

namespace shus {

struct ExitResult {
  std::uint64_t steps = 0;
  bool capped = false;  // cap reached before exit; data, not an error
};

/// First iteration at which the toy chain started at state 0 with uniform
/// occupation reaches state 2.
ExitResult exit_time_trial_toy(double epsilon, const BiasSpec& bias,
                               std::uint64_t seed, std::uint64_t cap);

struct Exit2dParams {
  double beta = 4.0;
  double R = 1.2;
  int d = 24;
  BiasSpec bias;
  ProposalSpec proposal{0.01};
  Point2 x0{-1.0, 0.0};
  double exit_x1 = 1.0;  // stop at the first step with x1 > exit_x1
};

/// First iteration at which the two-well chain crosses to the right well.
ExitResult exit_time_trial_2d(const Exit2dParams& params, std::uint64_t seed,
                              std::uint64_t cap);

/// Deterministic occupation growth of the stratum the chain is trapped in:
/// u_{k+1} = u_k + gamma (u_k + 2/3) / g_alpha(u_k + 2/3)
///                 * (3 u_k / (3 u_k + 2))^a,   u_0 = 1/3.
/// Iterated in log space; u_n overflows a double for long alpha < 1 runs,
/// so the log variant is the primitive.
double toy_deterministic_log_u(std::uint64_t n, const BiasSpec& bias);
double toy_deterministic_u(std::uint64_t n, const BiasSpec& bias);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
  int n_points = 0;
};

/// Least squares y ~ slope x + intercept.
SlopeFit linear_fit(std::span<const double> x, std::span<const double> y);

/// ln(mean time) against beta: exponential scaling t ~ e^{r beta}.
SlopeFit fit_exp_slope(std::span<const double> betas,
                       std::span<const double> mean_times);

/// ln(mean time) against ln(beta): power-law scaling t ~ beta^s.
SlopeFit fit_loglog_slope(std::span<const double> betas,
                          std::span<const double> mean_times);

struct ExitCampaignSpec {
  ModelSpec model;  // grid overrides epsilon (toy) or beta (two_well)
  std::vector<double> grid;
  BiasSpec bias;
  ProposalSpec proposal{0.01};
  int replicas = 100;
  std::uint64_t cap = 0;  // 0 -> 1e9 (toy) or 1e8 (two_well)
  std::uint64_t master_seed = 0;
  double stderr_warn_fraction = 0.05;
};

struct CampaignRow {
  double grid_value = 0.0;
  int replicas = 0;
  double mean = 0.0;     // over non-capped trials
  double stderr_ = 0.0;  // sample standard error of the mean
  std::uint64_t capped = 0;
  bool stderr_flagged = false;  // stderr/mean above the warn fraction
};

/// Runs replicas of every grid point on a bounded worker pool. Trial seeds
/// come from derive_seed(master, grid index, replica index), and results are
/// merged in (grid, replica) order, so the table is reproducible regardless
/// of scheduling. jobs <= 0 selects the hardware thread count.
std::vector<CampaignRow> campaign(const ExitCampaignSpec& spec, int jobs = 0);

}  // namespace shus
