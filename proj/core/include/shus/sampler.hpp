// The adaptive sampling loop and its stochastic-approximation decomposition.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "shus/bias.hpp"
#include "shus/kernel.hpp"
#include "shus/model.hpp"
#include "shus/rng.hpp"

namespace shus {

enum class Schedule {
  shus,       // gamma_{n+1} = gamma / g_alpha(S_n), self-tuned
  power_law,  // gamma_{n+1} = c / (n+1)^alpha, deterministic
};

struct RecordingOptions {
  std::uint64_t scalar_stride = 1;    // stepsize / hit / log_S rows
  std::uint64_t theta_stride = 1000;  // full theta snapshots
  bool record_is_weight = false;
  bool verify = false;  // per-step invariant checks; throws on violation
};

struct ModelSpec {
  enum class Kind { toy, two_well };
  Kind kind = Kind::toy;
  double epsilon = 0.1;  // toy
  double beta = 4.0;     // two_well
  double R = 1.2;
  int d = 24;

  int stratum_count() const { return kind == Kind::toy ? 3 : d; }
};

struct SamplerConfig {
  ModelSpec model;
  BiasSpec bias;
  ProposalSpec proposal{};
  Schedule schedule = Schedule::shus;
  double powerlaw_c = 1.0;
  std::uint64_t n_steps = 0;
  std::uint64_t seed = 0;
  Point2 x0{-1.0, 0.0};  // continuous initial configuration
  int x0_state = 0;      // toy initial state (0-based)
  std::vector<double> occ0;  // initial occupation; empty -> uniform 1/d
  RecordingOptions record;
  std::optional<double> exit_x1_above;  // continuous exit event marker
  std::optional<int> exit_state;        // toy exit event marker (0-based)
};

/// Time series of one adaptive run. Scalar rows are strided by
/// scalar_stride; full theta snapshots by theta_stride. Row k holds the
/// stepsize gamma_n used at step n, the stratum hit by X_n, and log S_n
/// after the occupation update of step n.
struct RunRecord {
  std::uint64_t n_steps = 0;
  std::uint64_t scalar_stride = 1;
  std::uint64_t theta_stride = 1000;
  int d = 0;

  std::vector<std::uint64_t> step;
  std::vector<double> gamma;
  std::vector<std::int32_t> hit;  // 0-based
  std::vector<double> log_s;
  std::vector<double> is_weight;  // empty unless recorded

  std::vector<std::uint64_t> theta_step;
  std::vector<double> theta_rows;  // theta_step.size() rows of d values
  std::vector<double> theta_final;

  std::optional<std::uint64_t> first_exit_step;

  /// CSV with header "n,gamma_n,hit,log_S" (hit 1-based in the file).
  void write_scalars_csv(std::ostream& os) const;
  /// Little-endian binary: uint64 d, stride, count; then count rows of
  /// d float64 theta values (snapshot k taken at step (k+1) * stride).
  void write_theta_binary(std::ostream& os) const;
};

/// Executes the adaptive loop: compute (S_n, theta_n), draw X_{n+1} from the
/// Metropolis kernel targeting pi_{theta_n}^rho, then update the occupation
/// of the stratum hit. The increment uses theta_n and S_n, not the post-move
/// values; changing that ordering silently changes the asymptotics.
/// Deterministic given the seed.
RunRecord run(const SamplerConfig& config);

/// H_i(x, theta) = rho(theta(I(x))) (1_{X_i}(x) - theta(i)); sums to zero.
std::vector<double> field_H(int hit, std::span<const double> theta,
                            const RhoSpec& rho);

/// Mean field h(theta) = (theta* - theta) / sum_i theta*(i)/rho(theta(i)),
/// the pi_theta^rho-average of H. Vanishes exactly at theta*.
std::vector<double> mean_field_h(std::span<const double> theta,
                                 std::span<const double> theta_star,
                                 const RhoSpec& rho);

/// One weight update written as theta_{n+1} = theta_n + gamma H + gamma Lambda:
/// theta_next from the exact multiplicative recursion, Lambda the residual
/// making the identity exact. |Lambda| <= sqrt(2) gamma (sup rho)^2.
struct SaStep {
  std::vector<double> theta_next;
  std::vector<double> lambda;
};
SaStep sa_decompose(std::span<const double> theta, int hit, double gamma_next,
                    const RhoSpec& rho);

namespace detail {

/// Shared driver for run() and the exit-time trials. Policy hooks:
///   bool before_update(n, gamma_n, x, hit, occ)  - pre-update state; false stops
///   void after_update(n, gamma_n, x, hit, occ)   - post-update state
template <class System, class Policy>
void adaptive_loop(const System& sys, const BiasSpec& bias, Schedule schedule,
                   double powerlaw_c, typename System::State x0,
                   OccupationState& occ, Rng& rng, std::uint64_t max_steps,
                   Policy&& policy) {
  auto x = x0;
  for (std::uint64_t n = 1; n <= max_steps; ++n) {
    const double gamma_n = schedule == Schedule::shus
                               ? occ.stepsize(bias)
                               : powerlaw_c / std::pow(static_cast<double>(n),
                                                       bias.alpha);
    x = mh_step(rng, sys, occ.log_theta(), bias.rho, x);
    const int hit = sys.stratum(x);
    if (!policy.before_update(n, gamma_n, x, hit, occ)) return;
    if (schedule == Schedule::shus)
      occ.shus_update(bias, hit);
    else
      occ.wl_update(gamma_n, bias.rho, hit);
    policy.after_update(n, gamma_n, x, hit, occ);
  }
}

ContinuousSystem make_continuous_system(const ModelSpec& model,
                                        const ProposalSpec& proposal);
ToySystem make_toy_system(const ModelSpec& model);

}  // namespace detail

}  // namespace shus
