// Metropolis-Hastings kernels targeting the biased measure pi_theta^rho.
#pragma once

#include <cmath>
#include <random>
#include <span>

#include "shus/bias.hpp"
#include "shus/logsum.hpp"
#include "shus/model.hpp"
#include "shus/rng.hpp"

namespace shus {

struct ProposalSpec {
  double sigma2 = 0.01;  // isotropic 2D Gaussian variance per coordinate

  explicit ProposalSpec(double sigma2_ = 0.01) : sigma2(sigma2_) {
    if (!(sigma2 > 0.0))
      throw std::invalid_argument("ProposalSpec: sigma2 must be > 0");
  }
};

/// y = x + sigma * (standard normal pair); symmetric in (x, y).
Point2 propose(Rng& rng, Point2 x, const ProposalSpec& prop);

/// Continuous chain: two-well target, x1 partition, Gaussian proposal.
struct ContinuousSystem {
  using State = Point2;

  ContinuousTarget target;
  Partition partition;
  ProposalSpec proposal;

  int stratum(State x) const { return partition.index_of(x.x1); }
  double log_density(State x) const { return target.log_density(x); }
  State propose_move(Rng& rng, State x) const { return propose(rng, x, proposal); }
};

/// Toy chain: three states, nearest-neighbor proposals, identity partition.
struct ToySystem {
  using State = int;

  ToyTarget target;

  int stratum(State s) const { return s; }
  double log_density(State s) const { return target.log_weight(s); }

  State propose_move(Rng& rng, State s) const {
    // Rows of the proposal matrix: jumps only between neighboring states.
    const double u = std::uniform_real_distribution<double>()(rng);
    switch (s) {
      case 0:
        return u < 2.0 / 3.0 ? 0 : 1;
      case 2:
        return u < 2.0 / 3.0 ? 2 : 1;
      default:
        return u < 1.0 / 3.0 ? 0 : (u < 2.0 / 3.0 ? 1 : 2);
    }
  }
};

/// log pi_theta^rho up to an additive constant:
/// log pi(x) - log rho(theta(I(x))), -inf outside the domain.
template <class System>
double biased_log_density(const System& sys, std::span<const double> log_theta,
                          const RhoSpec& rho, typename System::State x) {
  const double lp = sys.log_density(x);
  if (lp == neg_inf) return neg_inf;
  return lp - rho.log_from_log_t(log_theta[sys.stratum(x)]);
}

/// One Metropolis-Hastings step with target pi_theta^rho. Out-of-domain
/// proposals have zero density and are rejected. Exactly one acceptance
/// uniform is drawn per step, so with rho constant the realized path is
/// bitwise independent of theta for a fixed rng stream.
template <class System>
typename System::State mh_step(Rng& rng, const System& sys,
                               std::span<const double> log_theta,
                               const RhoSpec& rho, typename System::State x) {
  const auto y = sys.propose_move(rng, x);
  const double u = std::uniform_real_distribution<double>()(rng);
  const double log_py = sys.log_density(y);
  if (log_py == neg_inf) return x;
  const double delta = (log_py - rho.log_from_log_t(log_theta[sys.stratum(y)])) -
                       (sys.log_density(x) -
                        rho.log_from_log_t(log_theta[sys.stratum(x)]));
  if (std::log(u) < delta) return y;
  return x;
}

}  // namespace shus
