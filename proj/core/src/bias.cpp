#include "shus/bias.hpp"

#include <cmath>
#include <stdexcept>

#include "shus/logsum.hpp"

namespace shus {

double RhoSpec::operator()(double t) const {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("rho: argument must lie in (0,1)");
  switch (family) {
    case RhoFamily::constant:
      return 1.0;
    case RhoFamily::power:
      return std::pow(t, a);
    case RhoFamily::floored_power:
      return std::pow(std::max(t, t0), a);
  }
  throw std::logic_error("rho: unknown family");
}

double RhoSpec::log_from_log_t(double log_t) const {
  switch (family) {
    case RhoFamily::constant:
      return 0.0;
    case RhoFamily::power:
      return a * log_t;
    case RhoFamily::floored_power:
      return a * std::max(log_t, std::log(t0));
  }
  throw std::logic_error("rho: unknown family");
}

void RhoSpec::validate(int grid_points) const {
  switch (family) {
    case RhoFamily::constant:
      return;
    case RhoFamily::power:
      if (a < 0.0 || a > 1.0)
        throw std::invalid_argument("rho: power exponent a must be in [0,1]");
      break;
    case RhoFamily::floored_power:
      if (a < 0.0 || a > 1.0)
        throw std::invalid_argument("rho: floored-power exponent a must be in [0,1]");
      if (!(t0 > 0.0 && t0 <= 1.0))
        throw std::invalid_argument("rho: floor t0 must be in (0,1]");
      break;
  }
  // Numeric conformance check on a grid: rho non-decreasing, rho(t)/t
  // non-increasing (the latter holds for a < 1; a = 1 is flagged upstream).
  double prev_rho = 0.0, prev_ratio = 0.0;
  for (int k = 1; k <= grid_points; ++k) {
    const double t = static_cast<double>(k) / (grid_points + 1);
    const double r = (*this)(t);
    if (!(r > 0.0)) throw std::invalid_argument("rho: must be positive on (0,1)");
    if (k > 1 && r < prev_rho - 1e-15)
      throw std::invalid_argument("rho: must be non-decreasing on (0,1)");
    const double ratio = r / t;
    const bool linear = family == RhoFamily::power && a == 1.0;
    if (k > 1 && !linear && ratio > prev_ratio * (1.0 + 1e-12))
      throw std::invalid_argument("rho: rho(t)/t must be non-increasing on (0,1)");
    prev_rho = r;
    prev_ratio = ratio;
  }
}

BiasSpec BiasSpec::validated(RhoSpec rho, double alpha, std::optional<double> mu,
                             std::optional<double> gamma) {
  rho.validate();
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw std::invalid_argument("BiasSpec: alpha must be in (1/2, 1]");
  BiasSpec spec;
  spec.rho = rho;
  spec.alpha = alpha;
  spec.mu = mu.value_or(1.0);
  if (!(spec.mu > 0.0)) throw std::invalid_argument("BiasSpec: mu must be > 0");
  spec.gamma = gamma.value_or(gamma_of_alpha(alpha));
  if (!(spec.gamma > 0.0)) throw std::invalid_argument("BiasSpec: gamma must be > 0");
  spec.rho_linear_warning = rho.family == RhoFamily::power && rho.a == 1.0;
  return spec;
}

double g_alpha(const BiasSpec& spec, double s) {
  if (!(s > 0.0)) throw std::domain_error("g_alpha: s must be > 0");
  if (spec.alpha == 1.0) return std::pow(s, spec.mu);
  return std::pow(std::log1p(s), spec.alpha / (1.0 - spec.alpha));
}

double log_g_alpha(const BiasSpec& spec, double log_s) {
  if (spec.alpha == 1.0) return spec.mu * log_s;
  return (spec.alpha / (1.0 - spec.alpha)) * log_log1p_from_log(log_s);
}

double gamma_of_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw std::domain_error("gamma_of_alpha: alpha must be in (1/2, 1]");
  if (alpha == 1.0) return 1.0;
  return std::pow(1.0 - alpha, -alpha / (1.0 - alpha));
}

WtParams wt_param_map(double T, double deltaT, double omega, double h) {
  if (!(T > 0.0 && deltaT > 0.0 && omega > 0.0 && h > 0.0))
    throw std::invalid_argument("wt_param_map: all parameters must be > 0");
  WtParams p;
  p.gamma = omega * h * (T + deltaT) / (T * deltaT);
  p.a = deltaT / (T + deltaT);
  p.mu = 1.0 - p.a;
  p.alpha = 1.0;
  return p;
}

OccupationState::OccupationState(std::span<const double> occ0) {
  if (occ0.empty()) throw std::invalid_argument("OccupationState: empty occupation");
  log_occ_.reserve(occ0.size());
  for (double v : occ0) {
    if (!(v > 0.0))
      throw std::invalid_argument("OccupationState: occupation values must be > 0");
    log_occ_.push_back(std::log(v));
  }
  log_s_ = log_sum_exp(log_occ_);
  log_theta_.resize(log_occ_.size());
  refresh_log_theta();
}

OccupationState OccupationState::from_log(std::vector<double> log_occ0) {
  if (log_occ0.empty())
    throw std::invalid_argument("OccupationState: empty occupation");
  OccupationState st;
  st.log_occ_ = std::move(log_occ0);
  st.log_s_ = log_sum_exp(st.log_occ_);
  st.log_theta_.resize(st.log_occ_.size());
  st.refresh_log_theta();
  return st;
}

void OccupationState::refresh_log_theta() {
  for (std::size_t i = 0; i < log_occ_.size(); ++i)
    log_theta_[i] = log_occ_[i] - log_s_;
}

std::vector<double> OccupationState::theta() const {
  std::vector<double> t(log_theta_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::exp(log_theta_[i]);
  return t;
}

double OccupationState::theta_at(int i) const {
  return std::exp(log_theta_[i]);
}

double OccupationState::stepsize(const BiasSpec& spec) const {
  return std::exp(std::log(spec.gamma) - log_g_alpha(spec, log_s_));
}

void OccupationState::shus_update(const BiasSpec& spec, int hit) {
  const double log_gamma_next = std::log(spec.gamma) - log_g_alpha(spec, log_s_);
  const double log_inc =
      log_gamma_next + log_s_ + spec.rho.log_from_log_t(log_theta_[hit]);
  log_occ_[hit] = log_add_exp(log_occ_[hit], log_inc);
  log_s_ = log_add_exp(log_s_, log_inc);
  refresh_log_theta();
  ++n_;
}

void OccupationState::wl_update(double gamma_next, const RhoSpec& rho, int hit) {
  if (gamma_next < 0.0)
    throw std::invalid_argument("wl_update: stepsize must be >= 0");
  const double log_gamma = std::log(gamma_next);  // -inf for 0: no-op update
  const double log_rho_hit = rho.log_from_log_t(log_theta_[hit]);
  log_occ_[hit] += log1p_exp(log_gamma + log_rho_hit - log_theta_[hit]);
  log_s_ += log1p_exp(log_gamma + log_rho_hit);
  refresh_log_theta();
  ++n_;
}

}  // namespace shus
