// Reweighting function rho, stepsize schedule g_alpha and the log-domain
// occupation state with its two equivalent update rules.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shus {

enum class RhoFamily { constant, power, floored_power };

/// Non-decreasing reweighting function rho : (0,1) -> (0, +inf).
///   constant        rho(t) = 1
///   power           rho(t) = t^a,            a in [0,1]
///   floored_power   rho(t) = max(t, t0)^a,   a in [0,1], t0 in (0,1]
/// All built-in families satisfy sup rho <= 1; for a < 1, rho(t)/t is
/// non-increasing with rho(t)/t -> +inf as t -> 0. The a = 1 power family
/// violates the latter; it is accepted but flagged (see BiasSpec).
struct RhoSpec {
  RhoFamily family = RhoFamily::power;
  double a = 0.5;
  double t0 = 0.0;  // floored_power only

  /// rho(t) for t in (0,1); throws std::domain_error otherwise.
  double operator()(double t) const;

  /// log rho(t) evaluated from log t, without forming t. This is the form
  /// used in every hot path: t may underflow while log t stays finite.
  double log_from_log_t(double log_t) const;

  double sup() const { return 1.0; }  // all built-in families

  /// Checks monotonicity of rho and of rho(t)/t on a grid of n points, plus
  /// parameter ranges. Throws std::invalid_argument on violation.
  void validate(int grid_points = 1000) const;
};

/// Full parameter set of the adaptive schedule.
struct BiasSpec {
  RhoSpec rho;
  double alpha = 1.0;  // in (1/2, 1]
  double mu = 1.0;     // used only when alpha == 1
  double gamma = 1.0;  // > 0

  /// True when rho(t) = t exactly (power, a = 1): the linear case is allowed
  /// mechanically but sits outside the assumptions of the floored/power
  /// families with a < 1, so construction flags it instead of rejecting it.
  bool rho_linear_warning = false;

  /// Validates everything and applies defaults: absent mu -> 1, absent
  /// gamma -> gamma_of_alpha(alpha).
  static BiasSpec validated(RhoSpec rho, double alpha,
                            std::optional<double> mu = std::nullopt,
                            std::optional<double> gamma = std::nullopt);
};

/// g_alpha(s) = (ln(1+s))^(alpha/(1-alpha)) for alpha in (1/2,1),
///              s^mu for alpha = 1.
double g_alpha(const BiasSpec& spec, double s);

/// log g_alpha(S) from log S; stable when S overflows a double.
double log_g_alpha(const BiasSpec& spec, double log_s);

/// Paper-standard gamma(alpha): 1 at alpha = 1, (1-alpha)^(-alpha/(1-alpha))
/// otherwise. Keeps the stepsize-asymptotics constant equal to 1 across alpha.
double gamma_of_alpha(double alpha);

/// Discrete-time parameters equivalent to well-tempered metadynamics with
/// temperature T, bias temperature offset deltaT, deposition rate omega and
/// timestep h: alpha = 1, rho(t) = t^a.
struct WtParams {
  double gamma;
  double a;
  double mu;
  double alpha;  // always 1
};
WtParams wt_param_map(double T, double deltaT, double omega, double h);

/// Occupation vector theta~_n stored as logarithms. S_n grows without bound
/// (exponentially in n^(1-alpha) for alpha < 1), so the log representation is
/// canonical; theta_n is exposed through log_theta = log_occ - log_S.
class OccupationState {
 public:
  /// From linear occupation values (componentwise > 0).
  explicit OccupationState(std::span<const double> occ0);
  static OccupationState from_log(std::vector<double> log_occ0);

  int dim() const { return static_cast<int>(log_occ_.size()); }
  std::uint64_t iteration() const { return n_; }
  double log_s() const { return log_s_; }
  std::span<const double> log_occ() const { return log_occ_; }
  std::span<const double> log_theta() const { return log_theta_; }
  std::vector<double> theta() const;
  double theta_at(int i) const;

  /// gamma_{n+1} = gamma / g_alpha(S_n).
  double stepsize(const BiasSpec& spec) const;

  /// Additive rule: theta~_{n+1}(hit) = theta~_n(hit)
  ///                + (gamma / g_alpha(S_n)) S_n rho(theta_n(hit)).
  void shus_update(const BiasSpec& spec, int hit);

  /// Multiplicative rule: theta~_{n+1}(hit) = theta~_n(hit)
  ///                      (1 + gamma_next rho(theta_n(hit)) / theta_n(hit)).
  /// With gamma_next = gamma / g_alpha(S_n) this coincides with shus_update.
  void wl_update(double gamma_next, const RhoSpec& rho, int hit);

 private:
  OccupationState() = default;
  void refresh_log_theta();
  std::vector<double> log_occ_;
  std::vector<double> log_theta_;
  double log_s_ = 0.0;
  std::uint64_t n_ = 0;
};

}  // namespace shus
