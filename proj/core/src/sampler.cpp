#include "shus/sampler.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "shus/csv.hpp"
#include "shus/estimators.hpp"

namespace shus {

std::vector<double> field_H(int hit, std::span<const double> theta,
                            const RhoSpec& rho) {
  const double rho_hit = rho(theta[hit]);
  std::vector<double> h(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    h[i] = rho_hit * ((static_cast<int>(i) == hit ? 1.0 : 0.0) - theta[i]);
  return h;
}

std::vector<double> mean_field_h(std::span<const double> theta,
                                 std::span<const double> theta_star,
                                 const RhoSpec& rho) {
  if (theta.size() != theta_star.size())
    throw std::invalid_argument("mean_field_h: dimension mismatch");
  double z = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    z += theta_star[i] / rho(theta[i]);
  std::vector<double> h(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    h[i] = (theta_star[i] - theta[i]) / z;
  return h;
}

SaStep sa_decompose(std::span<const double> theta, int hit, double gamma_next,
                    const RhoSpec& rho) {
  const double rho_hit = rho(theta[hit]);
  const double denom = 1.0 + gamma_next * rho_hit;
  SaStep out;
  out.theta_next.resize(theta.size());
  out.lambda.resize(theta.size());
  const double lam_coeff = gamma_next * rho_hit * rho_hit / denom;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double ind = static_cast<int>(i) == hit ? 1.0 : 0.0;
    out.theta_next[i] = (theta[i] + gamma_next * rho_hit * ind) / denom;
    out.lambda[i] = lam_coeff * (theta[i] - ind);
  }
  return out;
}

namespace detail {

ContinuousSystem make_continuous_system(const ModelSpec& model,
                                        const ProposalSpec& proposal) {
  return ContinuousSystem{ContinuousTarget(model.beta, model.R),
                          Partition::uniform(model.R, model.d), proposal};
}

ToySystem make_toy_system(const ModelSpec& model) {
  return ToySystem{ToyTarget(model.epsilon)};
}

}  // namespace detail

namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Recording + optional invariant verification for run().
struct RecordingPolicy {
  RunRecord& rec;
  const SamplerConfig& cfg;
  const BiasSpec& bias;

  RecordingPolicy(RunRecord& rec_, const SamplerConfig& cfg_,
                  const BiasSpec& bias_)
      : rec(rec_), cfg(cfg_), bias(bias_) {}

  double prev_gamma = std::numeric_limits<double>::infinity();
  double prev_log_s = neg_inf;
  std::vector<double> pre_theta;  // verify / is-weight scratch
  double pending_is_weight = 0.0;

  bool scalar_row(std::uint64_t n) const {
    return n % rec.scalar_stride == 0;
  }

  bool exited(const Point2& x) const {
    return cfg.exit_x1_above && x.x1 > *cfg.exit_x1_above;
  }
  bool exited(int x) const { return cfg.exit_state && x == *cfg.exit_state; }

  template <class State>
  bool before_update(std::uint64_t n, double /*gamma_n*/, const State& x,
                     int hit, const OccupationState& occ) {
    if (!rec.first_exit_step && exited(x)) rec.first_exit_step = n;
    const bool row = scalar_row(n);
    if (cfg.record.record_is_weight && row)
      pending_is_weight =
          instantaneous_is_weight(occ.log_theta(), bias.rho, hit);
    if (cfg.record.verify) pre_theta = occ.theta();
    return true;
  }

  template <class State>
  void after_update(std::uint64_t n, double gamma_n, const State&, int hit,
                    const OccupationState& occ) {
    if (cfg.record.verify) verify_step(n, gamma_n, hit, occ);
    if (scalar_row(n)) {
      rec.step.push_back(n);
      rec.gamma.push_back(gamma_n);
      rec.hit.push_back(hit);
      rec.log_s.push_back(occ.log_s());
      if (cfg.record.record_is_weight) rec.is_weight.push_back(pending_is_weight);
    }
    if (n % rec.theta_stride == 0) {
      rec.theta_step.push_back(n);
      const auto th = occ.theta();
      rec.theta_rows.insert(rec.theta_rows.end(), th.begin(), th.end());
    }
    prev_gamma = gamma_n;
    prev_log_s = occ.log_s();
  }

  void verify_step(std::uint64_t n, double gamma_n, int hit,
                   const OccupationState& occ) {
    if (gamma_n > prev_gamma * (1.0 + 1e-12))
      throw std::runtime_error("verify: stepsize increased at step " +
                               std::to_string(n));
    if (occ.log_s() <= prev_log_s)
      throw std::runtime_error("verify: S_n not strictly increasing at step " +
                               std::to_string(n));
    const auto post = occ.theta();
    double sum = 0.0;
    for (double t : post) {
      if (!(t > 0.0))
        throw std::runtime_error("verify: theta left the open simplex at step " +
                                 std::to_string(n));
      sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::runtime_error("verify: theta sum drifted at step " +
                               std::to_string(n));
    const auto sa = sa_decompose(pre_theta, hit, gamma_n, bias.rho);
    const double sup_rho = bias.rho.sup();
    if (l2_norm(sa.lambda) >
        std::sqrt(2.0) * gamma_n * sup_rho * sup_rho * (1.0 + 1e-12))
      throw std::runtime_error("verify: Lambda bound violated at step " +
                               std::to_string(n));
    for (std::size_t i = 0; i < post.size(); ++i)
      if (std::abs(sa.theta_next[i] - post[i]) > 1e-9)
        throw std::runtime_error(
            "verify: multiplicative recursion mismatch at step " +
            std::to_string(n));
  }
};

template <class System>
RunRecord run_impl(const System& sys, typename System::State x0,
                   const SamplerConfig& cfg) {
  const int d = cfg.model.stratum_count();
  std::vector<double> occ0 = cfg.occ0;
  if (occ0.empty()) occ0.assign(d, 1.0 / d);
  if (static_cast<int>(occ0.size()) != d)
    throw std::invalid_argument("run: occ0 size does not match stratum count");
  OccupationState occ(occ0);

  RunRecord rec;
  rec.n_steps = cfg.n_steps;
  rec.scalar_stride = std::max<std::uint64_t>(1, cfg.record.scalar_stride);
  rec.theta_stride = std::max<std::uint64_t>(1, cfg.record.theta_stride);
  rec.d = d;
  const std::uint64_t n_rows = cfg.n_steps / rec.scalar_stride;
  rec.step.reserve(n_rows);
  rec.gamma.reserve(n_rows);
  rec.hit.reserve(n_rows);
  rec.log_s.reserve(n_rows);

  Rng rng(cfg.seed);
  RecordingPolicy policy{rec, cfg, cfg.bias};
  detail::adaptive_loop(sys, cfg.bias, cfg.schedule, cfg.powerlaw_c, x0, occ,
                        rng, cfg.n_steps, policy);
  rec.theta_final = occ.theta();
  return rec;
}

}  // namespace

RunRecord run(const SamplerConfig& cfg) {
  if (cfg.n_steps < 1) throw std::invalid_argument("run: n_steps must be >= 1");
  if (cfg.model.kind == ModelSpec::Kind::toy) {
    const auto sys = detail::make_toy_system(cfg.model);
    if (cfg.x0_state < 0 || cfg.x0_state >= ToyTarget::n_states)
      throw std::invalid_argument("run: toy initial state out of range");
    return run_impl(sys, cfg.x0_state, cfg);
  }
  const auto sys = detail::make_continuous_system(cfg.model, cfg.proposal);
  if (!sys.target.in_domain(cfg.x0))
    throw std::invalid_argument("run: initial configuration outside the domain");
  return run_impl(sys, cfg.x0, cfg);
}

void RunRecord::write_scalars_csv(std::ostream& os) const {
  os << "n,gamma_n,hit,log_S\n";
  for (std::size_t k = 0; k < step.size(); ++k) {
    os << step[k] << ',' << format_double(gamma[k]) << ',' << (hit[k] + 1)
       << ',' << format_double(log_s[k]) << '\n';
  }
}

void RunRecord::write_theta_binary(std::ostream& os) const {
  const std::uint64_t header[3] = {static_cast<std::uint64_t>(d), theta_stride,
                                   static_cast<std::uint64_t>(theta_step.size())};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  os.write(reinterpret_cast<const char*>(theta_rows.data()),
           static_cast<std::streamsize>(theta_rows.size() * sizeof(double)));
}

}  // namespace shus
