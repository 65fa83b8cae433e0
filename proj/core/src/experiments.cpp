#include "shus/experiments.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "shus/logsum.hpp"
#include "shus/rng.hpp"

namespace shus {

namespace {

template <class Pred>
struct StopOnExitPolicy {
  Pred pred;
  std::uint64_t exit_step = 0;

  template <class State>
  bool before_update(std::uint64_t n, double, const State& x, int,
                     const OccupationState&) {
    if (pred(x)) {
      exit_step = n;
      return false;
    }
    return true;
  }
  template <class State>
  void after_update(std::uint64_t, double, const State&, int,
                    const OccupationState&) {}
};

}  // namespace

ExitResult exit_time_trial_toy(double epsilon, const BiasSpec& bias,
                               std::uint64_t seed, std::uint64_t cap) {
  const ToySystem sys{ToyTarget(epsilon)};
  const std::vector<double> occ0(3, 1.0 / 3.0);
  OccupationState occ(occ0);
  Rng rng(seed);
  auto pred = [](int s) { return s == 2; };
  StopOnExitPolicy<decltype(pred)> policy{pred};
  detail::adaptive_loop(sys, bias, Schedule::shus, 0.0, 0, occ, rng, cap,
                        policy);
  if (policy.exit_step == 0) return {cap, true};
  return {policy.exit_step, false};
}

ExitResult exit_time_trial_2d(const Exit2dParams& params, std::uint64_t seed,
                              std::uint64_t cap) {
  const ContinuousSystem sys{ContinuousTarget(params.beta, params.R),
                             Partition::uniform(params.R, params.d),
                             params.proposal};
  const std::vector<double> occ0(params.d, 1.0 / params.d);
  OccupationState occ(occ0);
  Rng rng(seed);
  const double threshold = params.exit_x1;
  auto pred = [threshold](const Point2& x) { return x.x1 > threshold; };
  StopOnExitPolicy<decltype(pred)> policy{pred};
  detail::adaptive_loop(sys, params.bias, Schedule::shus, 0.0, params.x0, occ,
                        rng, cap, policy);
  if (policy.exit_step == 0) return {cap, true};
  return {policy.exit_step, false};
}

double toy_deterministic_log_u(std::uint64_t n, const BiasSpec& bias) {
  const double log_23 = std::log(2.0 / 3.0);
  const double log_gamma = std::log(bias.gamma);
  double log_u = std::log(1.0 / 3.0);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double log_s = log_add_exp(log_u, log_23);  // ln(u_k + 2/3)
    // ln(3u/(3u+2)) = ln u - ln(u + 2/3)
    const double log_inc = log_gamma - log_g_alpha(bias, log_s) + log_s +
                           bias.rho.a * (log_u - log_s);
    log_u = log_add_exp(log_u, log_inc);
  }
  return log_u;
}

double toy_deterministic_u(std::uint64_t n, const BiasSpec& bias) {
  return std::exp(toy_deterministic_log_u(n, bias));
}

SlopeFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 matched points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-14 * n * sxx)
    throw std::invalid_argument("linear_fit: degenerate grid");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.slope * x[i] - fit.intercept;
    r2 += e * e;
  }
  fit.residual_norm = std::sqrt(r2);
  fit.n_points = static_cast<int>(x.size());
  return fit;
}

namespace {

std::vector<double> log_of(std::span<const double> v, const char* what) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0))
      throw std::invalid_argument(std::string(what) + ": values must be > 0");
    out[i] = std::log(v[i]);
  }
  return out;
}

}  // namespace

SlopeFit fit_exp_slope(std::span<const double> betas,
                       std::span<const double> mean_times) {
  if (betas.size() < 3)
    throw std::invalid_argument("fit_exp_slope: need >= 3 grid points");
  const auto ly = log_of(mean_times, "fit_exp_slope");
  return linear_fit(betas, ly);
}

SlopeFit fit_loglog_slope(std::span<const double> betas,
                          std::span<const double> mean_times) {
  if (betas.size() < 3)
    throw std::invalid_argument("fit_loglog_slope: need >= 3 grid points");
  const auto lx = log_of(betas, "fit_loglog_slope");
  const auto ly = log_of(mean_times, "fit_loglog_slope");
  return linear_fit(lx, ly);
}

std::vector<CampaignRow> campaign(const ExitCampaignSpec& spec, int jobs) {
  if (spec.grid.empty()) throw std::invalid_argument("campaign: empty grid");
  if (spec.replicas < 1)
    throw std::invalid_argument("campaign: replicas must be >= 1");
  const bool toy = spec.model.kind == ModelSpec::Kind::toy;
  const std::uint64_t cap =
      spec.cap != 0 ? spec.cap
                    : (toy ? std::uint64_t{1000000000} : std::uint64_t{100000000});

  const std::size_t n_grid = spec.grid.size();
  const std::size_t n_rep = static_cast<std::size_t>(spec.replicas);
  std::vector<ExitResult> results(n_grid * n_rep);

  auto trial = [&](std::size_t g, std::size_t r) {
    const std::uint64_t seed = derive_seed(spec.master_seed, g, r);
    if (toy) {
      return exit_time_trial_toy(spec.grid[g], spec.bias, seed, cap);
    }
    Exit2dParams p;
    p.beta = spec.grid[g];
    p.R = spec.model.R;
    p.d = spec.model.d;
    p.bias = spec.bias;
    p.proposal = spec.proposal;
    return exit_time_trial_2d(p, seed, cap);
  };

  unsigned n_workers = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::thread::hardware_concurrency();
  if (n_workers == 0) n_workers = 1;
  std::atomic<std::size_t> next{0};
  const std::size_t n_tasks = results.size();
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < n_tasks;
         t = next.fetch_add(1))
      results[t] = trial(t / n_rep, t % n_rep);
  };
  if (n_workers == 1 || n_tasks == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<CampaignRow> rows;
  rows.reserve(n_grid);
  for (std::size_t g = 0; g < n_grid; ++g) {
    CampaignRow row;
    row.grid_value = spec.grid[g];
    row.replicas = spec.replicas;
    double sum = 0.0, sum2 = 0.0;
    std::size_t used = 0;
    for (std::size_t r = 0; r < n_rep; ++r) {
      const auto& res = results[g * n_rep + r];
      if (res.capped) {
        ++row.capped;
        continue;
      }
      const auto s = static_cast<double>(res.steps);
      sum += s;
      sum2 += s * s;
      ++used;
    }
    if (used > 0) {
      row.mean = sum / static_cast<double>(used);
      if (used > 1) {
        const double var = std::max(
            0.0, (sum2 - used * row.mean * row.mean) / (used - 1.0));
        row.stderr_ = std::sqrt(var / static_cast<double>(used));
      }
      row.stderr_flagged =
          row.mean > 0.0 && row.stderr_ / row.mean > spec.stderr_warn_fraction;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shus
