#include "shus/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace shus {

double instantaneous_is_weight(std::span<const double> log_theta,
                               const RhoSpec& rho, int hit) {
  double z = 0.0;
  for (double lt : log_theta) z += std::exp(lt - rho.log_from_log_t(lt));
  return z * std::exp(rho.log_from_log_t(log_theta[hit]));
}

void online_is_update(OnlineIsAccumulator& acc,
                      std::span<const double> theta_prev, int hit,
                      double f_value, const RhoSpec& rho) {
  double z = 0.0;
  for (double t : theta_prev) z += t / rho(t);
  acc.weighted_sum += z * rho(theta_prev[hit]) * f_value;
  ++acc.count;
}

double static_is_estimate(std::span<const StratumSample> samples,
                          std::span<const double> theta_star, double a) {
  if (samples.empty())
    throw std::invalid_argument("static_is_estimate: empty sample list");
  double z = 0.0;
  for (double t : theta_star) z += std::pow(t, 1.0 - a);
  double acc = 0.0;
  for (const auto& s : samples)
    acc += std::pow(theta_star[s.stratum], a) * s.f_value;
  return z * acc / static_cast<double>(samples.size());
}

double ess(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("ess: empty weight list");
  double sum = 0.0, sum2 = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("ess: weights must be positive");
    sum += w;
    sum2 += w * w;
  }
  return sum * sum / sum2;
}

double ef_limit(std::span<const double> theta_star, double a) {
  // a = 0 reduces to 1/(sum theta*)^2, identically 1 for a probability
  // vector; return it exactly rather than through rounded pow calls.
  if (a == 0.0) return 1.0;
  double lo = 0.0, hi = 0.0;
  for (double t : theta_star) {
    lo += std::pow(t, 1.0 - a);
    hi += std::pow(t, 1.0 + a);
  }
  return 1.0 / (lo * hi);
}

double g_frak(std::span<const double> theta_star, double a) {
  double s = 0.0;
  for (double t : theta_star) s += std::pow(t, 1.0 - a);
  return s;
}

StepsizeDiagnostic stepsize_diagnostic(std::span<const RunRecord> records,
                                       double alpha, double mu) {
  if (records.empty())
    throw std::invalid_argument("stepsize_diagnostic: no records");
  const auto& first = *records.begin();
  for (const auto& r : records)
    if (r.step.size() != first.step.size() ||
        r.scalar_stride != first.scalar_stride)
      throw std::invalid_argument(
          "stepsize_diagnostic: records have mismatched recording grids");

  StepsizeDiagnostic diag;
  diag.alpha = alpha;
  diag.mu = mu;
  diag.step = first.step;
  const std::size_t n_rows = first.step.size();
  const std::size_t n_rec = records.size();
  diag.mean.assign(n_rows, 0.0);
  diag.stderr_.assign(n_rows, 0.0);
  std::vector<double> sum(n_rows, 0.0), sum2(n_rows, 0.0);
  for (const auto& r : records) {
    for (std::size_t k = 0; k < n_rows; ++k) {
      const double q = static_cast<double>(r.step[k]) *
                       std::pow(r.gamma[k], 1.0 / alpha);
      sum[k] += q;
      sum2[k] += q * q;
    }
  }
  for (std::size_t k = 0; k < n_rows; ++k) {
    const double m = sum[k] / n_rec;
    diag.mean[k] = m;
    if (n_rec > 1) {
      const double var =
          std::max(0.0, (sum2[k] - n_rec * m * m) / (n_rec - 1.0));
      diag.stderr_[k] = std::sqrt(var / n_rec);
    }
  }
  return diag;
}

std::vector<double> normalized_curve(const StepsizeDiagnostic& diag,
                                     double g_frak_value) {
  const double scale =
      (diag.alpha == 1.0 ? diag.mu : 1.0) / g_frak_value;
  std::vector<double> out(diag.mean.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = scale * diag.mean[k];
  return out;
}

PlateauEstimate plateau(const StepsizeDiagnostic& diag,
                        double tail_start_fraction) {
  if (diag.step.empty()) throw std::invalid_argument("plateau: empty diagnostic");
  const std::uint64_t n_max = diag.step.back();
  const auto start = static_cast<std::uint64_t>(tail_start_fraction *
                                                static_cast<double>(n_max));
  double sum = 0.0, sum_se2 = 0.0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < diag.step.size(); ++k) {
    if (diag.step[k] <= start) continue;
    sum += diag.mean[k];
    sum_se2 += diag.stderr_[k] * diag.stderr_[k];
    ++cnt;
  }
  if (cnt == 0) throw std::invalid_argument("plateau: tail window is empty");
  PlateauEstimate est;
  est.mean = sum / cnt;
  // Replica noise dominates and is common across nearby steps; report the
  // average per-step replica standard error rather than dividing by cnt.
  est.stderr_ = std::sqrt(sum_se2 / cnt);
  est.tail_start = start;
  return est;
}

}  // namespace shus
