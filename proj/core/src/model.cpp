#include "shus/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "shus/logsum.hpp"

namespace shus {

double two_well_potential(double x1, double x2) {
  const double d13 = x2 - 1.0 / 3.0;
  const double d53 = x2 - 5.0 / 3.0;
  const double xm = x1 - 1.0;
  const double xp = x1 + 1.0;
  return 3.0 * std::exp(-x1 * x1 - d13 * d13) -
         3.0 * std::exp(-x1 * x1 - d53 * d53) -
         5.0 * std::exp(-xm * xm - x2 * x2) -
         5.0 * std::exp(-xp * xp - x2 * x2) + 0.2 * x1 * x1 * x1 * x1 +
         0.2 * d13 * d13 * d13 * d13;
}

std::array<double, 2> two_well_gradient(double x1, double x2, double h) {
  return {(two_well_potential(x1 + h, x2) - two_well_potential(x1 - h, x2)) /
              (2.0 * h),
          (two_well_potential(x1, x2 + h) - two_well_potential(x1, x2 - h)) /
              (2.0 * h)};
}

ContinuousTarget::ContinuousTarget(double beta_, double R_) : beta(beta_), R(R_) {
  if (beta <= 0.0) throw std::invalid_argument("ContinuousTarget: beta must be > 0");
  if (R <= 0.0) throw std::invalid_argument("ContinuousTarget: R must be > 0");
}

double ContinuousTarget::log_density(Point2 x) const {
  if (!in_domain(x)) return neg_inf;
  return -beta * two_well_potential(x.x1, x.x2);
}

ToyTarget::ToyTarget(double epsilon_) : epsilon(epsilon_) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("ToyTarget: epsilon must be in (0,1)");
}

double ToyTarget::log_weight(int state) const {
  switch (state) {
    case 0:
    case 2:
      return 0.0;
    case 1:
      return std::log(epsilon);
    default:
      throw std::domain_error("ToyTarget: state must be in {0,1,2}");
  }
}

std::array<double, 3> ToyTarget::reference_weights() const {
  const double z = 2.0 + epsilon;
  return {1.0 / z, epsilon / z, 1.0 / z};
}

Partition::Partition(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2)
    throw std::invalid_argument("Partition: need at least two edges");
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
    if (!(edges_[i] < edges_[i + 1]))
      throw std::invalid_argument("Partition: edges must be strictly increasing");
  lo_ = edges_.front();
  hi_ = edges_.back();
}

Partition Partition::uniform(double R, int d) {
  if (R <= 0.0) throw std::invalid_argument("Partition: R must be > 0");
  if (d < 1) throw std::invalid_argument("Partition: d must be >= 1");
  std::vector<double> edges(d + 1);
  for (int l = 0; l <= d; ++l) edges[l] = -R + 2.0 * l * R / d;
  edges[0] = -R;
  edges[d] = R;
  Partition p(std::move(edges));
  p.is_uniform_ = true;
  p.width_ = 2.0 * R / d;
  return p;
}

Partition Partition::from_edges(std::vector<double> edges) {
  return Partition(std::move(edges));
}

int Partition::index_of(double x1) const {
  if (x1 < lo_ || x1 > hi_)
    throw std::domain_error("Partition: point outside [" + std::to_string(lo_) +
                            ", " + std::to_string(hi_) + "]");
  const int d = size();
  if (x1 == hi_) return d - 1;  // last interval closed on the right
  int idx;
  if (is_uniform_) {
    idx = static_cast<int>((x1 - lo_) / width_);
    if (idx >= d) idx = d - 1;
    // Guard against rounding at interior edges: enforce [a_l, a_{l+1}).
    if (x1 < edges_[idx]) --idx;
    else if (x1 >= edges_[idx + 1]) ++idx;
  } else {
    idx = 0;
    while (idx + 1 < d && x1 >= edges_[idx + 1]) ++idx;
  }
  return idx;
}

namespace {

// Composite Simpson weights on n intervals (n even) over [a, b].
void simpson_nodes(double a, double b, int n, std::vector<double>& xs,
                   std::vector<double>& ws) {
  xs.resize(n + 1);
  ws.resize(n + 1);
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    xs[i] = a + i * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    ws[i] = w * h / 3.0;
  }
}

std::vector<double> stratum_masses(const ContinuousTarget& target,
                                   const Partition& partition,
                                   const QuadratureSpec& quad, int n1, int n2) {
  const int d = partition.size();
  std::vector<double> masses(d, 0.0);
  std::vector<double> x1s, w1s, x2s, w2s;
  simpson_nodes(quad.x2_lo, quad.x2_hi, n2, x2s, w2s);
  std::vector<double> col(n2 + 1);
  for (int i = 0; i < d; ++i) {
    simpson_nodes(partition.left_edge(i), partition.right_edge(i), n1, x1s, w1s);
    double m = 0.0;
    for (int p = 0; p <= n1; ++p) {
      double row = 0.0;
      for (int q = 0; q <= n2; ++q)
        row += w2s[q] *
               std::exp(-target.beta * two_well_potential(x1s[p], x2s[q]));
      m += w1s[p] * row;
    }
    masses[i] = m;
  }
  return masses;
}

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  for (double& x : v) x /= s;
}

}  // namespace

std::vector<double> reference_weights(const ContinuousTarget& target,
                                      const Partition& partition,
                                      const QuadratureSpec& quad) {
  if (quad.n1_per_stratum < 2 || quad.n1_per_stratum % 2 != 0 ||
      quad.n2 < 2 || quad.n2 % 2 != 0)
    throw std::invalid_argument("QuadratureSpec: interval counts must be even and >= 2");

  int n1 = quad.n1_per_stratum;
  int n2 = quad.n2;
  std::vector<double> prev = stratum_masses(target, partition, quad, n1, n2);
  normalize(prev);
  // max_refinements == 0 requests the base resolution without a convergence
  // check; tests use it to compare refinement levels directly.
  if (quad.max_refinements == 0) return prev;
  for (int r = 0; r < quad.max_refinements; ++r) {
    n1 *= 2;
    n2 *= 2;
    std::vector<double> cur = stratum_masses(target, partition, quad, n1, n2);
    normalize(cur);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i)
      max_rel = std::max(max_rel, std::abs(cur[i] - prev[i]) / cur[i]);
    if (max_rel < quad.rel_tol) return cur;
    prev = std::move(cur);
  }
  throw std::runtime_error(
      "reference_weights: quadrature did not converge within max_refinements");
}

Mat3 toy_proposal_matrix() {
  return {{{2.0 / 3.0, 1.0 / 3.0, 0.0},
           {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
           {0.0, 1.0 / 3.0, 2.0 / 3.0}}};
}

Mat3 toy_transition_matrix(const std::array<double, 3>& theta, double epsilon,
                           double a) {
  for (double t : theta)
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("toy_transition_matrix: theta must lie in the open simplex");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("toy_transition_matrix: epsilon must be in (0,1)");
  if (a < 0.0 || a > 1.0)
    throw std::invalid_argument("toy_transition_matrix: a must be in [0,1]");

  const ToyTarget target(epsilon);
  const Mat3 q = toy_proposal_matrix();
  Mat3 p{};
  for (int i = 0; i < 3; ++i) {
    double off = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j == i || q[i][j] == 0.0) continue;
      // Biased target mass is pi(j) / theta(j)^a; proposal is symmetric.
      const double log_ratio = target.log_weight(j) - a * std::log(theta[j]) -
                               target.log_weight(i) + a * std::log(theta[i]);
      const double acc = std::min(1.0, std::exp(log_ratio));
      p[i][j] = q[i][j] * acc;
      off += p[i][j];
    }
    p[i][i] = 1.0 - off;
  }
  return p;
}

}  // namespace shus
