// Target distributions, stratum partitions and reference weights.
#pragma once

#include <array>
#include <span>
#include <vector>

namespace shus {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Two-well surface on R^2: two deep minima near (+-1.05, -0.04) separated by
/// a saddle region around x1 = 0, with quartic confinement in both directions.
double two_well_potential(double x1, double x2);

/// Gradient by central differences; used by tests and diagnostics only.
std::array<double, 2> two_well_gradient(double x1, double x2, double h = 1e-6);

/// Boltzmann-type target on [-R, R] x R, density proportional to
/// exp(-beta * V(x)) restricted to |x1| <= R. Densities are unnormalized
/// throughout; the normalization constant is never computed.
struct ContinuousTarget {
  double beta = 1.0;  // inverse temperature
  double R = 1.2;     // half-width of the x1 domain

  ContinuousTarget(double beta_, double R_);

  bool in_domain(Point2 x) const { return x.x1 >= -R && x.x1 <= R; }

  /// log unnormalized density: -beta * V(x) inside, -inf outside.
  double log_density(Point2 x) const;
};

/// Three-state target with two dominant states separated by a rarely visited
/// middle state of weight epsilon / (2 + epsilon). States are 0-based {0,1,2}.
struct ToyTarget {
  double epsilon = 0.1;

  explicit ToyTarget(double epsilon_);

  static constexpr int n_states = 3;

  /// log unnormalized weight: {1, epsilon, 1}.
  double log_weight(int state) const;

  /// Exact stratum weights theta* = (1, eps, 1) / (2 + eps).
  std::array<double, 3> reference_weights() const;
};

/// Uniform grid of d strata over [-R, R]: edges a_l = -R + 2 (l-1) R / d.
/// Intervals are half-open [a_l, a_{l+1}) with the last one closed at R, so
/// every in-domain point maps to exactly one index.
class Partition {
 public:
  static Partition uniform(double R, int d);
  static Partition from_edges(std::vector<double> edges);

  int size() const { return static_cast<int>(edges_.size()) - 1; }
  double left_edge(int i) const { return edges_[i]; }
  double right_edge(int i) const { return edges_[i + 1]; }
  std::span<const double> edges() const { return edges_; }

  /// 0-based stratum index of x1. Throws std::domain_error outside
  /// [edges.front(), edges.back()]. File outputs use 1-based indices.
  int index_of(double x1) const;

 private:
  explicit Partition(std::vector<double> edges);
  std::vector<double> edges_;
  double lo_ = 0.0, hi_ = 0.0, width_ = 0.0;
  bool is_uniform_ = false;
};

/// Tensor-product composite Simpson rule for the per-stratum masses of the
/// continuous target. The x2 axis is truncated to [x2_lo, x2_hi]; the quartic
/// growth of the potential makes the discarded tail negligible for beta >= 1.
struct QuadratureSpec {
  double x2_lo = -5.0;
  double x2_hi = 6.0;
  int n1_per_stratum = 32;  // Simpson intervals per stratum in x1 (even)
  int n2 = 512;             // Simpson intervals in x2 (even)
  double rel_tol = 1e-8;    // stop when refinement changes weights less than this
  int max_refinements = 6;
};

/// Reference stratum weights theta*(i) = integral of pi over stratum i,
/// normalized to sum 1. Node counts are doubled per axis until the
/// componentwise relative change drops below rel_tol; throws
/// std::runtime_error if max_refinements is exhausted first.
/// max_refinements == 0 returns the base resolution unchecked.
std::vector<double> reference_weights(const ContinuousTarget& target,
                                      const Partition& partition,
                                      const QuadratureSpec& quad = {});

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Nearest-neighbor proposal matrix of the toy chain (rows 0,1,2).
Mat3 toy_proposal_matrix();

/// Exact Metropolis-Hastings transition matrix on {0,1,2} targeting
/// pi_theta^{t^a}, i.e. stratum i reweighted by theta(i)^{-a}. Rows sum to 1
/// and the matrix is in detailed balance with its target.
Mat3 toy_transition_matrix(const std::array<double, 3>& theta, double epsilon,
                           double a);

}  // namespace shus
