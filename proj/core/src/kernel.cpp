#include "shus/kernel.hpp"

namespace shus {

Point2 propose(Rng& rng, Point2 x, const ProposalSpec& prop) {
  std::normal_distribution<double> normal;
  const double sigma = std::sqrt(prop.sigma2);
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  return {x.x1 + sigma * z1, x.x2 + sigma * z2};
}

}  // namespace shus
