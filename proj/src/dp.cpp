#include "compgrad/dp.hpp"

#include <cmath>
#include <stdexcept>

namespace compgrad {

DpVerdict dp(ComparisonOracle& oracle, const Eigen::VectorXd& x,
             const UnitVector& v, double delta, double L) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("dp: delta must be positive and finite");
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("dp: L must be positive and finite");
  if (x.size() != v.dimension() || v.dimension() != oracle.dimension())
    throw std::invalid_argument("dp: dimension mismatch");

  const Eigen::VectorXd probe = x + (2.0 * delta / L) * v.vec();
  const int answer = oracle.compare(probe, x);

  DpVerdict verdict{answer == 1 ? DpKind::AtLeastMinusDelta : DpKind::AtMostDelta,
                    delta, v, x, false};
  // No clipping: shrinking the step would change the certified bound. The
  // flag just records that the probe left the ball where gamma is declared.
  verdict.left_domain = !oracle.model().in_domain(probe);
  return verdict;
}

}  // namespace compgrad
