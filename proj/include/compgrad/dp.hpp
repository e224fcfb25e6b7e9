#pragma once

#include <Eigen/Dense>

#include "compgrad/comparator.hpp"
#include "compgrad/geometry.hpp"

namespace compgrad {

enum class DpKind {
  AtLeastMinusDelta,  // <grad f(x), v> >= -delta
  AtMostDelta,        // <grad f(x), v> <=  delta
};

// Verdict of one directional-preference probe. Whichever side comes back,
// the stated inequality is guaranteed by L-smoothness alone (it is not
// probabilistic, and it holds under every tie policy); when the true inner
// product lies in [-delta, delta] both inequalities are true and either
// verdict is acceptable.
struct DpVerdict {
  DpKind kind = DpKind::AtMostDelta;
  double delta = 0.0;
  UnitVector direction;
  Eigen::VectorXd point;
  // The probe stepped outside the declared domain ball. The verdict is
  // still returned (smoothness holds along the whole segment); flagged so
  // callers can see when the domain's gamma certificate no longer applies.
  bool left_domain = false;

  // Whether the guaranteed inequality holds for a given gradient, with an
  // optional floating-point slack.
  bool holds_for(const Eigen::VectorXd& grad, double slack = 0.0) const {
    const double d = direction.dot(grad);
    return kind == DpKind::AtLeastMinusDelta ? d >= -delta - slack
                                             : d <= delta + slack;
  }
};

// One comparison query at probe point x + (2 delta / L) v. An answer of +1
// (f went up, or tie resolved up) certifies <grad f(x), v> >= -delta: if the
// inner product were below -delta, smoothness would force a strict decrease
// and the oracle could not answer +1. Symmetrically -1 certifies <= delta.
DpVerdict dp(ComparisonOracle& oracle, const Eigen::VectorXd& x,
             const UnitVector& v, double delta, double L);

}  // namespace compgrad
