#pragma once

#include <vector>

#include <Eigen/Dense>

#include "compgrad/comparator.hpp"
#include "compgrad/dp.hpp"
#include "compgrad/geometry.hpp"
#include "compgrad/rng.hpp"

namespace compgrad {

// Per-coordinate record of the refinement stage. Index j refers to column j
// of the frame built around the coarse direction; entry 0 (the coarse
// direction itself) keeps its defaults.
struct CoordinateLog {
  int sign = 1;               // orientation fixed for this column
  double cap = 1.0;           // final ratio cap l_j from the doubling search
  double alpha = 0.0;         // estimated gradient ratio along this column
  int search_depth = 0;       // binary-search iterations spent
  bool cap_overflow = false;  // doubling hit the failsafe bound (bad run)
};

struct StageLog {
  // Coarse stage: sign chosen for each column of the random frame, and the
  // resulting averaged direction.
  std::vector<int> coarse_signs;
  Eigen::VectorXd coarse_direction;
  // Refinement stage (empty for estimate_constant).
  std::vector<CoordinateLog> coordinates;
  double cap_sum_squares = 0.0;  // sum of final l_j^2 over j >= 1
};

struct EstimateResult {
  UnitVector direction;
  long long queries_used = 0;
  StageLog stage_log;
};

// Coarse gradient-direction estimate. Draws a uniformly random orthonormal
// frame, orients each column with one directional-preference probe at
// resolution gamma/n, and averages: u = (1/sqrt(n)) sum_i v_i. Uses exactly
// n comparison queries; with probability >= 2/3 over the frame draw the
// output satisfies <u, g> >= 1/10 for the normalized gradient g.
EstimateResult estimate_constant(ComparisonOracle& oracle,
                                 const Eigen::VectorXd& x, double gamma,
                                 double L, Rng& rng);

// Full gradient-direction estimate to precision epsilon. Runs the coarse
// stage, rotates so its output u is the first basis vector, orients the
// remaining columns (probes at gamma/n), then per column finds the gradient
// ratio g_j/g_1: a doubling search brackets its magnitude, and a binary
// search at resolution epsilon*gamma/(400 sqrt(n)) narrows it to width
// epsilon/(4 sqrt(n)). The assembled unit vector (1, alpha_2, ..., alpha_n)
// normalized, expressed in ambient coordinates, satisfies
// ||direction - g|| <= epsilon with probability >= 2/3 (inherited from the
// coarse stage; refinement is deterministic given the frame). Query count is
// O(n log(1/epsilon)).
//
// If the coarse stage fails badly (g_1 <= 0 along u), the doubling search
// has no certified exit; a failsafe cap at 64 sqrt(n) (never reached on good
// runs, where caps stay below ~21 sqrt(n)) forces termination and is flagged
// in the stage log. The estimator still runs to completion and returns its
// best direction.
//
// n = 1 degenerate case: one probe at resolution gamma/2 determines the sign
// of the derivative (|f'(x)| >= gamma makes the verdict unambiguous), and
// the result is +e1 or -e1.
EstimateResult estimate(ComparisonOracle& oracle, const Eigen::VectorXd& x,
                        double epsilon, double gamma, double L, Rng& rng);

}  // namespace compgrad
