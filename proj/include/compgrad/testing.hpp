#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "compgrad/comparator.hpp"
#include "compgrad/dp.hpp"
#include "compgrad/geometry.hpp"
#include "compgrad/rng.hpp"

namespace compgrad {

enum class TestAnswer { Yes, No };

const char* test_answer_name(TestAnswer answer);

// Alignment decision problem: at a point x with ||grad f(x)|| >= gamma,
// decide whether the normalized gradient lies within distance epsilon of a
// target unit direction v (Yes) or farther than 2*epsilon from it (No).
// Distances strictly between the two bands carry no promise; the testers
// still terminate on such inputs but the answer is unspecified.
struct TestParams {
  double epsilon = 0.1;        // promise band edge, must lie in (0, 1/sqrt(2))
  double gamma = 1.0;          // lower bound on the gradient norm, > 0
  double failure = 1.0 / 3.0;  // allowed failure probability (randomized tester)
  bool record_trace = false;   // attach per-run diagnostics to the verdict
};

// Diagnostics of one randomized-tester run.
struct RandomizedTrace {
  long long below_count = 0;  // probes that certified the "<= delta" side
  long long iterations = 0;   // total probes T
  double delta = 0.0;         // probe resolution used
  // Decision rule: Yes iff threshold_den * below_count >= threshold_num *
  // iterations, evaluated in exact integer arithmetic.
  long long threshold_num = 63;
  long long threshold_den = 80;
};

// Diagnostics of one deterministic-tester run. Index j of `signs` and `caps`
// refers to column j of the frame whose column 0 is the target direction;
// entry 0 is never flipped / never capped and stays at its initial value.
struct DeterministicTrace {
  std::vector<int> signs;         // per-column orientation in {-1, +1}
  std::vector<double> caps;       // final ratio caps l_j
  bool probe_shortcut = false;    // aggregate probe certified low overlap -> No
  bool cap_budget_exceeded = false;  // sum of l_j^2 crossed the Yes budget -> No
};

struct TestVerdict {
  TestAnswer answer = TestAnswer::No;
  long long queries_used = 0;
  std::optional<RandomizedTrace> randomized;
  std::optional<DeterministicTrace> deterministic;
};

// Randomized alignment tester. Uses exactly T = ceil(800 ln(1/failure))
// comparison queries regardless of n (879 at the default failure = 1/3) and
// decides correctly on promise instances with probability at least
// 1 - failure at the default setting. Requires n >= 6.
//
// Each iteration draws y uniformly from the unit sphere of the hyperplane
// orthogonal to v, forms the tilted probe direction
//   alpha = (-a * v + sqrt(1 - a^2 relative scale) * y) normalized, with
//   a = epsilon / sqrt((n-1)(1-epsilon^2)),
// and runs one directional-preference probe along alpha at resolution
// Delta = gamma * epsilon / (25 sqrt(2) n). N counts the probes that certify
// the "<= Delta" side. The tilt is chosen so that the probability p of that
// event separates the two promise cases by a constant gap (see the band
// derivation in the implementation); comparing N/T against the midpoint
// 63/80 of the two bands decides the instance.
TestVerdict test_randomized(ComparisonOracle& oracle, const Eigen::VectorXd& x,
                            const UnitVector& v, const TestParams& params,
                            Rng& rng);

// Deterministic alignment tester. Uses O(n) comparison queries and is always
// correct on promise instances, under every tie policy. Requires n >= 2.
//
// Strategy: rotate so the target direction is the first basis vector, fix
// the sign of each remaining coordinate of the gradient with one probe, rule
// out the "gradient nearly orthogonal to v" regime with one aggregate probe,
// then bound each ratio |g_i / g_1| from below by growing a per-coordinate
// cap l_i by factor 3/2 until a probe certifies the ratio is exceeded. In
// the Yes case the sum of squared caps stays below 21n; in the No case it
// provably crosses it (or the aggregate probe already fired).
TestVerdict test_deterministic(ComparisonOracle& oracle,
                               const Eigen::VectorXd& x, const UnitVector& v,
                               const TestParams& params);

}  // namespace compgrad
