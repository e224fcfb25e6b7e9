#include "compgrad/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace compgrad {

namespace {

void check_inputs(const ComparisonOracle& oracle, const Eigen::VectorXd& x,
                  double gamma, double L, const char* who) {
  if (x.size() != oracle.dimension()) {
    throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite point");
  }
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw std::invalid_argument(std::string(who) + ": gamma must be positive");
  }
  if (!std::isfinite(L) || L <= 0.0) {
    throw std::invalid_argument(std::string(who) + ": L must be positive");
  }
}

// Sign-fix every column of `cols` in place with one probe each: a verdict of
// AtMostDelta (gradient coordinate <= delta) flips the column, so afterwards
// every gradient coordinate in the working frame is >= -2*delta.
void orient_columns(ComparisonOracle& oracle, const Eigen::VectorXd& x,
                    Eigen::MatrixXd& cols, int first, double delta, double L,
                    std::vector<int>& signs) {
  for (int j = first; j < cols.cols(); ++j) {
    const DpVerdict probe = dp(oracle, x, UnitVector(cols.col(j)), delta, L);
    if (probe.kind == DpKind::AtMostDelta) {
      cols.col(j) = -cols.col(j);
      signs[j] = -1;
    }
  }
}

}  // namespace

EstimateResult estimate_constant(ComparisonOracle& oracle,
                                 const Eigen::VectorXd& x, double gamma,
                                 double L, Rng& rng) {
  check_inputs(oracle, x, gamma, L, "estimate_constant");
  const int n = oracle.dimension();
  const double delta1 = gamma / n;
  const long long counter_before = oracle.read_counter();

  Eigen::MatrixXd cols = sample_haar_frame(n, rng).matrix();
  std::vector<int> signs(n, 1);
  orient_columns(oracle, x, cols, 0, delta1, L, signs);

  // Each oriented column has gradient coordinate >= -2*delta1/||grad||, so
  // the average picks up mostly nonnegative contributions; over the random
  // frame the expected overlap with the normalized gradient is a constant.
  UnitVector u(cols.rowwise().sum() / std::sqrt(double(n)));

  StageLog log;
  log.coarse_signs = std::move(signs);
  log.coarse_direction = u.vec();
  return EstimateResult{std::move(u), oracle.read_counter() - counter_before,
                        std::move(log)};
}

EstimateResult estimate(ComparisonOracle& oracle, const Eigen::VectorXd& x,
                        double epsilon, double gamma, double L, Rng& rng) {
  check_inputs(oracle, x, gamma, L, "estimate");
  const double eps_max = 1.0 / std::sqrt(2.0);
  if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon >= eps_max) {
    throw std::invalid_argument("estimate: epsilon must lie in (0, 1/sqrt(2))");
  }
  const int n = oracle.dimension();
  const long long counter_before = oracle.read_counter();

  if (n == 1) {
    // One probe at gamma/2: with |f'(x)| >= gamma, AtLeastMinusDelta
    // (f' >= -gamma/2) forces f' > 0 and AtMostDelta forces f' < 0.
    const Eigen::VectorXd e1 = Eigen::VectorXd::Ones(1);
    const DpVerdict probe = dp(oracle, x, UnitVector(e1), gamma / 2.0, L);
    UnitVector direction(probe.kind == DpKind::AtLeastMinusDelta
                             ? e1
                             : Eigen::VectorXd(-e1));
    return EstimateResult{std::move(direction),
                          oracle.read_counter() - counter_before, StageLog{}};
  }

  EstimateResult coarse = estimate_constant(oracle, x, gamma, L, rng);
  StageLog log;
  log.coarse_signs = std::move(coarse.stage_log.coarse_signs);
  log.coarse_direction = coarse.direction.vec();

  const double delta1 = gamma / n;
  const double delta2 = epsilon * gamma / (400.0 * std::sqrt(double(n)));
  const double sqrt_n = std::sqrt(double(n));
  const double width_target = epsilon / (4.0 * sqrt_n);
  const double cap_failsafe = 64.0 * sqrt_n;

  // Frame around the coarse direction; column 0 is u itself.
  Eigen::MatrixXd cols = rotate_to_e1(coarse.direction).matrix();
  std::vector<int> signs(n, 1);
  orient_columns(oracle, x, cols, 1, delta1, L, signs);

  log.coordinates.assign(n, CoordinateLog{});
  Eigen::VectorXd ratios = Eigen::VectorXd::Zero(n);
  ratios(0) = 1.0;

  for (int j = 1; j < n; ++j) {
    CoordinateLog& rec = log.coordinates[j];
    rec.sign = signs[j];

    // Doubling search: AtMostDelta keeps the cap below the ratio, so grow;
    // AtLeastMinusDelta certifies cap/sqrt(n) >= g_j/g_1 - slack, so stop.
    for (;;) {
      const double beta = rec.cap / sqrt_n;
      const Eigen::VectorXd w = beta * cols.col(0) - cols.col(j);
      const DpVerdict probe = dp(oracle, x, UnitVector(w), delta2, L);
      if (probe.kind != DpKind::AtMostDelta) break;
      rec.cap *= 2.0;
      if (rec.cap > cap_failsafe) {
        rec.cap_overflow = true;
        break;
      }
    }

    // Binary search on the bracket [-cap, cap]/sqrt(n): AtMostDelta means
    // the midpoint still underestimates the ratio. Runs at least once since
    // the initial width 2*cap/sqrt(n) exceeds the target for any epsilon.
    double lo = -rec.cap / sqrt_n;
    double hi = rec.cap / sqrt_n;
    double mid = 0.0;
    do {
      mid = 0.5 * (lo + hi);
      const Eigen::VectorXd w = mid * cols.col(0) - cols.col(j);
      const DpVerdict probe = dp(oracle, x, UnitVector(w), delta2, L);
      ++rec.search_depth;
      if (probe.kind == DpKind::AtMostDelta) {
        lo = mid;
      } else {
        hi = mid;
      }
    } while (hi - lo >= width_target);

    rec.alpha = mid;
    ratios(j) = mid;
    log.cap_sum_squares += rec.cap * rec.cap;
  }

  UnitVector direction(cols * ratios);
  return EstimateResult{std::move(direction),
                        oracle.read_counter() - counter_before,
                        std::move(log)};
}

}  // namespace compgrad
