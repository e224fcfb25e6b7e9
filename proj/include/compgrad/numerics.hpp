#pragma once

#include <cstddef>
#include <vector>

namespace compgrad {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
// Series expansion for x < a + 1, continued fraction otherwise.
// Accurate to ~1e-14 over the ranges used here (chi-square tails).
double regularized_gamma_p(double a, double x);

// P(chi_k <= y): chi distribution CDF with k degrees of freedom.
double chi_cdf(int k, double y);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(const std::vector<double>& xs);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double p) const { return lo <= p && p <= hi; }
};

// Wilson score interval for a binomial proportion. The default z is the
// two-sided 95% normal quantile.
Interval wilson_interval(long long successes, long long trials,
                         double z = 1.959963984540054);

}  // namespace compgrad
