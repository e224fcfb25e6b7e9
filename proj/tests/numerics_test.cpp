#include "compgrad/numerics.hpp"

#include <cmath>
#include <vector>

#include "compgrad/rng.hpp"
#include "test_harness.hpp"

using compgrad::chi_cdf;
using compgrad::regularized_gamma_p;
using compgrad::Rng;
using compgrad::summarize;
using compgrad::wilson_interval;
using testkit::check;
using testkit::check_near;
using testkit::run_test;

int main() {
  run_test("regularized gamma against frozen reference values", [] {
    // Reference values computed independently with mpmath/scipy.
    check_near(regularized_gamma_p(0.5, 1.0), 0.8427007929497151, 1e-12,
               "P(0.5,1)");
    check_near(regularized_gamma_p(1.0, 1.0), 0.6321205588285577, 1e-12,
               "P(1,1)");
    check_near(regularized_gamma_p(2.5, 3.0), 0.6937810815867212, 1e-12,
               "P(2.5,3)");
    check_near(regularized_gamma_p(5.0, 4.0), 0.3711630648201266, 1e-12,
               "P(5,4)");
    check_near(regularized_gamma_p(50.0, 60.0), 0.9155933189063082, 1e-11,
               "P(50,60)");
    check_near(regularized_gamma_p(3.0, 0.0), 0.0, 0.0, "P(a,0)");
  });

  run_test("regularized gamma is monotone in x", [] {
    double prev = 0.0;
    for (double x = 0.0; x <= 20.0; x += 0.25) {
      const double p = regularized_gamma_p(4.0, x);
      check(p >= prev - 1e-15, "not monotone");
      check(p >= 0.0 && p <= 1.0, "outside [0,1]");
      prev = p;
    }
    check(regularized_gamma_p(4.0, 200.0) > 1.0 - 1e-12, "tail not near 1");
  });

  run_test("chi distribution CDF against frozen reference values", [] {
    check_near(chi_cdf(1, 1.959963984540054), 0.95, 1e-12, "chi_1 95%");
    check_near(chi_cdf(2, 1.1774100225154747), 0.5, 1e-12, "chi_2 median");
    check_near(chi_cdf(3, 1.0), 0.19874804309879915, 1e-12, "chi_3 at 1");
    check_near(chi_cdf(10, 3.0), 0.4678964236252849, 1e-12, "chi_10 at 3");
  });

  run_test("chi distribution CDF matches Monte Carlo", [] {
    Rng rng(11);
    const int k = 6;
    const int trials = 200000;
    const double y0 = 2.2;
    int below = 0;
    for (int i = 0; i < trials; ++i) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) {
        const double g = rng.gaussian();
        s += g * g;
      }
      if (std::sqrt(s) <= y0) ++below;
    }
    const double empirical = double(below) / trials;
    // 4-sigma Monte Carlo slack.
    const double slack = 4.0 * std::sqrt(0.25 / trials);
    check_near(chi_cdf(k, y0), empirical, slack, "chi_6 CDF vs sampling");
  });

  run_test("summarize on a known vector", [] {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    check(s.count == 4, "count");
    check_near(s.mean, 2.5, 1e-15, "mean");
    check_near(s.variance, 5.0 / 3.0, 1e-15, "unbiased variance");
    check_near(s.min, 1.0, 0.0, "min");
    check_near(s.max, 4.0, 0.0, "max");
  });

  run_test("wilson interval against frozen reference values", [] {
    const auto ci = wilson_interval(81, 263);
    check_near(ci.lo, 0.2552885198782742, 1e-12, "wilson(81,263).lo");
    check_near(ci.hi, 0.36620957698280004, 1e-12, "wilson(81,263).hi");
    const auto ci2 = wilson_interval(200, 300);
    check_near(ci2.lo, 0.6115124568840806, 1e-12, "wilson(200,300).lo");
    check_near(ci2.hi, 0.7176065527077372, 1e-12, "wilson(200,300).hi");
  });

  run_test("wilson interval edge cases and containment", [] {
    const auto zero = wilson_interval(0, 50);
    check(zero.lo <= 1e-15 && zero.lo >= 0.0, "zero-successes lower end");
    check_near(zero.hi, 0.07134759913335872, 1e-12, "wilson(0,50).hi");
    const auto full = wilson_interval(50, 50);
    check_near(full.lo, 0.9286524008666414, 1e-12, "wilson(50,50).lo");
    check(full.hi >= 1.0 - 1e-12, "full-successes upper end");
    for (long long s : {1LL, 7LL, 25LL, 49LL}) {
      const auto ci = wilson_interval(s, 50);
      const double p_hat = double(s) / 50.0;
      check(ci.contains(p_hat), "interval must contain the point estimate");
      check(ci.lo > 0.0 && ci.hi < 1.0, "interior interval");
    }
  });

  return testkit::finish("numerics_test");
}
