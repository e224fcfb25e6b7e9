#include "compgrad/functions.hpp"

#include <cmath>

#include "compgrad/rng.hpp"
#include "test_harness.hpp"

using compgrad::FunctionModel;
using compgrad::HyperplaneInstance;
using compgrad::make_diagonal_quadratic;
using compgrad::make_hyperplane;
using compgrad::make_quadratic;
using compgrad::Rng;
using compgrad::UnitVector;
using compgrad::VerificationHandle;
using testkit::check;
using testkit::check_near;
using testkit::check_throws;
using testkit::run_test;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

}  // namespace

int main() {
  run_test("quadratic: identity matrix case", [] {
    const auto model = make_quadratic(Eigen::MatrixXd::Identity(3, 3),
                                      Eigen::VectorXd::Zero(3), 0.0);
    check_near(model.evaluate(vec3(1, 0, 0)), 0.5, 1e-15, "f(e1)");
    const auto grad = VerificationHandle(model).gradient(vec3(1, 0, 0));
    check_near((grad - vec3(1, 0, 0)).norm(), 0.0, 1e-15, "grad(e1)");
    check_near(model.smoothness(), 1.0, 1e-12, "L of identity");
    check_near(model.grad_lower_bound(), 0.0, 1e-12,
               "gamma vanishes at the origin");
  });

  run_test("quadratic: pure linear case", [] {
    const auto model =
        make_quadratic(Eigen::MatrixXd::Zero(2, 2), vec2(2, 0), 0.0);
    check_near(model.evaluate(vec2(3, 4)), 6.0, 1e-15, "f(3,4)");
    const auto grad = VerificationHandle(model).gradient(vec2(3, 4));
    check_near((grad - vec2(2, 0)).norm(), 0.0, 1e-15, "constant gradient");
    // ||Ax + b|| = ||b|| = 2 everywhere.
    check_near(model.grad_lower_bound(), 2.0, 1e-12, "gamma = ||b||");
  });

  run_test("quadratic: diagonal case pins gradient and smoothness", [] {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 4.0;
    const auto model = make_quadratic(a, Eigen::VectorXd::Zero(2), 0.0);
    const auto grad = VerificationHandle(model).gradient(vec2(1, 1));
    check_near((grad - vec2(1, 4)).norm(), 0.0, 1e-14, "grad = (1,4)");
    check_near(model.smoothness(), 4.0, 1e-12, "L = top eigenvalue");
  });

  run_test("quadratic: gamma is the exact min of ||Ax+b|| on the ball", [] {
    // Minimizer x = -b/||b|| * 10 leaves ||x + b|| = ||b|| - 10.
    Eigen::VectorXd b(2);
    b << 30.0, 40.0;
    const auto model =
        make_quadratic(Eigen::MatrixXd::Identity(2, 2), b, 0.0, 10.0);
    check_near(model.grad_lower_bound(), 40.0, 1e-9, "gamma = 50 - 10");
    // Singular direction: gradient (2 x_1, 1) has minimum norm 1.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = 2.0;
    const auto flat = make_quadratic(a, vec2(0, 1), 0.0, 10.0);
    check_near(flat.grad_lower_bound(), 1.0, 1e-9, "gamma along null space");
    // Brute-force lower-bound audit: no sampled point beats gamma.
    Rng rng(3);
    for (int trial = 0; trial < 20000; ++trial) {
      Eigen::VectorXd x(2);
      x << rng.gaussian(), rng.gaussian();
      x *= 10.0 * std::pow(rng.uniform(), 0.5) / x.norm();
      const double norm = VerificationHandle(flat).gradient(x).norm();
      check(norm >= flat.grad_lower_bound() - 1e-9,
            "sampled gradient norm beats declared gamma");
    }
  });

  run_test("non-symmetric A is rejected", [] {
    check_throws(
        [] {
          Eigen::MatrixXd a(2, 2);
          a << 1.0, 0.5, 0.0, 1.0;
          make_quadratic(a, Eigen::VectorXd::Zero(2), 0.0);
        },
        "asymmetric matrix");
  });

  run_test("diagonal quadratic agrees with its dense counterpart", [] {
    Eigen::VectorXd d(4);
    d << 1.0, -2.0, 0.5, 3.0;
    Eigen::VectorXd b(4);
    b << 0.3, -1.0, 2.0, 0.0;
    const auto dense =
        make_quadratic(Eigen::MatrixXd(d.asDiagonal()), b, 1.5, 7.0);
    const auto diag = make_diagonal_quadratic(d, b, 1.5, 7.0);
    check_near(diag.smoothness(), dense.smoothness(), 1e-10, "L agrees");
    check_near(diag.grad_lower_bound(), dense.grad_lower_bound(), 1e-8,
               "gamma agrees");
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x(4);
      for (int i = 0; i < 4; ++i) x(i) = rng.uniform(-5.0, 5.0);
      check_near(diag.evaluate(x), dense.evaluate(x), 1e-10, "values agree");
      check_near((VerificationHandle(diag).gradient(x) -
                  VerificationHandle(dense).gradient(x))
                     .norm(),
                 0.0, 1e-10, "gradients agree");
    }
  });

  run_test("smoothness and finite-difference bounds over random triples", [] {
    Rng rng(5);
    Eigen::MatrixXd a(3, 3);
    a << 2.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 1.0;
    const auto model = make_quadratic(a, vec3(1, -1, 0.5), 0.25);
    const VerificationHandle handle(model);
    const double L = model.smoothness();
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd x(3), y(3);
      for (int i = 0; i < 3; ++i) {
        x(i) = rng.uniform(-5.0, 5.0);
        y(i) = rng.uniform(-5.0, 5.0);
      }
      // Gradient Lipschitz bound.
      check((handle.gradient(x) - handle.gradient(y)).norm() <=
                L * (x - y).norm() + 1e-9,
            "smoothness inequality violated");
      // Second-order bound |f(y) - f(x) - <grad, y-x>| <= L/2 ||y-x||^2.
      const double lhs = std::abs(model.evaluate(y) - model.evaluate(x) -
                                  handle.gradient(x).dot(y - x));
      const double rhs = 0.5 * L * (y - x).squaredNorm() + 1e-9;
      check(lhs <= rhs, "finite-difference bound violated");
    }
  });

  run_test("hyperplane: comparisons follow sgn(<g, y>) and ignore offset", [] {
    const auto inst = make_hyperplane(UnitVector(vec3(1, 0, 0)), 4.2);
    const auto& f = inst.model();
    Eigen::VectorXd x = vec3(0.5, -2.0, 1.0);
    check(f.evaluate(x + vec3(1, -5, 3)) > f.evaluate(x),
          "positive overlap must raise f");
    check_near(f.evaluate(x + vec3(0, 7, 7)) - f.evaluate(x), 0.0, 0.0,
               "orthogonal displacement is an exact tie");
    // Offset shifts values but never comparisons.
    const auto shifted = make_hyperplane(UnitVector(vec3(1, 0, 0)), -100.0);
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd p(3), q(3);
      for (int i = 0; i < 3; ++i) {
        p(i) = rng.uniform(-5.0, 5.0);
        q(i) = rng.uniform(-5.0, 5.0);
      }
      const double d1 = inst.model().evaluate(p) - inst.model().evaluate(q);
      const double d2 =
          shifted.model().evaluate(p) - shifted.model().evaluate(q);
      check_near(d1, d2, 1e-12, "value differences must match across offsets");
    }
    // Non-axis tie direction: g = (3/5, 4/5) against y = (-4, 3).
    const auto diag_inst = make_hyperplane(UnitVector(vec2(3, 4)), 0.0);
    const Eigen::VectorXd base = vec2(1.0, 1.0);
    check_near(diag_inst.model().evaluate(base + vec2(-4, 3)) -
                   diag_inst.model().evaluate(base),
               0.0, 1e-12, "orthogonal displacement ties");
    check_near((VerificationHandle(diag_inst.model()).gradient(base) -
                vec2(0.6, 0.8))
                   .norm(),
               0.0, 1e-12, "unit gradient");
  });

  run_test("evaluation and gradient counters are shared and resettable", [] {
    const auto model = make_quadratic(Eigen::MatrixXd::Identity(2, 2),
                                      Eigen::VectorXd::Zero(2), 0.0);
    const FunctionModel copy = model;  // shares counters
    check(model.evaluation_count() == 0 && model.gradient_count() == 0,
          "fresh counters");
    model.evaluate(vec2(1, 1));
    copy.evaluate(vec2(2, 2));
    check(model.evaluation_count() == 2, "copies share evaluation counter");
    VerificationHandle(copy).gradient(vec2(1, 0));
    check(model.gradient_count() == 1, "handle increments gradient counter");
    model.reset_counters();
    check(copy.evaluation_count() == 0 && copy.gradient_count() == 0,
          "reset clears shared counters");
  });

  run_test("domain membership uses the declared radius", [] {
    const auto model = make_quadratic(Eigen::MatrixXd::Identity(2, 2),
                                      Eigen::VectorXd::Zero(2), 0.0, 3.0);
    check(model.in_domain(vec2(2.9, 0)), "inside");
    check(!model.in_domain(vec2(3.1, 0)), "outside");
    check_near(model.domain_radius(), 3.0, 0.0, "radius stored");
  });

  return testkit::finish("functions_test");
}
