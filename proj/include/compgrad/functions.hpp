#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

#include "compgrad/geometry.hpp"

namespace compgrad {

class VerificationHandle;

// A smooth objective with a known gradient-smoothness constant L, a
// gradient-norm floor gamma certified on a ball around the origin, and
// instrumented evaluation. The analytic gradient exists for verification
// but is not reachable through this type; harness code goes through
// VerificationHandle, and the split keeps algorithm code on the
// comparison-only diet. Copies share the underlying function and counters.
class FunctionModel {
 public:
  struct Definition {
    int dimension = 0;
    double smoothness = 0.0;        // L, Lipschitz constant of the gradient
    double grad_lower_bound = 0.0;  // gamma, valid on the declared ball
    double domain_radius = 10.0;
    std::function<double(const Eigen::VectorXd&)> evaluate;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  };

  explicit FunctionModel(Definition def);

  int dimension() const;
  double smoothness() const;
  double grad_lower_bound() const;
  double domain_radius() const;
  bool in_domain(const Eigen::VectorXd& x) const;

  double evaluate(const Eigen::VectorXd& x) const;

  // Instrumentation. evaluation_count counts evaluate() calls;
  // gradient_count counts gradient fetches through VerificationHandle.
  // Counters are shared across copies and atomically updated.
  long long evaluation_count() const;
  long long gradient_count() const;
  void reset_counters() const;

 private:
  friend class VerificationHandle;
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// The only path to a model's analytic gradient. Exists so that correctness
// checks (which need the true gradient) are grep-ably separate from
// algorithm code (which must never see it); an audit test asserts the
// gradient counter stays at zero while algorithms run.
class VerificationHandle {
 public:
  explicit VerificationHandle(FunctionModel model) : model_(std::move(model)) {}

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  UnitVector normalized_gradient(const Eigen::VectorXd& x) const;

 private:
  FunctionModel model_;
};

// f(x) = 0.5 x^T A x + b^T x + c on the ball of the given radius.
// A must be symmetric (checked); smoothness L is the spectral norm of A and
// grad_lower_bound is the exact minimum of ||Ax + b|| over the ball
// (computed by eigendecomposition; may legitimately be 0).
FunctionModel make_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double c, double domain_radius = 10.0);

// Same contract as make_quadratic with A = diag(d), but with O(n)
// evaluation; used by instance generators at larger n.
FunctionModel make_diagonal_quadratic(const Eigen::VectorXd& diag,
                                      const Eigen::VectorXd& b, double c,
                                      double domain_radius = 10.0);

// f(x) = <g, x> + offset with unit g: the gradient is constant and unit, so
// comparisons reduce to sgn(<g, x - y>) and never depend on the offset.
// The true smoothness is 0; any positive declared_smoothness is valid and
// sets the step size algorithms will use.
class HyperplaneInstance {
 public:
  HyperplaneInstance(UnitVector g, double offset, double declared_smoothness = 1.0,
                     double domain_radius = 10.0);

  const UnitVector& g() const { return g_; }
  double offset() const { return offset_; }
  const FunctionModel& model() const { return model_; }

 private:
  UnitVector g_;
  double offset_;
  FunctionModel model_;
};

HyperplaneInstance make_hyperplane(UnitVector g, double offset,
                                   double declared_smoothness = 1.0,
                                   double domain_radius = 10.0);

}  // namespace compgrad
