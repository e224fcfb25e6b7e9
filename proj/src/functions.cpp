#include "compgrad/functions.hpp"

#include <cmath>
#include <stdexcept>

namespace compgrad {

struct FunctionModel::Impl {
  Definition def;
  mutable std::atomic<long long> evaluations{0};
  mutable std::atomic<long long> gradients{0};
};

FunctionModel::FunctionModel(Definition def) : impl_(std::make_shared<Impl>()) {
  if (def.dimension < 1)
    throw std::invalid_argument("FunctionModel: dimension must be >= 1");
  if (!(def.smoothness > 0.0) || !std::isfinite(def.smoothness))
    throw std::invalid_argument("FunctionModel: smoothness must be positive and finite");
  if (def.grad_lower_bound < 0.0)
    throw std::invalid_argument("FunctionModel: grad_lower_bound must be >= 0");
  if (!(def.domain_radius > 0.0))
    throw std::invalid_argument("FunctionModel: domain_radius must be positive");
  if (!def.evaluate || !def.gradient)
    throw std::invalid_argument("FunctionModel: evaluate and gradient are required");
  impl_->def = std::move(def);
}

int FunctionModel::dimension() const { return impl_->def.dimension; }
double FunctionModel::smoothness() const { return impl_->def.smoothness; }
double FunctionModel::grad_lower_bound() const { return impl_->def.grad_lower_bound; }
double FunctionModel::domain_radius() const { return impl_->def.domain_radius; }

bool FunctionModel::in_domain(const Eigen::VectorXd& x) const {
  return x.size() == impl_->def.dimension && x.norm() <= impl_->def.domain_radius;
}

double FunctionModel::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != impl_->def.dimension)
    throw std::invalid_argument("FunctionModel::evaluate: dimension mismatch");
  impl_->evaluations.fetch_add(1, std::memory_order_relaxed);
  return impl_->def.evaluate(x);
}

long long FunctionModel::evaluation_count() const {
  return impl_->evaluations.load(std::memory_order_relaxed);
}

long long FunctionModel::gradient_count() const {
  return impl_->gradients.load(std::memory_order_relaxed);
}

void FunctionModel::reset_counters() const {
  impl_->evaluations.store(0, std::memory_order_relaxed);
  impl_->gradients.store(0, std::memory_order_relaxed);
}

Eigen::VectorXd VerificationHandle::gradient(const Eigen::VectorXd& x) const {
  if (x.size() != model_.impl_->def.dimension)
    throw std::invalid_argument("VerificationHandle::gradient: dimension mismatch");
  model_.impl_->gradients.fetch_add(1, std::memory_order_relaxed);
  return model_.impl_->def.gradient(x);
}

UnitVector VerificationHandle::normalized_gradient(const Eigen::VectorXd& x) const {
  return UnitVector(gradient(x));
}

namespace {

// Exact min of ||Ax + b|| over the ball ||x|| <= r for symmetric A.
// In the eigenbasis the objective is convex and separable; if the
// unconstrained minimizer escapes the ball, the multiplier mu >= 0 with
// ||y(mu)|| = r is found by bisection (the norm is strictly decreasing
// in mu).
double min_gradient_norm_on_ball(const Eigen::VectorXd& lambda,
                                 const Eigen::VectorXd& beta, double r) {
  const int n = static_cast<int>(lambda.size());
  auto y_of_mu = [&](double mu) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      const double d = lambda[i] * lambda[i] + mu;
      y[i] = d > 0.0 ? -lambda[i] * beta[i] / d : 0.0;
    }
    return y;
  };
  Eigen::VectorXd y = y_of_mu(0.0);
  if (y.norm() > r) {
    double lo = 0.0;
    double hi = 1.0;
    while (y_of_mu(hi).norm() > r) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (y_of_mu(mid).norm() > r ? lo : hi) = mid;
    }
    y = y_of_mu(hi);  // hi side: inside the ball, feasible
  }
  return (lambda.asDiagonal() * y + beta).norm();
}

}  // namespace

FunctionModel make_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double c, double domain_radius) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw std::invalid_argument("make_quadratic: A must be square and nonempty");
  if (b.size() != A.rows())
    throw std::invalid_argument("make_quadratic: b has wrong dimension");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("make_quadratic: A must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("make_quadratic: eigendecomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double spectral = lambda.cwiseAbs().maxCoeff();
  const Eigen::VectorXd beta = eig.eigenvectors().transpose() * b;

  FunctionModel::Definition def;
  def.dimension = static_cast<int>(A.rows());
  // A zero matrix still defines a valid (linear) model; smoothness must be
  // positive for step-size formulas, so floor it at a nominal 1.
  def.smoothness = spectral > 0.0 ? spectral : 1.0;
  def.grad_lower_bound = min_gradient_norm_on_ball(lambda, beta, domain_radius);
  def.domain_radius = domain_radius;
  def.evaluate = [A, b, c](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(A * x) + b.dot(x) + c;
  };
  def.gradient = [A, b](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return A * x + b;
  };
  return FunctionModel(std::move(def));
}

FunctionModel make_diagonal_quadratic(const Eigen::VectorXd& diag,
                                      const Eigen::VectorXd& b, double c,
                                      double domain_radius) {
  if (diag.size() == 0 || diag.size() != b.size())
    throw std::invalid_argument("make_diagonal_quadratic: dimension mismatch");
  const double spectral = diag.cwiseAbs().maxCoeff();

  FunctionModel::Definition def;
  def.dimension = static_cast<int>(diag.size());
  def.smoothness = spectral > 0.0 ? spectral : 1.0;
  def.grad_lower_bound = min_gradient_norm_on_ball(diag, b, domain_radius);
  def.domain_radius = domain_radius;
  def.evaluate = [diag, b, c](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(diag.cwiseProduct(x)) + b.dot(x) + c;
  };
  def.gradient = [diag, b](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return diag.cwiseProduct(x) + b;
  };
  return FunctionModel(std::move(def));
}

HyperplaneInstance::HyperplaneInstance(UnitVector g, double offset,
                                       double declared_smoothness,
                                       double domain_radius)
    : g_(std::move(g)), offset_(offset), model_([&] {
        FunctionModel::Definition def;
        def.dimension = g_.dimension();
        def.smoothness = declared_smoothness;
        def.grad_lower_bound = 1.0;
        def.domain_radius = domain_radius;
        const Eigen::VectorXd gv = g_.vec();
        const double b = offset;
        def.evaluate = [gv, b](const Eigen::VectorXd& x) { return gv.dot(x) + b; };
        def.gradient = [gv](const Eigen::VectorXd&) { return gv; };
        return FunctionModel(std::move(def));
      }()) {}

HyperplaneInstance make_hyperplane(UnitVector g, double offset,
                                   double declared_smoothness,
                                   double domain_radius) {
  return HyperplaneInstance(std::move(g), offset, declared_smoothness, domain_radius);
}

}  // namespace compgrad
