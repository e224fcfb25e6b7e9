#include "compgrad/instances.hpp"

#include <cmath>
#include <stdexcept>

namespace compgrad {

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Hyperplane: return "hyperplane";
    case ModelKind::QuadraticIdentity: return "quadratic_identity";
    case ModelKind::QuadraticDiagonal: return "quadratic_diagonal";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "hyperplane") return ModelKind::Hyperplane;
  if (name == "quadratic_identity") return ModelKind::QuadraticIdentity;
  if (name == "quadratic_diagonal") return ModelKind::QuadraticDiagonal;
  throw std::invalid_argument("unknown model kind: " + name);
}

namespace {

Eigen::VectorXd sample_in_ball(int n, double radius, Rng& rng) {
  const Eigen::VectorXd dir = sample_sphere(n, rng).vec();
  const double r = radius * std::pow(rng.uniform(), 1.0 / n);
  return r * dir;
}

// Unit vector at exact Euclidean distance d from unit v (0 <= d <= sqrt 2):
// g = (1 - d^2/2) v + sqrt(d^2 - d^4/4) w with unit w orthogonal to v.
// Both identities ||g|| = 1 and ||g - v|| = d hold exactly by expansion.
Eigen::VectorXd unit_at_distance(const UnitVector& v, double d, Rng& rng) {
  const int n = v.dimension();
  if (d == 0.0) return v.vec();
  Eigen::VectorXd w;
  double norm = 0.0;
  do {
    w = sample_sphere(n, rng).vec();
    w -= w.dot(v.vec()) * v.vec();
    norm = w.norm();
  } while (norm < 1e-8);
  w /= norm;
  return (1.0 - 0.5 * d * d) * v.vec() + std::sqrt(d * d - 0.25 * d * d * d * d) * w;
}

struct BuiltModel {
  FunctionModel model;
  double gamma;
};

// Model of the requested kind whose gradient at x equals scale * g for a
// random scale (hyperplanes are pinned to unit gradient by definition).
BuiltModel build_model(ModelKind kind, const Eigen::VectorXd& g,
                       const Eigen::VectorXd& x, Rng& rng) {
  const int n = static_cast<int>(g.size());
  switch (kind) {
    case ModelKind::Hyperplane: {
      const double offset = rng.uniform(-1.0, 1.0);
      return {make_hyperplane(UnitVector(g), offset).model(), 1.0};
    }
    case ModelKind::QuadraticIdentity: {
      const double scale = rng.uniform(0.5, 2.0);
      const Eigen::VectorXd diag = Eigen::VectorXd::Ones(n);
      const Eigen::VectorXd b = scale * g - x;
      return {make_diagonal_quadratic(diag, b, 0.0), scale};
    }
    case ModelKind::QuadraticDiagonal: {
      const double scale = rng.uniform(0.5, 2.0);
      Eigen::VectorXd diag(n);
      for (int i = 0; i < n; ++i) diag[i] = rng.uniform(1.0, 2.0);
      const Eigen::VectorXd b = scale * g - diag.cwiseProduct(x);
      return {make_diagonal_quadratic(diag, b, 0.0), scale};
    }
  }
  throw std::invalid_argument("build_model: unknown kind");
}

void check_anchor_gradient(const FunctionModel& model, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& g, double gamma) {
  const Eigen::VectorXd grad = VerificationHandle(model).gradient(x);
  if ((grad - gamma * g).norm() > 1e-10 * std::max(1.0, gamma))
    throw std::logic_error("instance construction: anchor gradient mismatch");
  model.reset_counters();
}

}  // namespace

PromiseInstance make_promise_instance_at(int n, double epsilon, ModelKind kind,
                                         bool is_yes, double distance, Rng& rng) {
  if (n < 2) throw std::invalid_argument("promise instance: n must be >= 2");
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / std::sqrt(2.0)))
    throw std::invalid_argument("promise instance: epsilon must be in (0, 1/sqrt 2)");
  const double root2 = std::sqrt(2.0);
  if (is_yes) {
    if (distance < 0.0 || distance > epsilon)
      throw std::invalid_argument("promise instance: YES distance must be in [0, epsilon]");
  } else {
    if (distance <= 2.0 * epsilon || distance > root2)
      throw std::invalid_argument(
          "promise instance: NO distance must be in (2 epsilon, sqrt 2]");
  }

  const UnitVector v = sample_sphere(n, rng);
  const Eigen::VectorXd g = unit_at_distance(v, distance, rng);
  const Eigen::VectorXd x = sample_in_ball(n, 1.0, rng);
  BuiltModel built = build_model(kind, g, x, rng);
  check_anchor_gradient(built.model, x, g, built.gamma);
  return PromiseInstance{std::move(built.model), x,        v,
                         UnitVector(g),          epsilon,  built.gamma,
                         distance,               is_yes};
}

PromiseInstance make_promise_instance(int n, double epsilon, ModelKind kind,
                                      bool is_yes, Rng& rng) {
  double distance = 0.0;
  if (is_yes) {
    distance = rng.uniform(0.0, epsilon);
  } else {
    // Strictly above 2 epsilon: u in (0, 1].
    const double u = 1.0 - rng.uniform();
    distance = 2.0 * epsilon + u * (std::sqrt(2.0) - 2.0 * epsilon);
  }
  return make_promise_instance_at(n, epsilon, kind, is_yes, distance, rng);
}

EstimateInstance make_estimate_instance(int n, ModelKind kind, Rng& rng) {
  if (n < 1) throw std::invalid_argument("estimate instance: n must be >= 1");
  const UnitVector g = sample_sphere(n, rng);
  const Eigen::VectorXd x = sample_in_ball(n, 1.0, rng);
  BuiltModel built = build_model(kind, g.vec(), x, rng);
  check_anchor_gradient(built.model, x, g.vec(), built.gamma);
  return EstimateInstance{std::move(built.model), x, g, built.gamma};
}

}  // namespace compgrad
