#pragma once

#include <Eigen/Dense>
#include <string>

#include "compgrad/functions.hpp"
#include "compgrad/geometry.hpp"
#include "compgrad/rng.hpp"

namespace compgrad {

// Ground-truth model families used by the harness. Hyperplanes have a
// constant unit gradient; the quadratic kinds vary the gradient over space
// while keeping it exactly known at the anchor point.
enum class ModelKind { Hyperplane, QuadraticIdentity, QuadraticDiagonal };

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

// A tester input with the promise materialized exactly: the normalized
// gradient g at x sits at Euclidean distance `distance` from the reference
// direction v, with distance in [0, epsilon] for YES instances and in
// (2 epsilon, sqrt 2] for NO instances. gamma equals the true gradient norm
// at x (the tightest valid promise).
struct PromiseInstance {
  FunctionModel model;
  Eigen::VectorXd x;
  UnitVector v;  // reference direction handed to the tester
  UnitVector g;  // normalized gradient at x
  double epsilon = 0.0;
  double gamma = 0.0;
  double distance = 0.0;
  bool is_yes = false;
};

// Samples the distance uniformly within the promised range.
PromiseInstance make_promise_instance(int n, double epsilon, ModelKind kind,
                                      bool is_yes, Rng& rng);

// Pins the distance (validated against the promised range); used to stress
// instances at the decision boundary.
PromiseInstance make_promise_instance_at(int n, double epsilon, ModelKind kind,
                                         bool is_yes, double distance, Rng& rng);

// An estimation input: gradient direction uniform on the sphere, gamma
// equal to the true gradient norm at x.
struct EstimateInstance {
  FunctionModel model;
  Eigen::VectorXd x;
  UnitVector g;  // normalized gradient at x
  double gamma = 0.0;
};

EstimateInstance make_estimate_instance(int n, ModelKind kind, Rng& rng);

}  // namespace compgrad
