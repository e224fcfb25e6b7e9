#include "compgrad/instances.hpp"

#include <cmath>
#include <string>

#include "compgrad/functions.hpp"
#include "compgrad/rng.hpp"
#include "test_harness.hpp"

using compgrad::make_estimate_instance;
using compgrad::make_promise_instance;
using compgrad::make_promise_instance_at;
using compgrad::model_kind_name;
using compgrad::ModelKind;
using compgrad::parse_model_kind;
using compgrad::Rng;
using compgrad::VerificationHandle;
using testkit::check;
using testkit::check_near;
using testkit::check_throws;
using testkit::run_test;

namespace {

const ModelKind kKinds[] = {ModelKind::Hyperplane, ModelKind::QuadraticIdentity,
                            ModelKind::QuadraticDiagonal};

}  // namespace

int main() {
  run_test("model kind names round-trip", [] {
    for (const ModelKind kind : kKinds) {
      check(parse_model_kind(model_kind_name(kind)) == kind,
            std::string("round trip of ") + model_kind_name(kind));
    }
    check_throws([] { parse_model_kind("cubic"); }, "unknown kind");
  });

  run_test("promise instances realize the promise exactly", [] {
    Rng rng(31);
    const double eps = 0.2;
    for (const ModelKind kind : kKinds) {
      for (const bool is_yes : {true, false}) {
        for (int trial = 0; trial < 60; ++trial) {
          const int n = 2 + int(rng.uniform_index(20));
          const auto inst = make_promise_instance(n, eps, kind, is_yes, rng);
          check(inst.is_yes == is_yes, "is_yes flag");
          check_near(inst.epsilon, eps, 0.0, "epsilon stored");
          // distance really is ||g - v||.
          check_near((inst.g.vec() - inst.v.vec()).norm(), inst.distance,
                     1e-12, "distance = ||g - v||");
          if (is_yes) {
            check(inst.distance <= eps + 1e-12, "Yes within epsilon");
          } else {
            check(inst.distance > 2.0 * eps, "No beyond 2 epsilon");
            check(inst.distance <= std::sqrt(2.0) + 1e-12,
                  "No within the sphere diameter bound");
          }
          // g matches the analytic gradient at x, and gamma its norm.
          const auto grad = VerificationHandle(inst.model).gradient(inst.x);
          check_near((grad / grad.norm() - inst.g.vec()).norm(), 0.0, 1e-9,
                     "g is the normalized gradient");
          check_near(inst.gamma, grad.norm(), 1e-9 * (1.0 + grad.norm()),
                     "gamma equals the true gradient norm");
          check(inst.gamma > 0.0, "positive gamma");
          check(inst.model.in_domain(inst.x), "anchor inside the domain");
        }
      }
    }
  });

  run_test("generators leave counters clean", [] {
    Rng rng(32);
    const auto inst =
        make_promise_instance(8, 0.1, ModelKind::QuadraticDiagonal, true, rng);
    check(inst.model.evaluation_count() == 0,
          "evaluation counter reset after generation");
    check(inst.model.gradient_count() == 0,
          "gradient counter reset after generation");
    const auto est = make_estimate_instance(8, ModelKind::Hyperplane, rng);
    check(est.model.evaluation_count() == 0 && est.model.gradient_count() == 0,
          "estimate instance counters reset");
  });

  run_test("pinned-distance generator honors and validates the distance", [] {
    Rng rng(33);
    const double eps = 0.15;
    const auto yes =
        make_promise_instance_at(10, eps, ModelKind::Hyperplane, true,
                                 0.9 * eps, rng);
    check_near(yes.distance, 0.9 * eps, 1e-12, "pinned Yes distance");
    check_near((yes.g.vec() - yes.v.vec()).norm(), 0.9 * eps, 1e-10,
               "realized Yes distance");
    const auto no = make_promise_instance_at(10, eps, ModelKind::Hyperplane,
                                             false, 2.5 * eps, rng);
    check_near((no.g.vec() - no.v.vec()).norm(), 2.5 * eps, 1e-10,
               "realized No distance");
    check_throws(
        [&] {
          make_promise_instance_at(10, eps, ModelKind::Hyperplane, true,
                                   1.5 * eps, rng);
        },
        "Yes distance beyond epsilon");
    check_throws(
        [&] {
          make_promise_instance_at(10, eps, ModelKind::Hyperplane, false,
                                   1.9 * eps, rng);
        },
        "No distance inside the excluded band");
  });

  run_test("estimate instances expose the exact gradient data", [] {
    Rng rng(34);
    for (const ModelKind kind : kKinds) {
      for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + int(rng.uniform_index(30));
        const auto inst = make_estimate_instance(n, kind, rng);
        const auto grad = VerificationHandle(inst.model).gradient(inst.x);
        check(grad.norm() > 0.0, "nonzero gradient");
        check_near((grad / grad.norm() - inst.g.vec()).norm(), 0.0, 1e-9,
                   "normalized gradient matches");
        check_near(inst.gamma, grad.norm(), 1e-9 * (1.0 + grad.norm()),
                   "gamma matches");
        check(inst.model.in_domain(inst.x), "anchor inside the domain");
      }
    }
  });

  run_test("gradient directions cover the sphere (no axis bias)", [] {
    Rng rng(35);
    const int n = 3;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    const int trials = 4000;
    for (int i = 0; i < trials; ++i) {
      acc += make_estimate_instance(n, ModelKind::Hyperplane, rng).g.vec();
    }
    check(acc.norm() / trials < 0.05, "mean direction should vanish");
  });

  return testkit::finish("instances_test");
}
