#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "compgrad/numerics.hpp"
#include "compgrad/rng.hpp"

namespace compgrad {

// A vector constrained to unit Euclidean norm. The constructor renormalizes
// and rejects inputs whose norm is zero or not finite; after construction
// the norm is within 1e-12 of 1.
class UnitVector {
 public:
  explicit UnitVector(Eigen::VectorXd v);

  const Eigen::VectorXd& vec() const { return v_; }
  int dimension() const { return static_cast<int>(v_.size()); }
  double dot(const Eigen::VectorXd& w) const { return v_.dot(w); }

 private:
  Eigen::VectorXd v_;
};

// A square matrix whose columns form an orthonormal basis. from_columns
// rejects matrices with any pairwise column inner product (or unit-norm
// defect) above 1e-10.
class OrthonormalFrame {
 public:
  static OrthonormalFrame from_columns(Eigen::MatrixXd q);

  int dimension() const { return static_cast<int>(q_.rows()); }
  const Eigen::MatrixXd& matrix() const { return q_; }
  Eigen::VectorXd column(int i) const { return q_.col(i); }
  // Coordinates-in-frame -> ambient vector.
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const { return q_ * w; }
  // Ambient vector -> coordinates-in-frame.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& w) const {
    return q_.transpose() * w;
  }

 private:
  explicit OrthonormalFrame(Eigen::MatrixXd q) : q_(std::move(q)) {}
  Eigen::MatrixXd q_;
};

// Uniform direction on the unit sphere in R^n (gaussian vector, normalized).
UnitVector sample_sphere(int n, Rng& rng);

// Orthogonal matrix drawn from the rotation-invariant distribution:
// QR of an iid gaussian matrix with the R-diagonal sign correction, so the
// result is exactly invariant in law under left multiplication by any
// fixed orthogonal matrix.
OrthonormalFrame sample_haar_frame(int n, Rng& rng);

// Orthonormal frame whose first column equals u. Built from a single
// Householder reflection (reflecting through u -/+ e1, branch chosen for
// numerical stability), so the remaining columns complete the basis.
OrthonormalFrame rotate_to_e1(const UnitVector& u);

// Empirical check of the sphere-marginal concentration facts used by the
// randomized tester, for y uniform on the sphere in R^n (n >= 5) and any
// fixed unit x (x = e1 without loss of generality):
//   P[|<y,x>| <= 24/(25 sqrt n)] >= 3/5
//   P[|<y,x>| <= 18/(25 sqrt n)] <= 11/20
//   P[|<y,x>| >=  1/( 5 sqrt n)] >= 4/5
struct ConcentrationReport {
  int n = 0;
  long long samples = 0;
  // Empirical probabilities for the three events above, in order.
  double fraction_small = 0.0;
  double fraction_tiny = 0.0;
  double fraction_large = 0.0;
  // Wilson 95% intervals for the empirical probabilities.
  Interval ci_small;
  Interval ci_tiny;
  Interval ci_large;
  // The claimed bounds, for convenience.
  double bound_small = 3.0 / 5.0;
  double bound_tiny = 11.0 / 20.0;
  double bound_large = 4.0 / 5.0;

  // True when each empirical probability is compatible with its bound:
  // the bound lies on the correct side of, or inside, the 95% interval.
  bool satisfied() const {
    return ci_small.hi >= bound_small && ci_tiny.lo <= bound_tiny &&
           ci_large.hi >= bound_large;
  }
};
ConcentrationReport verify_concentration(int n, long long samples, Rng& rng);

// Monte Carlo estimate of E[ <(1/sqrt n) sum_i u_i, v> | <u_i, v> >= -1/n ]
// for a rotation-invariant random orthonormal basis (u_i) and fixed unit v.
// Equivalently (by invariance) the mean of W = (1/sqrt n) sum_i x_i for
// x uniform on the sphere conditioned on min_i x_i >= -1/n.
//
// The conditioning event is exponentially rare under the plain sphere
// measure, so direct rejection is infeasible at the n >= 500 this check
// targets. Sampling instead proposes gaussian coordinates truncated below
// at -a (a = 1.25/sqrt n), rejects proposals violating the event, and
// corrects the residual proposal/target mismatch with per-sample importance
// weights 1 / P(chi_n <= a / max_i(-x_i)+). The weights are identically 1
// except for directions whose most-negative coordinate is within a hair of
// the boundary, so the estimator stays effectively a plain conditional mean
// while remaining exact in expectation at every n.
struct OverlapReport {
  int n = 0;
  long long accepted = 0;
  long long proposed = 0;
  double acceptance_rate = 0.0;
  double conditional_mean = 0.0;  // importance-weighted mean of W
  double standard_error = 0.0;    // weighted, first order
  double max_weight = 1.0;
  // Mean of (1/sqrt n) sum_i |x_i| over unconditioned samples; approaches
  // sqrt(2/pi) for large n. Reported as a sanity reference only.
  double unsigned_mean = 0.0;
  bool reliable = true;  // false when too few samples were accepted
};
// Requires n >= 500 (the regime for which the conditional-mean bound is
// stated); target_accepted is the number of accepted samples to collect,
// max_proposals caps total work (0 means 4096 * target_accepted).
OverlapReport verify_basis_overlap(int n, long long target_accepted, Rng& rng,
                                   long long max_proposals = 0);

namespace detail {
// One sphere direction conditioned on min_i x_i >= floor, with its
// importance weight. Exposed for cross-validation against brute-force
// rejection at small n. Returns false if the proposal was rejected.
bool conditioned_direction(int n, double floor, double truncation, Rng& rng,
                           Eigen::VectorXd& out, double& weight);
}  // namespace detail

}  // namespace compgrad
