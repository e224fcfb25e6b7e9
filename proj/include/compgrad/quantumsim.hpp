#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "compgrad/comparator.hpp"
#include "compgrad/dp.hpp"
#include "compgrad/geometry.hpp"
#include "compgrad/rng.hpp"

namespace compgrad {

inline constexpr long long kDefaultAmplitudeCap = 1LL << 24;

// Statevector over the integer grid {0, ..., t}^n. Index layout: axis 0 is
// most significant, so index = b_1 * T^(n-1) + b_2 * T^(n-2) + ... + b_n
// with T = t + 1 points per axis.
struct StateVector {
  Eigen::VectorXcd amplitudes;
  long long grid_t = 0;
  int dimension = 0;

  long long axis_points() const { return grid_t + 1; }
  // |sum of squared magnitudes - 1|; a physical state keeps this <= 1e-10.
  double norm_error() const;
};

// Linear-phase state: amplitude of integer grid point b is
// exp(2 pi i <b, x>) / T^(n/2), for x in [0,1]^n. Exact recovery under the
// inverse transform happens when every coordinate of x is a multiple of 1/T.
// Grids larger than amplitude_cap are rejected (cap named in the error).
StateVector build_phase_state(const Eigen::VectorXd& x, long long t, int n,
                              long long amplitude_cap = kDefaultAmplitudeCap);

// Per-axis T-point inverse Fourier transform: kernel
// exp(-2 pi i k b / T) / sqrt(T) applied along every axis. Unitary, so the
// output norm matches the input norm.
StateVector apply_inverse_transform(const StateVector& state);

struct QftEstimate {
  Eigen::VectorXd v_hat;  // first shot scaled by 1/t; coordinates on the grid
  std::vector<Eigen::VectorXd> shot_outcomes;        // every shot, scaled by 1/t
  std::vector<std::vector<long long>> shot_indices;  // every shot, raw K per axis
  // Tail cutoff ceil(2 + 3n/2): for the linear-phase state with phase vector
  // x, each axis obeys P[circular |K_j - T x_j| >= m] <= 1/(2(m-1)), so all
  // axes land within m simultaneously with probability >= 2/3.
  int m = 0;
};

// Applies the inverse transform and samples `shots` outcomes from the
// resulting computational-basis distribution.
QftEstimate inverse_qft_measure(const StateVector& state, long long shots,
                                Rng& rng);

// Binary dump: int64 dimension, int64 grid_t, then (re, im) double pairs in
// index order.
void save_state(const StateVector& state, const std::string& path);
StateVector load_state(const std::string& path);

struct QuantumOptions {
  // Grid resolution; defaults to ceil(10 n^2 / epsilon).
  std::optional<long long> t_override;
  long long amplitude_cap = kDefaultAmplitudeCap;
  // Phase kick per unit of the estimated ratio h(y); defaults to
  // t / (5 sqrt(n)), the scale under which the measured grid point
  // approximates g / (5 sqrt(n) <g, v>).
  std::optional<double> phase_scale;
  // Use this reference direction v instead of sampling one.
  std::optional<UnitVector> direction_override;
  // Run one binary search per distinct tail (y_2..y_n) instead of one per
  // grid point; the probe direction never involves y_1, so outcomes agree
  // with the per-point reference mode under deterministic tie policies.
  bool share_search_across_first_axis = false;
};

struct QuantumRunResult {
  UnitVector direction;          // normalized gradient estimate, ambient frame
  UnitVector sampled_direction;  // reference direction v
  long long queries_used = 0;    // classical transcript: actual probe calls
  int coherent_depth = 0;        // binary-search iterations (rounds of probes)
  long long t = 0;
  long long grid_points = 0;
  Eigen::VectorXd grid_estimate;   // centered measurement, rotated frame
  std::vector<long long> outcome;  // measured per-axis K
  bool degenerate_measurement = false;  // measured zero; direction falls back to v
};

// Classical statevector simulation of comparison-driven phase estimation of
// the gradient direction. Rotates a reference direction v to the first axis;
// for each grid point y, binary-searches the offset k making (k, y_2..y_n)
// orthogonal to the gradient (probes at resolution gamma eps^2/(48 pi n^3),
// bracket [-5n, 5n], final width eps^2/(8 pi n^1.5)); kicks the phase
// exp(2 pi i (y_1 - k) * scale) onto the grid state; applies the inverse
// transform; measures once. The centered, renormalized outcome estimates the
// normalized gradient to within eps with probability >= 8/15 - 2 eps when t
// satisfies 2 n^1.5 / t <= eps / (10 sqrt(n)).
QuantumRunResult simulate_quantum_estimation(ComparisonOracle& oracle,
                                             const Eigen::VectorXd& x,
                                             double epsilon, double gamma,
                                             double L, Rng& rng,
                                             const QuantumOptions& options = {});

}  // namespace compgrad
