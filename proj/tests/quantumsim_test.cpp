#include "compgrad/quantumsim.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include "compgrad/comparator.hpp"
#include "compgrad/functions.hpp"
#include "compgrad/rng.hpp"
#include "test_harness.hpp"

using compgrad::apply_inverse_transform;
using compgrad::build_phase_state;
using compgrad::ComparisonOracle;
using compgrad::inverse_qft_measure;
using compgrad::load_state;
using compgrad::make_hyperplane;
using compgrad::QuantumOptions;
using compgrad::Rng;
using compgrad::save_state;
using compgrad::simulate_quantum_estimation;
using compgrad::StateVector;
using compgrad::UnitVector;
using testkit::check;
using testkit::check_near;
using testkit::check_throws;
using testkit::run_test;

namespace {

Eigen::VectorXd basis(int n, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(i) = 1.0;
  return e;
}

// Exact single-axis measurement pmf of the linear-phase state with
// coordinate x on a T-point grid: the squared magnitude of a geometric sum.
double axis_pmf(long long T, double x, long long k) {
  const double theta = double(T) * x;
  const double num = std::sin(std::numbers::pi * (theta - double(k)));
  const double den = std::sin(std::numbers::pi * (theta - double(k)) / double(T));
  if (std::abs(den) < 1e-300) return 1.0;  // theta - k is a multiple of T
  const double ratio = num / den;
  return ratio * ratio / double(T * T);
}

long long circular_distance(long long k, double theta, long long T) {
  const double raw = std::abs(double(k) - theta);
  const double wrapped = std::min(raw, double(T) - raw);
  return (long long)std::floor(wrapped);
}

}  // namespace

int main() {
  run_test("phase state at x = 0 is uniform", [] {
    const auto state = build_phase_state(Eigen::VectorXd::Zero(2), 3, 2);
    check(state.amplitudes.size() == 16, "grid size (t+1)^n");
    for (long long i = 0; i < 16; ++i) {
      check_near(state.amplitudes(i).real(), 0.25, 1e-15, "uniform real part");
      check_near(state.amplitudes(i).imag(), 0.0, 1e-15, "no imaginary part");
    }
    check(state.norm_error() < 1e-12, "unit norm");
  });

  run_test("phase state alternates sign at x = 1/2", [] {
    Eigen::VectorXd x(1);
    x << 0.5;
    const auto state = build_phase_state(x, 3, 1);
    const double expect[] = {0.5, -0.5, 0.5, -0.5};
    for (int b = 0; b < 4; ++b) {
      check_near(state.amplitudes(b).real(), expect[b], 1e-12,
                 "alternating amplitude");
      check_near(state.amplitudes(b).imag(), 0.0, 1e-12, "real state");
    }
  });

  run_test("phase state keeps unit norm for generic x", [] {
    Eigen::VectorXd x(2);
    x << 0.137, 0.862;
    const auto state = build_phase_state(x, 8, 2);
    check(state.norm_error() < 1e-12, "unit norm");
    check(state.axis_points() == 9, "axis points t+1");
  });

  run_test("phase state validates input", [] {
    Eigen::VectorXd bad(2);
    bad << 0.5, 1.5;
    check_throws([&] { build_phase_state(bad, 4, 2); }, "x outside [0,1]");
    check_throws([&] { build_phase_state(Eigen::VectorXd::Zero(3), 4, 2); },
                 "dimension mismatch");
    try {
      build_phase_state(Eigen::VectorXd::Zero(2), 4095, 2, 1000);
      testkit::fail("amplitude cap not enforced");
    } catch (const std::invalid_argument& e) {
      check(std::string(e.what()).find("1000") != std::string::npos,
            "cap value named in the error");
    }
  });

  run_test("inverse transform is unitary and maps uniform to index 0", [] {
    Rng rng(81);
    StateVector state;
    state.grid_t = 5;
    state.dimension = 2;
    state.amplitudes.resize(36);
    for (long long i = 0; i < 36; ++i) {
      state.amplitudes(i) = {rng.gaussian(), rng.gaussian()};
    }
    state.amplitudes /= state.amplitudes.norm();
    const auto out = apply_inverse_transform(state);
    check_near(out.amplitudes.squaredNorm(), 1.0, 1e-12, "norm preserved");

    const auto uniform = build_phase_state(Eigen::VectorXd::Zero(2), 5, 2);
    const auto spike = apply_inverse_transform(uniform);
    check_near(std::abs(spike.amplitudes(0)), 1.0, 1e-12, "mass at index 0");
    for (long long i = 1; i < 36; ++i) {
      check(std::abs(spike.amplitudes(i)) < 1e-12, "no mass elsewhere");
    }
  });

  run_test("measurement pmf matches the closed form", [] {
    const long long t = 16;
    const long long T = t + 1;
    Eigen::VectorXd x(1);
    x << 0.23;
    const auto out = apply_inverse_transform(build_phase_state(x, t, 1));
    for (long long k = 0; k < T; ++k) {
      check_near(std::norm(out.amplitudes(k)), axis_pmf(T, x(0), k), 1e-12,
                 "pmf at k = " + std::to_string(k));
    }
  });

  run_test("two-axis pmf factorizes into per-axis pmfs", [] {
    const long long t = 6;
    const long long T = t + 1;
    Eigen::VectorXd x(2);
    x << 0.31, 0.744;
    const auto out = apply_inverse_transform(build_phase_state(x, t, 2));
    for (long long k1 = 0; k1 < T; ++k1) {
      for (long long k2 = 0; k2 < T; ++k2) {
        check_near(std::norm(out.amplitudes(k1 * T + k2)),
                   axis_pmf(T, x(0), k1) * axis_pmf(T, x(1), k2), 1e-10,
                   "product form");
      }
    }
  });

  run_test("grid-aligned phase is recovered exactly", [] {
    // x = k/T puts all measurement mass on index k.
    Rng rng(82);
    const long long t = 7;
    const long long T = t + 1;
    Eigen::VectorXd x(1);
    x << 3.0 / double(T);
    const auto estimate =
        inverse_qft_measure(build_phase_state(x, t, 1), 50, rng);
    check(estimate.m == 4, "tail cutoff ceil(2 + 1.5 n) at n = 1");
    for (const auto& shot : estimate.shot_indices) {
      check(shot.size() == 1 && shot[0] == 3, "every shot lands on k = 3");
    }
    check_near(estimate.v_hat(0), 3.0 / double(t), 1e-15,
               "outcome scaled by 1/t");
  });

  run_test("exact circular tail mass obeys 1/(2(m-1))", [] {
    const int m = 4;
    for (long long t : {32, 64}) {
      const long long T = t + 1;
      for (double x : {0.3, 1.0 / 3.0, (std::floor(0.41 * T) + 0.5) / T}) {
        const double theta = double(T) * x;
        double tail = 0.0;
        for (long long k = 0; k < T; ++k) {
          if (circular_distance(k, theta, T) >= m) tail += axis_pmf(T, x, k);
        }
        check(tail <= 1.0 / (2.0 * (m - 1)) + 1e-9,
              "tail " + std::to_string(tail) + " at t = " + std::to_string(t));
      }
    }
  });

  run_test("sampled tail frequency matches the exact pmf", [] {
    Rng rng(83);
    const long long t = 64;
    const long long T = t + 1;
    const int m = 5;
    Eigen::VectorXd x(1);
    x << 0.3;
    const double theta = double(T) * x(0);
    double exact_within = 0.0;
    for (long long k = 0; k < T; ++k) {
      if (circular_distance(k, theta, T) < m) exact_within += axis_pmf(T, x(0), k);
    }
    const auto state = build_phase_state(x, t, 1);
    const long long shots = 100000;
    const auto estimate = inverse_qft_measure(state, shots, rng);
    long long within = 0;
    for (const auto& shot : estimate.shot_indices) {
      if (circular_distance(shot[0], theta, T) < m) ++within;
    }
    const double frac = double(within) / double(shots);
    const double sigma =
        std::sqrt(exact_within * (1.0 - exact_within) / double(shots));
    check(std::abs(frac - exact_within) <= 4.0 * sigma + 1e-9,
          "sampled " + std::to_string(frac) + " vs exact " +
              std::to_string(exact_within));
  });

  run_test("a small state perturbation costs little recovery mass", [] {
    // ||psi - phi|| = 0.1 changes any outcome probability by at most ~0.1,
    // well inside the 2 * ||delta|| allowance.
    const long long t = 64;
    const long long T = t + 1;
    Eigen::VectorXd x(1);
    x << 0.3;
    const auto phi = build_phase_state(x, t, 1);
    // Orthonormalize e0 against phi and tilt by angle a with 2 sin(a/2) = 0.1.
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(T);
    e0(0) = 1.0;
    const std::complex<double> overlap = phi.amplitudes.dot(e0);
    Eigen::VectorXcd perp = e0 - overlap * phi.amplitudes;
    perp /= perp.norm();
    const double a = 2.0 * std::asin(0.05);
    StateVector psi = phi;
    psi.amplitudes = std::cos(a) * phi.amplitudes + std::sin(a) * perp;
    check_near((psi.amplitudes - phi.amplitudes).norm(), 0.1, 1e-12,
               "perturbation size");

    const double theta = double(T) * x(0);
    const int m = 4;
    auto recovery = [&](const StateVector& state) {
      const auto out = apply_inverse_transform(state);
      double mass = 0.0;
      for (long long k = 0; k < T; ++k) {
        if (circular_distance(k, theta, T) < m) mass += std::norm(out.amplitudes(k));
      }
      return mass;
    };
    const double base = recovery(phi);
    const double bumped = recovery(psi);
    check(base >= 1.0 - 1.0 / (2.0 * (m - 1)) - 1e-9, "clean recovery mass");
    check(bumped >= base - 2.0 * 0.1, "perturbed recovery within allowance");
  });

  run_test("state save/load round-trips exactly", [] {
    Eigen::VectorXd x(2);
    x << 0.2, 0.77;
    const auto state = build_phase_state(x, 4, 2);
    const std::string path = "quantum_state_roundtrip.bin";
    save_state(state, path);
    const auto loaded = load_state(path);
    check(loaded.dimension == 2 && loaded.grid_t == 4, "header round-trip");
    check((loaded.amplitudes - state.amplitudes).norm() == 0.0,
          "amplitudes byte-identical");
    std::remove(path.c_str());

    check_throws([] { load_state("no_such_state_file.bin"); }, "missing file");
    const std::string junk = "quantum_state_truncated.bin";
    {
      std::ofstream out(junk, std::ios::binary);
      const long long n = 2, t = 3;
      out.write(reinterpret_cast<const char*>(&n), sizeof(n));
      out.write(reinterpret_cast<const char*>(&t), sizeof(t));
      const double d = 0.5;
      out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    }
    check_throws([&] { load_state(junk); }, "truncated payload");
    std::remove(junk.c_str());
  });

  run_test("simulation recovers a hyperplane gradient", [] {
    Rng rng(84);
    const int n = 2;
    const double eps = 0.25;
    const UnitVector g(basis(n, 0));
    QuantumOptions options;
    options.direction_override = g;  // align the reference with the gradient
    options.share_search_across_first_axis = true;
    int good = 0, tight = 0;
    const int reps = 15;
    long long depth = -1;
    const double target = 1.0 / (5.0 * std::sqrt(2.0));
    for (int rep = 0; rep < reps; ++rep) {
      ComparisonOracle oracle(make_hyperplane(g, 0.4).model());
      const auto result = simulate_quantum_estimation(
          oracle, Eigen::VectorXd::Zero(n), eps, 1.0, 1.0, rng, options);
      check(result.t == 160, "default grid resolution ceil(10 n^2/eps)");
      check(result.grid_points == 161 * 161, "grid point count");
      if ((result.direction.vec() - g.vec()).norm() <= eps) ++good;
      if (std::abs(result.grid_estimate(0) - target) <= 5.0 / 160.0 &&
          std::abs(result.grid_estimate(1)) <= 5.0 / 160.0) {
        ++tight;
      }
      if (depth < 0) depth = result.coherent_depth;
      check(result.coherent_depth == depth, "constant search depth");
      check(result.queries_used == 161 * depth - 1,
            "shared-search query count");
      check(!result.degenerate_measurement, "non-degenerate outcome");
    }
    check(good >= 11, "recoveries " + std::to_string(good) + "/15");
    check(tight >= 9, "grid concentration " + std::to_string(tight) + "/15");
  });

  run_test("shared and per-point searches agree under deterministic ties", [] {
    const int n = 2;
    const double eps = 0.25;
    Eigen::VectorXd graw(2);
    graw << 0.8, 0.6;
    const UnitVector g(graw);
    Eigen::VectorXd vraw(2);
    vraw << 0.6, 0.8;
    QuantumOptions shared;
    shared.direction_override = UnitVector(vraw);
    shared.t_override = 48;
    shared.share_search_across_first_axis = true;
    QuantumOptions reference = shared;
    reference.share_search_across_first_axis = false;

    auto run = [&](const QuantumOptions& options) {
      Rng rng(85);
      ComparisonOracle oracle(make_hyperplane(g, 0.0).model());
      return simulate_quantum_estimation(oracle, Eigen::VectorXd::Zero(n), eps,
                                         1.0, 1.0, rng, options);
    };
    const auto a = run(shared);
    const auto b = run(reference);
    check(a.outcome == b.outcome, "identical measured indices");
    check((a.grid_estimate - b.grid_estimate).norm() == 0.0,
          "identical grid estimates");
    check((a.direction.vec() - b.direction.vec()).norm() == 0.0,
          "identical directions");
    check(a.coherent_depth == b.coherent_depth, "identical depth");
    const long long T = 49, N = 49 * 49, d = a.coherent_depth;
    check(a.queries_used == T * d - 1, "shared mode: one search per tail");
    check(b.queries_used == N * d - T,
          "reference mode: one search per grid point, zero-tail probes "
          "skipped");
  });

  run_test("search depth equals the bracket-halving count", [] {
    Rng rng(86);
    const int n = 2;
    const double eps = 0.25;
    QuantumOptions options;
    options.direction_override = UnitVector(basis(n, 0));
    options.t_override = 16;
    options.share_search_across_first_axis = true;
    ComparisonOracle oracle(make_hyperplane(UnitVector(basis(n, 0)), 0.0).model());
    const auto result = simulate_quantum_estimation(
        oracle, Eigen::VectorXd::Zero(n), eps, 1.0, 1.0, rng, options);
    // Replay the bracket geometry: [-5n, 5n] halved until below the width.
    const double width =
        eps * eps / (8.0 * std::numbers::pi * std::pow(double(n), 1.5));
    double lo = -5.0 * n, hi = 5.0 * n;
    int iters = 0;
    do {
      const double mid = 0.5 * (lo + hi);
      hi = mid;  // which side collapses does not affect the count
      ++iters;
    } while (hi - lo >= width);
    check(result.coherent_depth == iters,
          "depth " + std::to_string(result.coherent_depth) + " vs replay " +
              std::to_string(iters));
    check(iters == 15, "frozen depth at n = 2, eps = 0.25");
  });

  run_test("zero phase scale yields the degenerate fallback", [] {
    Rng rng(87);
    const int n = 2;
    Eigen::VectorXd vraw(2);
    vraw << 0.6, -0.8;
    QuantumOptions options;
    options.direction_override = UnitVector(vraw);
    options.t_override = 8;
    options.phase_scale = 0.0;
    options.share_search_across_first_axis = true;
    ComparisonOracle oracle(
        make_hyperplane(UnitVector(basis(n, 0)), 0.0).model());
    const auto result = simulate_quantum_estimation(
        oracle, Eigen::VectorXd::Zero(n), 0.25, 1.0, 1.0, rng, options);
    check(result.degenerate_measurement, "flat phases measure zero");
    check((result.direction.vec() - vraw.normalized()).norm() < 1e-15,
          "falls back to the reference direction");
  });

  run_test("simulation validates inputs", [] {
    Rng rng(88);
    ComparisonOracle oracle(
        make_hyperplane(UnitVector(basis(2, 0)), 0.0).model());
    check_throws(
        [&] {
          simulate_quantum_estimation(oracle, Eigen::VectorXd::Zero(3), 0.25,
                                      1.0, 1.0, rng);
        },
        "bad point dimension");
    check_throws(
        [&] {
          simulate_quantum_estimation(oracle, Eigen::VectorXd::Zero(2), 0.9,
                                      1.0, 1.0, rng);
        },
        "epsilon too large");
    check_throws(
        [&] {
          simulate_quantum_estimation(oracle, Eigen::VectorXd::Zero(2), 0.25,
                                      0.0, 1.0, rng);
        },
        "gamma must be positive");
    check_throws(
        [&] {
          QuantumOptions options;
          options.t_override = 4096;  // (4097)^2 > default cap
          simulate_quantum_estimation(oracle, Eigen::VectorXd::Zero(2), 0.25,
                                      1.0, 1.0, rng, options);
        },
        "amplitude cap");
  });

  return testkit::finish("quantumsim_test");
}
