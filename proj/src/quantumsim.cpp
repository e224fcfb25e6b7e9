#include "compgrad/quantumsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace compgrad {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long long checked_grid_size(long long t, int n, long long cap) {
  if (t < 1) throw std::invalid_argument("grid resolution t must be >= 1");
  if (n < 1) throw std::invalid_argument("grid dimension must be >= 1");
  const long long T = t + 1;
  long long total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > cap / T) {
      throw std::invalid_argument(
          "grid of (t+1)^n = " + std::to_string(T) + "^" + std::to_string(n) +
          " amplitudes exceeds the amplitude cap " + std::to_string(cap));
    }
    total *= T;
  }
  if (total > cap) {
    throw std::invalid_argument("grid of " + std::to_string(total) +
                                " amplitudes exceeds the amplitude cap " +
                                std::to_string(cap));
  }
  return total;
}

void check_state(const StateVector& state, const char* who) {
  const long long T = state.axis_points();
  long long expect = 1;
  for (int i = 0; i < state.dimension; ++i) expect *= T;
  if (state.dimension < 1 || state.grid_t < 1 ||
      state.amplitudes.size() != expect) {
    throw std::invalid_argument(std::string(who) + ": malformed state");
  }
  if (state.norm_error() > 1e-10) {
    throw std::invalid_argument(std::string(who) +
                                ": state norm deviates from 1 beyond 1e-10");
  }
}

// One T-point inverse transform along the axis with the given stride; the
// index decomposes as idx = outer*(T*stride) + b*stride + inner.
void transform_axis(Eigen::VectorXcd& amps, long long T, long long stride,
                    const Eigen::MatrixXcd& kernel) {
  const long long N = amps.size();
  const long long blocks = N / (T * stride);
  Eigen::VectorXcd slice(T);
  Eigen::VectorXcd out(T);
  for (long long outer = 0; outer < blocks; ++outer) {
    const long long base0 = outer * T * stride;
    for (long long inner = 0; inner < stride; ++inner) {
      const long long base = base0 + inner;
      for (long long b = 0; b < T; ++b) slice(b) = amps(base + b * stride);
      out.noalias() = kernel * slice;
      for (long long k = 0; k < T; ++k) amps(base + k * stride) = out(k);
    }
  }
}

}  // namespace

double StateVector::norm_error() const {
  return std::abs(amplitudes.squaredNorm() - 1.0);
}

StateVector build_phase_state(const Eigen::VectorXd& x, long long t, int n,
                              long long amplitude_cap) {
  const long long N = checked_grid_size(t, n, amplitude_cap);
  if (x.size() != n) {
    throw std::invalid_argument("build_phase_state: x has wrong dimension");
  }
  for (int i = 0; i < n; ++i) {
    if (!(x(i) >= 0.0 && x(i) <= 1.0)) {
      throw std::invalid_argument(
          "build_phase_state: x coordinates must lie in [0, 1]");
    }
  }
  const long long T = t + 1;
  StateVector state;
  state.grid_t = t;
  state.dimension = n;
  state.amplitudes.resize(N);
  const double scale = 1.0 / std::sqrt(double(N));

  std::vector<long long> digit(n, 0);
  for (long long idx = 0; idx < N; ++idx) {
    double dot = 0.0;
    for (int j = 0; j < n; ++j) dot += double(digit[j]) * x(j);
    state.amplitudes(idx) = std::polar(scale, kTwoPi * dot);
    for (int j = n - 1; j >= 0; --j) {
      if (++digit[j] < T) break;
      digit[j] = 0;
    }
  }
  return state;
}

StateVector apply_inverse_transform(const StateVector& state) {
  check_state(state, "apply_inverse_transform");
  const long long T = state.axis_points();
  const int n = state.dimension;

  Eigen::MatrixXcd kernel(T, T);
  const double scale = 1.0 / std::sqrt(double(T));
  for (long long k = 0; k < T; ++k) {
    for (long long b = 0; b < T; ++b) {
      kernel(k, b) = std::polar(scale, -kTwoPi * double(k) * double(b) / T);
    }
  }

  StateVector result = state;
  long long stride = 1;
  for (int axis = n - 1; axis >= 0; --axis) {
    transform_axis(result.amplitudes, T, stride, kernel);
    stride *= T;
  }
  return result;
}

QftEstimate inverse_qft_measure(const StateVector& state, long long shots,
                                Rng& rng) {
  check_state(state, "inverse_qft_measure");
  if (shots < 1) {
    throw std::invalid_argument("inverse_qft_measure: shots must be >= 1");
  }
  const StateVector transformed = apply_inverse_transform(state);
  const long long N = transformed.amplitudes.size();
  const long long T = state.axis_points();
  const int n = state.dimension;

  std::vector<double> cumulative(N);
  double total = 0.0;
  for (long long i = 0; i < N; ++i) {
    total += std::norm(transformed.amplitudes(i));
    cumulative[i] = total;
  }

  QftEstimate estimate;
  estimate.m = int(std::ceil(2.0 + 1.5 * n));
  estimate.shot_outcomes.reserve(size_t(shots));
  estimate.shot_indices.reserve(size_t(shots));
  for (long long s = 0; s < shots; ++s) {
    const double u = rng.uniform() * total;
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    long long idx = it == cumulative.end() ? N - 1
                                           : (it - cumulative.begin());
    std::vector<long long> digits(n, 0);
    Eigen::VectorXd point(n);
    for (int j = n - 1; j >= 0; --j) {
      digits[j] = idx % T;
      point(j) = double(digits[j]) / double(state.grid_t);
      idx /= T;
    }
    estimate.shot_indices.push_back(std::move(digits));
    estimate.shot_outcomes.push_back(std::move(point));
  }
  estimate.v_hat = estimate.shot_outcomes.front();
  return estimate;
}

void save_state(const StateVector& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_state: cannot open " + path);
  const long long n = state.dimension;
  const long long t = state.grid_t;
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&t), sizeof(t));
  for (long long i = 0; i < state.amplitudes.size(); ++i) {
    const double re = state.amplitudes(i).real();
    const double im = state.amplitudes(i).imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
  if (!out) throw std::runtime_error("save_state: write failed for " + path);
}

StateVector load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_state: cannot open " + path);
  long long n = 0;
  long long t = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&t), sizeof(t));
  if (!in || n < 1 || n > 64 || t < 1) {
    throw std::runtime_error("load_state: malformed header in " + path);
  }
  const long long N = checked_grid_size(t, int(n), kDefaultAmplitudeCap);
  StateVector state;
  state.dimension = int(n);
  state.grid_t = t;
  state.amplitudes.resize(N);
  for (long long i = 0; i < N; ++i) {
    double re = 0.0;
    double im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(re));
    in.read(reinterpret_cast<char*>(&im), sizeof(im));
    if (!in || !std::isfinite(re) || !std::isfinite(im)) {
      throw std::runtime_error("load_state: truncated or non-finite data in " +
                               path);
    }
    state.amplitudes(i) = {re, im};
  }
  return state;
}

QuantumRunResult simulate_quantum_estimation(ComparisonOracle& oracle,
                                             const Eigen::VectorXd& x,
                                             double epsilon, double gamma,
                                             double L, Rng& rng,
                                             const QuantumOptions& options) {
  const int n = oracle.dimension();
  if (x.size() != n || !x.allFinite()) {
    throw std::invalid_argument("simulate_quantum_estimation: bad point");
  }
  const double eps_max = 1.0 / std::sqrt(2.0);
  if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon >= eps_max) {
    throw std::invalid_argument(
        "simulate_quantum_estimation: epsilon must lie in (0, 1/sqrt(2))");
  }
  if (!std::isfinite(gamma) || gamma <= 0.0 || !std::isfinite(L) || L <= 0.0) {
    throw std::invalid_argument(
        "simulate_quantum_estimation: gamma and L must be positive");
  }

  const long long t = options.t_override
                          ? *options.t_override
                          : (long long)std::ceil(10.0 * n * n / epsilon);
  const long long N = checked_grid_size(t, n, options.amplitude_cap);
  const long long T = t + 1;
  const long long tails = N / T;  // grid points of the last n-1 axes

  const double delta =
      gamma * epsilon * epsilon / (48.0 * std::numbers::pi * std::pow(n, 3.0));
  const double width =
      epsilon * epsilon / (8.0 * std::numbers::pi * std::pow(n, 1.5));
  const double phase_scale = options.phase_scale
                                 ? *options.phase_scale
                                 : double(t) / (5.0 * std::sqrt(double(n)));

  const UnitVector v = options.direction_override
                           ? *options.direction_override
                           : sample_sphere(n, rng);
  const OrthonormalFrame frame = rotate_to_e1(v);
  const long long counter_before = oracle.read_counter();

  // Decode tail index tau into grid coordinates along axes 2..n.
  Eigen::VectorXd probe_coords(n);
  const auto load_tail = [&](long long tau) {
    long long rest = tau;
    for (int j = n - 1; j >= 1; --j) {
      probe_coords(j) = double(rest % T) / double(t);
      rest /= T;
    }
  };

  // Binary search for the offset k at which (k, tail) is orthogonal to the
  // gradient. A probe certifying "<= delta" raises the lower bracket, the
  // other side lowers the upper one; both keep the invariant that the
  // bracket endpoints' certified inequalities hold. The all-zero probe
  // vector (zero tail at k = 0) is skipped without a query: its inner
  // product with the gradient is identically 0 <= delta.
  int depth = 0;
  const auto search_offset = [&](bool zero_tail) {
    double k1 = -5.0 * n;
    double k2 = 5.0 * n;
    double k = 0.0;
    int iterations = 0;
    do {
      k = 0.5 * (k1 + k2);
      ++iterations;
      bool below;
      if (zero_tail && k == 0.0) {
        below = true;
      } else {
        probe_coords(0) = k;
        const UnitVector dir(frame.apply(probe_coords));
        below = dp(oracle, x, dir, delta, L).kind == DpKind::AtMostDelta;
      }
      if (below) {
        k1 = k;
      } else {
        k2 = k;
      }
    } while (k2 - k1 >= width);
    depth = iterations;
    return k;
  };

  std::vector<double> offsets;
  if (options.share_search_across_first_axis) {
    offsets.resize(size_t(tails));
    for (long long tau = 0; tau < tails; ++tau) {
      load_tail(tau);
      const bool zero_tail =
          n == 1 || probe_coords.tail(n - 1).isZero(0.0);
      offsets[size_t(tau)] = search_offset(zero_tail);
    }
  } else {
    offsets.resize(size_t(N));
    for (long long idx = 0; idx < N; ++idx) {
      const long long tau = idx % tails;
      load_tail(tau);
      const bool zero_tail =
          n == 1 || probe_coords.tail(n - 1).isZero(0.0);
      offsets[size_t(idx)] = search_offset(zero_tail);
    }
  }

  StateVector state;
  state.grid_t = t;
  state.dimension = n;
  state.amplitudes.resize(N);
  const double amp = 1.0 / std::sqrt(double(N));
  for (long long idx = 0; idx < N; ++idx) {
    const long long b1 = idx / tails;
    const double k = options.share_search_across_first_axis
                         ? offsets[size_t(idx % tails)]
                         : offsets[size_t(idx)];
    const double h = double(b1) / double(t) - k;
    state.amplitudes(idx) = std::polar(amp, kTwoPi * h * phase_scale);
  }

  const QftEstimate measured = inverse_qft_measure(state, 1, rng);

  // Center each measured coordinate into (-1/2, 1/2]: the encoded target is
  // defined modulo 1, and its magnitude is at most 1, so this unwrapping is
  // exact whenever every true coordinate is below 1/2 in magnitude.
  Eigen::VectorXd centered(n);
  for (int j = 0; j < n; ++j) {
    const double c = measured.v_hat(j);
    centered(j) = c > 0.5 ? c - 1.0 : c;
  }

  const bool degenerate = centered.isZero(0.0);
  UnitVector direction = degenerate ? v : UnitVector(frame.apply(centered));
  return QuantumRunResult{std::move(direction),
                          v,
                          oracle.read_counter() - counter_before,
                          depth,
                          t,
                          N,
                          std::move(centered),
                          measured.shot_indices.front(),
                          degenerate};
}

}  // namespace compgrad
