#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compgrad/comparator.hpp"
#include "compgrad/instances.hpp"
#include "compgrad/numerics.hpp"
#include "compgrad/quantumsim.hpp"

namespace compgrad {

// Tie policy by config name. "random_seeded" draws its stream from `seed`;
// "adversarial" uses the built-in history-parity adversary (answers +1 on
// even query indices, -1 on odd ones), a legal worst-ish case that exercises
// order dependence.
TiePolicy parse_tie_policy(const std::string& name, std::uint64_t seed);

// A sweep description. The grid lists are cross-producted per suite (suites
// ignore the axes that do not apply to them; see run_suite).
struct ExperimentConfig {
  std::string suite;
  std::vector<int> dims{10};
  std::vector<double> epsilons{0.1};
  std::vector<double> failures{1.0 / 3.0};
  std::vector<ModelKind> models{ModelKind::Hyperplane};
  std::vector<std::string> ties{"always_plus"};
  std::uint64_t base_seed = 1;
  int replicas = 100;
  long long samples = 100000;  // per-replica sample budget (concentration/overlap)
  std::optional<long long> quantum_t;
  long long amplitude_cap = kDefaultAmplitudeCap;
  int threads = 0;  // 0 = COMPGRAD_THREADS or hardware concurrency
  // Extension, excluded from the acceptance path: repeat the estimator and
  // keep the medoid of the attempts (success amplification at the harness
  // level; the core algorithm makes a single attempt).
  bool boosted = false;
  int boost_attempts = 5;
  std::string out_path;
  std::string format = "csv";
};

// Plain declarative config: one `key = value` per line, values either
// scalars or comma-separated lists, '#' starts a comment. Unknown keys are
// rejected. Keys: suite, n, epsilon, delta, models, ties, seed, replicas,
// samples, quantum_t, amplitude_cap, threads, boosted, boost_attempts, out,
// format.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Checks every grid point against the target suite's preconditions before
// any work starts; throws std::invalid_argument with the offending entry.
void validate_config(const ExperimentConfig& config);

struct RunRecord {
  std::string suite;
  int n = 0;
  double epsilon = 0.0;
  double failure = 0.0;
  std::string model;  // "-" when the suite has no model axis
  std::string tie;    // "-" when the suite has no tie axis
  int replica = 0;
  std::uint64_t seed = 0;
  bool success = false;
  long long queries = 0;
  // Suite-specific scalar: distance or estimation error where a gradient
  // target exists; bound margin for concentration; conditional mean for
  // overlap. Documented per suite in the README.
  double error_norm = 0.0;
  // Seconds; deliberately not serialized into CSV so that replays of the
  // same seed stay byte-identical.
  double wall_time = 0.0;
};

struct CellSummary {
  int n = 0;
  double epsilon = 0.0;
  double failure = 0.0;
  std::string model;
  std::string tie;
  long long replicas = 0;
  long long successes = 0;
  long long exceptions = 0;
  double success_rate = 0.0;
  Interval ci;  // Wilson 95% interval on the success rate
  double mean_queries = 0.0;
  long long min_queries = 0;
  long long max_queries = 0;
  double mean_error = 0.0;
  double wall_time = 0.0;  // summed over replicas
};

enum class FitPredictor { N, LogInvEps, NLogInvEps };

FitPredictor parse_fit_predictor(const std::string& name);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;  // distinct predictor values entering the fit
};

// Ordinary least squares of mean queries per distinct predictor value.
// Requires >= 4 distinct values; an exactly constant response gives
// r_squared = 1 (the flat line is a perfect fit).
FitResult fit_scaling(const std::vector<RunRecord>& records,
                      FitPredictor predictor);

struct SuiteResult {
  ExperimentConfig config;
  std::vector<RunRecord> records;  // enumeration order, independent of threads
  std::vector<CellSummary> cells;
  std::vector<std::pair<std::string, FitResult>> fits;  // labeled scaling fits
  double wall_time = 0.0;
};

// Runs the configured suite. Deterministic given (config, base seed): every
// replica derives its own seed as mix_seed(base, suite, cell, replica) and
// writes into a preassigned slot. A replica that throws is recorded as a
// failed run, not a fatal error.
SuiteResult run_suite(const ExperimentConfig& config);

// Shortest round-trip decimal rendering (locale-independent).
std::string format_double(double value);

// Fixed CSV schema:
// suite,n,epsilon,failure,model,tie,replica,seed,success,queries,error_norm
void write_records_csv(const std::vector<RunRecord>& records,
                       std::ostream& out);
std::vector<RunRecord> read_records_csv(std::istream& in);

// Records as a JSON array (same fields as the CSV).
std::string records_json(const std::vector<RunRecord>& records);

// Summary document: config echo, per-cell aggregates, labeled fits.
std::string summary_json(const SuiteResult& result);

}  // namespace compgrad
