#include "compgrad/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "compgrad/estimation.hpp"
#include "compgrad/parallel.hpp"
#include "compgrad/testing.hpp"

namespace compgrad {

namespace {

constexpr double kWilsonZ = 1.959963984540054;  // 95% two-sided normal quantile

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "dp_soundness", "test_randomized", "test_deterministic", "estimate",
      "quantum",      "concentration",   "overlap"};
  return names;
}

int suite_id(const std::string& suite) {
  const auto& names = suite_names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == suite) return int(i) + 1;
  }
  throw std::invalid_argument("unknown suite: " + suite);
}

bool suite_has_models(const std::string& suite) {
  return suite == "dp_soundness" || suite == "test_randomized" ||
         suite == "test_deterministic" || suite == "estimate" ||
         suite == "quantum";
}

bool suite_has_epsilon(const std::string& suite) {
  return suite == "test_randomized" || suite == "test_deterministic" ||
         suite == "estimate" || suite == "quantum";
}

bool suite_has_failure(const std::string& suite) {
  return suite == "test_randomized";
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long parse_int(const std::string& s, const std::string& key) {
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + s +
                                "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + s +
                                "'");
  }
  return v;
}

double parse_real(const std::string& s, const std::string& key) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + s +
                                "'");
  }
  return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("config key '" + key + "': bad boolean '" + s +
                              "'");
}

// One grid point of a sweep; axes a suite does not use stay at their
// placeholder values.
struct Cell {
  int n = 0;
  double epsilon = 0.0;
  double failure = 0.0;
  ModelKind model = ModelKind::Hyperplane;
  std::string model_name = "-";
  std::string tie = "-";
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& config) {
  const bool with_eps = suite_has_epsilon(config.suite);
  const bool with_fail = suite_has_failure(config.suite);
  const bool with_models = suite_has_models(config.suite);
  const std::vector<double> eps_axis =
      with_eps ? config.epsilons : std::vector<double>{0.0};
  const std::vector<double> fail_axis =
      with_fail ? config.failures : std::vector<double>{0.0};

  std::vector<Cell> cells;
  for (int n : config.dims) {
    for (double eps : eps_axis) {
      for (double fail : fail_axis) {
        if (!with_models) {
          Cell cell;
          cell.n = n;
          cell.epsilon = eps;
          cell.failure = fail;
          cells.push_back(cell);
          continue;
        }
        for (ModelKind kind : config.models) {
          for (const std::string& tie : config.ties) {
            Cell cell;
            cell.n = n;
            cell.epsilon = eps;
            cell.failure = fail;
            cell.model = kind;
            cell.model_name = model_kind_name(kind);
            cell.tie = tie;
            cells.push_back(cell);
          }
        }
      }
    }
  }
  return cells;
}

long long grid_amplitudes(long long t, int n, long long cap) {
  const long long T = t + 1;
  long long total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > cap / T) return cap + 1;
    total *= T;
  }
  return total;
}

double violation_of(const DpVerdict& verdict, const Eigen::VectorXd& grad) {
  const double d = verdict.direction.dot(grad);
  return verdict.kind == DpKind::AtLeastMinusDelta
             ? std::max(0.0, -verdict.delta - d)
             : std::max(0.0, d - verdict.delta);
}

RunRecord run_one(const ExperimentConfig& config, const Cell& cell,
                  int replica, std::uint64_t seed) {
  RunRecord rec;
  rec.suite = config.suite;
  rec.n = cell.n;
  rec.epsilon = cell.epsilon;
  rec.failure = cell.failure;
  rec.model = cell.model_name;
  rec.tie = cell.tie;
  rec.replica = replica;
  rec.seed = seed;

  Rng rng(seed);
  const std::uint64_t tie_seed = mix_seed(seed, 0x7125);

  if (config.suite == "dp_soundness") {
    EstimateInstance inst = make_estimate_instance(cell.n, cell.model, rng);
    ComparisonOracle oracle(inst.model, parse_tie_policy(cell.tie, tie_seed));
    const UnitVector v = sample_sphere(cell.n, rng);
    // Probe resolutions spread over decades; the floor keeps verdict
    // margins far above float noise in the two function values.
    const double delta = std::exp(rng.uniform(std::log(1e-5), 0.0));
    const DpVerdict verdict =
        dp(oracle, inst.x, v, delta, inst.model.smoothness());
    const Eigen::VectorXd grad = VerificationHandle(inst.model).gradient(inst.x);
    rec.error_norm = violation_of(verdict, grad);
    rec.success = rec.error_norm <= 1e-9 * (1.0 + grad.norm());
    rec.queries = 1;
  } else if (config.suite == "test_randomized" ||
             config.suite == "test_deterministic") {
    const bool is_yes = replica % 2 == 0;
    PromiseInstance inst =
        make_promise_instance(cell.n, cell.epsilon, cell.model, is_yes, rng);
    ComparisonOracle oracle(inst.model, parse_tie_policy(cell.tie, tie_seed));
    TestParams params;
    params.epsilon = cell.epsilon;
    params.gamma = inst.gamma;
    if (cell.failure > 0.0) params.failure = cell.failure;
    const TestVerdict verdict =
        config.suite == "test_randomized"
            ? test_randomized(oracle, inst.x, inst.v, params, rng)
            : test_deterministic(oracle, inst.x, inst.v, params);
    rec.success = (verdict.answer == TestAnswer::Yes) == is_yes;
    rec.queries = verdict.queries_used;
    rec.error_norm = inst.distance;
  } else if (config.suite == "estimate") {
    EstimateInstance inst = make_estimate_instance(cell.n, cell.model, rng);
    ComparisonOracle oracle(inst.model, parse_tie_policy(cell.tie, tie_seed));
    const double L = inst.model.smoothness();
    if (!config.boosted) {
      const EstimateResult res =
          estimate(oracle, inst.x, cell.epsilon, inst.gamma, L, rng);
      rec.error_norm = (res.direction.vec() - inst.g.vec()).norm();
      rec.queries = res.queries_used;
    } else {
      // Extension: medoid of several independent attempts (the direction
      // minimizing total distance to the others).
      std::vector<UnitVector> attempts;
      for (int a = 0; a < config.boost_attempts; ++a) {
        EstimateResult res =
            estimate(oracle, inst.x, cell.epsilon, inst.gamma, L, rng);
        rec.queries += res.queries_used;
        attempts.push_back(std::move(res.direction));
      }
      size_t best = 0;
      double best_total = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < attempts.size(); ++i) {
        double total = 0.0;
        for (size_t j = 0; j < attempts.size(); ++j) {
          total += (attempts[i].vec() - attempts[j].vec()).norm();
        }
        if (total < best_total) {
          best_total = total;
          best = i;
        }
      }
      rec.error_norm = (attempts[best].vec() - inst.g.vec()).norm();
    }
    rec.success = rec.error_norm <= cell.epsilon;
  } else if (config.suite == "quantum") {
    EstimateInstance inst = make_estimate_instance(cell.n, cell.model, rng);
    ComparisonOracle oracle(inst.model, parse_tie_policy(cell.tie, tie_seed));
    QuantumOptions options;
    options.t_override = config.quantum_t;
    options.amplitude_cap = config.amplitude_cap;
    options.share_search_across_first_axis = true;
    const QuantumRunResult res = simulate_quantum_estimation(
        oracle, inst.x, cell.epsilon, inst.gamma, inst.model.smoothness(), rng,
        options);
    rec.error_norm = (res.direction.vec() - inst.g.vec()).norm();
    rec.success = rec.error_norm <= cell.epsilon;
    rec.queries = res.queries_used;
  } else if (config.suite == "concentration") {
    const ConcentrationReport report =
        verify_concentration(cell.n, config.samples, rng);
    rec.success = report.satisfied();
    rec.queries = report.samples;
    // Worst margin by which the three empirical fractions clear their
    // bounds (negative when an empirical point estimate sits past a bound).
    rec.error_norm = std::min(
        {report.fraction_small - report.bound_small,
         report.bound_tiny - report.fraction_tiny,
         report.fraction_large - report.bound_large});
  } else if (config.suite == "overlap") {
    const OverlapReport report =
        verify_basis_overlap(cell.n, config.samples, rng);
    const double lower =
        report.conditional_mean - kWilsonZ * report.standard_error;
    rec.success = report.reliable && lower > 0.7;
    rec.queries = report.proposed;
    rec.error_norm = report.conditional_mean;
  } else {
    throw std::invalid_argument("unknown suite: " + config.suite);
  }
  return rec;
}

double predictor_value(const RunRecord& rec, FitPredictor predictor) {
  switch (predictor) {
    case FitPredictor::N:
      return double(rec.n);
    case FitPredictor::LogInvEps:
      return std::log2(1.0 / rec.epsilon);
    case FitPredictor::NLogInvEps:
      return double(rec.n) * std::log2(1.0 / rec.epsilon);
  }
  throw std::invalid_argument("unknown fit predictor");
}

void append_fits(SuiteResult& result) {
  const auto try_fit = [&](const std::string& label,
                           const std::vector<RunRecord>& records,
                           FitPredictor predictor) {
    try {
      result.fits.emplace_back(label, fit_scaling(records, predictor));
    } catch (const std::invalid_argument&) {
      // Not enough distinct predictor values in this sweep; skip the fit.
    }
  };

  const std::string& suite = result.config.suite;
  if (suite == "test_randomized" || suite == "test_deterministic") {
    try_fit("queries_vs_n", result.records, FitPredictor::N);
    return;
  }
  if (suite != "estimate") return;

  try_fit("queries_vs_n_log_inv_eps", result.records,
          FitPredictor::NLogInvEps);
  std::set<int> dims;
  std::set<double> epsilons;
  for (const auto& r : result.records) {
    dims.insert(r.n);
    epsilons.insert(r.epsilon);
  }

  for (double eps : epsilons) {
    std::vector<RunRecord> slice;
    for (const auto& r : result.records) {
      if (r.epsilon == eps) slice.push_back(r);
    }
    try_fit("queries_vs_n@eps=" + format_double(eps), slice, FitPredictor::N);
  }
  for (int n : dims) {
    std::vector<RunRecord> slice;
    for (const auto& r : result.records) {
      if (r.n == n) slice.push_back(r);
    }
    try_fit("queries_vs_log_inv_eps@n=" + std::to_string(n), slice,
            FitPredictor::LogInvEps);
  }
}

nlohmann::ordered_json config_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["suite"] = config.suite;
  j["n"] = config.dims;
  j["epsilon"] = config.epsilons;
  j["delta"] = config.failures;
  std::vector<std::string> models;
  for (ModelKind kind : config.models) models.push_back(model_kind_name(kind));
  j["models"] = models;
  j["ties"] = config.ties;
  j["seed"] = config.base_seed;
  j["replicas"] = config.replicas;
  j["samples"] = config.samples;
  if (config.quantum_t) j["quantum_t"] = *config.quantum_t;
  j["amplitude_cap"] = config.amplitude_cap;
  j["boosted"] = config.boosted;
  if (config.boosted) j["boost_attempts"] = config.boost_attempts;
  return j;
}

}  // namespace

TiePolicy parse_tie_policy(const std::string& name, std::uint64_t seed) {
  if (name == "always_plus") return TiePolicy::always_plus();
  if (name == "always_minus") return TiePolicy::always_minus();
  if (name == "random_seeded") return TiePolicy::random_seeded(seed);
  if (name == "adversarial") {
    return TiePolicy::adversarial(
        [](const Eigen::VectorXd&, const Eigen::VectorXd&,
           long long history) { return history % 2 == 0 ? +1 : -1; });
  }
  throw std::invalid_argument("unknown tie policy: " + name);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "suite") {
      config.suite = value;
    } else if (key == "n") {
      config.dims.clear();
      for (const auto& item : split_list(value)) {
        config.dims.push_back(int(parse_int(item, key)));
      }
    } else if (key == "epsilon") {
      config.epsilons.clear();
      for (const auto& item : split_list(value)) {
        config.epsilons.push_back(parse_real(item, key));
      }
    } else if (key == "delta") {
      config.failures.clear();
      for (const auto& item : split_list(value)) {
        config.failures.push_back(parse_real(item, key));
      }
    } else if (key == "models") {
      config.models.clear();
      for (const auto& item : split_list(value)) {
        config.models.push_back(parse_model_kind(item));
      }
    } else if (key == "ties") {
      config.ties = split_list(value);
    } else if (key == "seed") {
      config.base_seed = parse_uint(value, key);
    } else if (key == "replicas") {
      config.replicas = int(parse_int(value, key));
    } else if (key == "samples") {
      config.samples = parse_int(value, key);
    } else if (key == "quantum_t") {
      config.quantum_t = parse_int(value, key);
    } else if (key == "amplitude_cap") {
      config.amplitude_cap = parse_int(value, key);
    } else if (key == "threads") {
      config.threads = int(parse_int(value, key));
    } else if (key == "boosted") {
      config.boosted = parse_bool(value, key);
    } else if (key == "boost_attempts") {
      config.boost_attempts = int(parse_int(value, key));
    } else if (key == "out") {
      config.out_path = value;
    } else if (key == "format") {
      config.format = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void validate_config(const ExperimentConfig& config) {
  suite_id(config.suite);  // throws on unknown suites
  if (config.dims.empty()) throw std::invalid_argument("empty n grid");
  if (config.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  if (config.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (config.format != "csv" && config.format != "json") {
    throw std::invalid_argument("format must be csv or json");
  }
  if (config.boosted && config.boost_attempts < 1) {
    throw std::invalid_argument("boost_attempts must be >= 1");
  }

  int min_dim = 1;
  if (config.suite == "test_deterministic") min_dim = 2;
  if (config.suite == "concentration") min_dim = 5;
  if (config.suite == "test_randomized") min_dim = 6;
  if (config.suite == "overlap") min_dim = 500;
  for (int n : config.dims) {
    if (n < min_dim) {
      throw std::invalid_argument("suite " + config.suite +
                                  " requires n >= " + std::to_string(min_dim) +
                                  ", got " + std::to_string(n));
    }
  }

  if (suite_has_epsilon(config.suite)) {
    if (config.epsilons.empty()) {
      throw std::invalid_argument("empty epsilon grid");
    }
    const double eps_max = 1.0 / std::sqrt(2.0);
    for (double eps : config.epsilons) {
      if (!std::isfinite(eps) || eps <= 0.0 || eps >= eps_max) {
        throw std::invalid_argument("epsilon " + format_double(eps) +
                                    " outside (0, 1/sqrt(2))");
      }
    }
  }
  if (suite_has_failure(config.suite)) {
    if (config.failures.empty()) throw std::invalid_argument("empty delta grid");
    for (double f : config.failures) {
      if (!std::isfinite(f) || f <= 0.0 || f >= 1.0) {
        throw std::invalid_argument("delta " + format_double(f) +
                                    " outside (0, 1)");
      }
    }
  }
  if (suite_has_models(config.suite)) {
    if (config.models.empty()) throw std::invalid_argument("empty model list");
    if (config.ties.empty()) throw std::invalid_argument("empty tie list");
    for (const auto& tie : config.ties) parse_tie_policy(tie, 1);
  }
  if (config.suite == "quantum") {
    for (int n : config.dims) {
      for (double eps : config.epsilons) {
        const long long t =
            config.quantum_t ? *config.quantum_t
                             : (long long)std::ceil(10.0 * n * n / eps);
        if (t < 1) throw std::invalid_argument("quantum_t must be >= 1");
        if (grid_amplitudes(t, n, config.amplitude_cap) >
            config.amplitude_cap) {
          throw std::invalid_argument(
              "quantum grid (t+1)^n with t = " + std::to_string(t) +
              ", n = " + std::to_string(n) + " exceeds the amplitude cap " +
              std::to_string(config.amplitude_cap));
        }
      }
    }
  }
}

FitPredictor parse_fit_predictor(const std::string& name) {
  if (name == "n") return FitPredictor::N;
  if (name == "log_inv_eps") return FitPredictor::LogInvEps;
  if (name == "n_log_inv_eps") return FitPredictor::NLogInvEps;
  throw std::invalid_argument("unknown fit predictor: " + name);
}

FitResult fit_scaling(const std::vector<RunRecord>& records,
                      FitPredictor predictor) {
  std::map<double, std::pair<double, long long>> groups;  // value -> (sum, count)
  for (const auto& rec : records) {
    auto& g = groups[predictor_value(rec, predictor)];
    g.first += double(rec.queries);
    g.second += 1;
  }
  if (groups.size() < 4) {
    throw std::invalid_argument(
        "fit_scaling needs >= 4 distinct predictor values, got " +
        std::to_string(groups.size()));
  }

  const double m = double(groups.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, g] : groups) {
    const double y = g.first / double(g.second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) {
    throw std::invalid_argument("fit_scaling: degenerate predictor values");
  }
  FitResult fit;
  fit.points = int(groups.size());
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;

  const double mean_y = sy / m;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [x, g] : groups) {
    const double y = g.first / double(g.second);
    const double pred = fit.intercept + fit.slope * x;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

SuiteResult run_suite(const ExperimentConfig& config) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<Cell> cells = enumerate_cells(config);
  const int sid = suite_id(config.suite);
  const size_t per_cell = size_t(config.replicas);

  SuiteResult result;
  result.config = config;
  result.records.resize(cells.size() * per_cell);

  parallel_for(
      result.records.size(),
      [&](size_t idx) {
        const size_t cell_idx = idx / per_cell;
        const int replica = int(idx % per_cell);
        const std::uint64_t seed = mix_seed(
            config.base_seed, std::uint64_t(sid), std::uint64_t(cell_idx),
            std::uint64_t(replica));
        const auto start = std::chrono::steady_clock::now();
        RunRecord rec;
        try {
          rec = run_one(config, cells[cell_idx], replica, seed);
        } catch (const std::exception&) {
          // Partial-failure tolerant: a replica that throws is recorded as
          // an unsuccessful run (NaN error marks the exception).
          const Cell& cell = cells[cell_idx];
          rec.suite = config.suite;
          rec.n = cell.n;
          rec.epsilon = cell.epsilon;
          rec.failure = cell.failure;
          rec.model = cell.model_name;
          rec.tie = cell.tie;
          rec.replica = replica;
          rec.seed = seed;
          rec.success = false;
          rec.queries = 0;
          rec.error_norm = std::numeric_limits<double>::quiet_NaN();
        }
        rec.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        result.records[idx] = std::move(rec);
      },
      config.threads);

  result.cells.reserve(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    CellSummary cell;
    cell.n = cells[c].n;
    cell.epsilon = cells[c].epsilon;
    cell.failure = cells[c].failure;
    cell.model = cells[c].model_name;
    cell.tie = cells[c].tie;
    cell.replicas = config.replicas;
    double query_sum = 0.0;
    double error_sum = 0.0;
    long long error_count = 0;
    for (size_t r = 0; r < per_cell; ++r) {
      const RunRecord& rec = result.records[c * per_cell + r];
      cell.successes += rec.success ? 1 : 0;
      if (std::isnan(rec.error_norm)) {
        ++cell.exceptions;
      } else {
        error_sum += rec.error_norm;
        ++error_count;
      }
      query_sum += double(rec.queries);
      cell.min_queries = r == 0 ? rec.queries
                                : std::min(cell.min_queries, rec.queries);
      cell.max_queries = std::max(cell.max_queries, rec.queries);
      cell.wall_time += rec.wall_time;
    }
    cell.success_rate = double(cell.successes) / double(cell.replicas);
    cell.ci = wilson_interval(cell.successes, cell.replicas, kWilsonZ);
    cell.mean_queries = query_sum / double(cell.replicas);
    cell.mean_error = error_count > 0 ? error_sum / double(error_count) : 0.0;
    result.cells.push_back(cell);
  }

  append_fits(result);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

std::string format_double(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

void write_records_csv(const std::vector<RunRecord>& records,
                       std::ostream& out) {
  out << "suite,n,epsilon,failure,model,tie,replica,seed,success,queries,"
         "error_norm\n";
  for (const auto& rec : records) {
    out << rec.suite << ',' << rec.n << ',' << format_double(rec.epsilon)
        << ',' << format_double(rec.failure) << ',' << rec.model << ','
        << rec.tie << ',' << rec.replica << ',' << rec.seed << ','
        << (rec.success ? 1 : 0) << ',' << rec.queries << ','
        << format_double(rec.error_norm) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("records CSV: missing header");
  }
  if (trim(line) !=
      "suite,n,epsilon,failure,model,tie,replica,seed,success,queries,"
      "error_norm") {
    throw std::runtime_error("records CSV: unexpected header: " + line);
  }
  std::vector<RunRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 11) {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) +
                               ": expected 11 fields");
    }
    RunRecord rec;
    rec.suite = fields[0];
    rec.n = int(parse_int(fields[1], "n"));
    rec.epsilon = parse_real(fields[2], "epsilon");
    rec.failure = parse_real(fields[3], "failure");
    rec.model = fields[4];
    rec.tie = fields[5];
    rec.replica = int(parse_int(fields[6], "replica"));
    rec.seed = parse_uint(fields[7], "seed");
    rec.success = parse_int(fields[8], "success") != 0;
    rec.queries = parse_int(fields[9], "queries");
    rec.error_norm = parse_real(fields[10], "error_norm");
    records.push_back(std::move(rec));
  }
  return records;
}

std::string records_json(const std::vector<RunRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& rec : records) {
    nlohmann::ordered_json j;
    j["suite"] = rec.suite;
    j["n"] = rec.n;
    j["epsilon"] = rec.epsilon;
    j["failure"] = rec.failure;
    j["model"] = rec.model;
    j["tie"] = rec.tie;
    j["replica"] = rec.replica;
    j["seed"] = rec.seed;
    j["success"] = rec.success;
    j["queries"] = rec.queries;
    if (std::isnan(rec.error_norm)) {
      j["error_norm"] = nullptr;
    } else {
      j["error_norm"] = rec.error_norm;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::string summary_json(const SuiteResult& result) {
  nlohmann::ordered_json j;
  j["suite"] = result.config.suite;
  j["config"] = config_json(result.config);
  j["totals"] = {{"records", result.records.size()},
                 {"wall_time_seconds", result.wall_time}};
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& cell : result.cells) {
    nlohmann::ordered_json c;
    c["n"] = cell.n;
    c["epsilon"] = cell.epsilon;
    c["failure"] = cell.failure;
    c["model"] = cell.model;
    c["tie"] = cell.tie;
    c["replicas"] = cell.replicas;
    c["successes"] = cell.successes;
    c["exceptions"] = cell.exceptions;
    c["success_rate"] = cell.success_rate;
    c["wilson_low"] = cell.ci.lo;
    c["wilson_high"] = cell.ci.hi;
    c["mean_queries"] = cell.mean_queries;
    c["min_queries"] = cell.min_queries;
    c["max_queries"] = cell.max_queries;
    c["mean_error"] = cell.mean_error;
    c["wall_time_seconds"] = cell.wall_time;
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (const auto& [label, fit] : result.fits) {
    nlohmann::ordered_json f;
    f["label"] = label;
    f["slope"] = fit.slope;
    f["intercept"] = fit.intercept;
    f["r_squared"] = fit.r_squared;
    f["points"] = fit.points;
    fits.push_back(std::move(f));
  }
  j["fits"] = std::move(fits);
  return j.dump(2);
}

}  // namespace compgrad
