#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "compgrad/experiments.hpp"
#include "compgrad/numerics.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& suite,
                std::uint64_t seed, bool seed_set, int replicas,
                const std::string& out_path, const std::string& format,
                int threads, bool threads_set) {
  compgrad::ExperimentConfig config;
  if (!config_path.empty()) config = compgrad::load_config(config_path);
  if (!suite.empty()) config.suite = suite;
  if (seed_set) config.base_seed = seed;
  if (replicas > 0) config.replicas = replicas;
  if (!out_path.empty()) config.out_path = out_path;
  if (!format.empty()) config.format = format;
  if (threads_set) config.threads = threads;
  if (config.suite.empty()) {
    std::cerr << "run: no suite selected (use --suite or a config file)\n";
    return 2;
  }

  const compgrad::SuiteResult result = compgrad::run_suite(config);

  const auto emit_records = [&](std::ostream& out) {
    if (config.format == "json") {
      out << compgrad::records_json(result.records) << '\n';
    } else {
      compgrad::write_records_csv(result.records, out);
    }
  };

  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "run: cannot open output file: " << config.out_path << '\n';
      return 2;
    }
    emit_records(out);
    std::cout << compgrad::summary_json(result) << '\n';
  } else {
    emit_records(std::cout);
  }
  return 0;
}

int fit_command(const std::string& in_path, const std::string& predictor) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) {
    std::cerr << "fit: cannot open records file: " << in_path << '\n';
    return 2;
  }
  const auto records = compgrad::read_records_csv(in);
  const auto fit = compgrad::fit_scaling(
      records, compgrad::parse_fit_predictor(predictor));
  nlohmann::ordered_json j;
  j["predictor"] = predictor;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["points"] = fit.points;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int report_command(const std::string& in_path) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) {
    std::cerr << "report: cannot open records file: " << in_path << '\n';
    return 2;
  }
  const auto records = compgrad::read_records_csv(in);

  using Key = std::tuple<std::string, int, double, double, std::string,
                         std::string>;
  std::map<Key, std::vector<const compgrad::RunRecord*>> groups;
  std::vector<Key> order;
  for (const auto& rec : records) {
    Key key{rec.suite, rec.n, rec.epsilon, rec.failure, rec.model, rec.tie};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&rec);
  }
  std::sort(order.begin(), order.end());

  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& key : order) {
    const auto& group = groups[key];
    long long successes = 0;
    long long exceptions = 0;
    double query_sum = 0.0;
    double error_sum = 0.0;
    long long error_count = 0;
    long long min_q = group.front()->queries;
    long long max_q = group.front()->queries;
    for (const auto* rec : group) {
      successes += rec->success ? 1 : 0;
      if (std::isnan(rec->error_norm)) {
        ++exceptions;
      } else {
        error_sum += rec->error_norm;
        ++error_count;
      }
      query_sum += double(rec->queries);
      min_q = std::min(min_q, rec->queries);
      max_q = std::max(max_q, rec->queries);
    }
    const long long total = (long long)group.size();
    const auto ci = compgrad::wilson_interval(successes, total);
    nlohmann::ordered_json c;
    c["suite"] = std::get<0>(key);
    c["n"] = std::get<1>(key);
    c["epsilon"] = std::get<2>(key);
    c["failure"] = std::get<3>(key);
    c["model"] = std::get<4>(key);
    c["tie"] = std::get<5>(key);
    c["replicas"] = total;
    c["successes"] = successes;
    c["exceptions"] = exceptions;
    c["success_rate"] = double(successes) / double(total);
    c["wilson_low"] = ci.lo;
    c["wilson_high"] = ci.hi;
    c["mean_queries"] = query_sum / double(total);
    c["min_queries"] = min_q;
    c["max_queries"] = max_q;
    c["mean_error"] = error_count > 0 ? error_sum / double(error_count) : 0.0;
    cells.push_back(std::move(c));
  }
  std::cout << cells.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison-oracle optimization experiment harness"};
  app.require_subcommand(1);

  std::string config_path, suite, out_path, format;
  std::uint64_t seed = 0;
  int replicas = 0;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run an experiment suite");
  run->add_option("--config", config_path, "Config file (key = value lines)");
  run->add_option("--suite", suite, "Suite name (overrides config)");
  auto* seed_opt = run->add_option("--seed", seed, "Base seed (overrides config)");
  run->add_option("--replicas", replicas, "Replicas per cell (overrides config)");
  run->add_option("--out", out_path, "Records output path (default: stdout)");
  run->add_option("--format", format, "Records format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* threads_opt =
      run->add_option("--threads", threads, "Worker threads (0 = hardware)");

  std::string fit_in, predictor = "n";
  auto* fit = app.add_subcommand("fit", "Fit query scaling from a records CSV");
  fit->add_option("--in", fit_in, "Records CSV path")->required();
  fit->add_option("--predictor", predictor,
                  "Predictor: n, log_inv_eps, or n_log_inv_eps")
      ->check(CLI::IsMember({"n", "log_inv_eps", "n_log_inv_eps"}));

  std::string report_in;
  auto* report =
      app.add_subcommand("report", "Summarize a records CSV per cell");
  report->add_option("--in", report_in, "Records CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, suite, seed, seed_opt->count() > 0,
                         replicas, out_path, format, threads,
                         threads_opt->count() > 0);
    }
    if (fit->parsed()) return fit_command(fit_in, predictor);
    if (report->parsed()) return report_command(report_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
