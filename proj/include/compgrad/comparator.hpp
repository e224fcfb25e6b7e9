#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>

#include "compgrad/functions.hpp"
#include "compgrad/rng.hpp"

namespace compgrad {

// Rule for the oracle's answer when the two function values are equal
// (or within tie_epsilon). The oracle contract permits either sign on a
// tie, so every downstream guarantee must survive all of these, including
// an adversarial callback that sees the query pair and the query count.
struct TiePolicy {
  enum class Kind { AlwaysPlus, AlwaysMinus, RandomSeeded, Adversarial };
  // Receives (x, y, number of earlier queries); must return +1 or -1.
  using AdversaryFn = std::function<int(const Eigen::VectorXd&,
                                        const Eigen::VectorXd&, long long)>;

  Kind kind = Kind::AlwaysPlus;
  std::uint64_t seed = 0;  // RandomSeeded
  AdversaryFn adversary;   // Adversarial

  static TiePolicy always_plus() { return TiePolicy{Kind::AlwaysPlus, 0, nullptr}; }
  static TiePolicy always_minus() { return TiePolicy{Kind::AlwaysMinus, 0, nullptr}; }
  static TiePolicy random_seeded(std::uint64_t seed) {
    return TiePolicy{Kind::RandomSeeded, seed, nullptr};
  }
  static TiePolicy adversarial(AdversaryFn fn) {
    return TiePolicy{Kind::Adversarial, 0, std::move(fn)};
  }

  const char* name() const {
    switch (kind) {
      case Kind::AlwaysPlus: return "always_plus";
      case Kind::AlwaysMinus: return "always_minus";
      case Kind::RandomSeeded: return "random_seeded";
      case Kind::Adversarial: return "adversarial";
    }
    return "unknown";
  }
};

// The only channel through which algorithms see a FunctionModel: pairwise
// comparisons, each one counted. compare gives +1 when f(x) > f(y) +
// tie_epsilon, -1 when f(x) < f(y) - tie_epsilon, and defers to the tie
// policy in between. tie_epsilon defaults to 0 (exact comparison); nonzero
// values exist to probe numerical robustness and are excluded from
// acceptance runs.
class ComparisonOracle {
 public:
  explicit ComparisonOracle(FunctionModel model,
                            TiePolicy policy = TiePolicy::always_plus(),
                            double tie_epsilon = 0.0);

  int compare(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  long long read_counter() const { return queries_.load(std::memory_order_relaxed); }
  void reset_counter() { queries_.store(0, std::memory_order_relaxed); }

  // Soft domain check: queries outside the model's declared ball are
  // answered normally but tallied here.
  long long out_of_domain_count() const {
    return out_of_domain_.load(std::memory_order_relaxed);
  }

  const FunctionModel& model() const { return model_; }
  int dimension() const { return model_.dimension(); }
  double tie_epsilon() const { return tie_epsilon_; }
  const TiePolicy& tie_policy() const { return policy_; }

 private:
  int resolve_tie(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  long long history);

  FunctionModel model_;
  TiePolicy policy_;
  double tie_epsilon_;
  std::atomic<long long> queries_{0};
  std::atomic<long long> out_of_domain_{0};
  std::mutex tie_mutex_;  // guards tie_rng_
  Rng tie_rng_;
};

}  // namespace compgrad
