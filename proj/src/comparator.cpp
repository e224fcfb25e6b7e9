#include "compgrad/comparator.hpp"

#include <stdexcept>

namespace compgrad {

ComparisonOracle::ComparisonOracle(FunctionModel model, TiePolicy policy,
                                   double tie_epsilon)
    : model_(std::move(model)),
      policy_(std::move(policy)),
      tie_epsilon_(tie_epsilon),
      tie_rng_(policy_.seed) {
  if (tie_epsilon_ < 0.0)
    throw std::invalid_argument("ComparisonOracle: tie_epsilon must be >= 0");
  if (policy_.kind == TiePolicy::Kind::Adversarial && !policy_.adversary)
    throw std::invalid_argument("ComparisonOracle: adversarial policy needs a callback");
}

int ComparisonOracle::compare(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  // history = queries answered before this one; incremented unconditionally.
  const long long history = queries_.fetch_add(1, std::memory_order_relaxed);
  if (!model_.in_domain(x) || !model_.in_domain(y))
    out_of_domain_.fetch_add(1, std::memory_order_relaxed);
  const double fx = model_.evaluate(x);
  const double fy = model_.evaluate(y);
  if (fx > fy + tie_epsilon_) return 1;
  if (fx < fy - tie_epsilon_) return -1;
  return resolve_tie(x, y, history);
}

int ComparisonOracle::resolve_tie(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y, long long history) {
  switch (policy_.kind) {
    case TiePolicy::Kind::AlwaysPlus:
      return 1;
    case TiePolicy::Kind::AlwaysMinus:
      return -1;
    case TiePolicy::Kind::RandomSeeded: {
      std::lock_guard<std::mutex> lock(tie_mutex_);
      return tie_rng_.next_u64() & 1 ? 1 : -1;
    }
    case TiePolicy::Kind::Adversarial: {
      const int r = policy_.adversary(x, y, history);
      if (r != 1 && r != -1)
        throw std::runtime_error("ComparisonOracle: adversary must return +1 or -1");
      return r;
    }
  }
  return 1;
}

}  // namespace compgrad
