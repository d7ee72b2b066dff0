#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pegp/policies/selection.hpp"

namespace pegp::policies {

/// Per-prior bookkeeping for the elimination test.
struct PriorLedger {
  std::string id;
  std::vector<int> steps;       // iterations at which this prior was selected
  std::vector<double> errors;   // eta_i for i in steps
  double eta_sum = 0.0;
  double beta_sigma_sum = 0.0;  // sum of beta_i * sigma_{i-1}(x_i) at selection time
  bool eliminated = false;
  int eliminated_at = 0;
};

/// Surviving prior set plus one ledger per registered prior.
class PolicyState {
 public:
  explicit PolicyState(std::vector<std::string> prior_ids);

  const std::vector<PriorLedger>& ledgers() const { return ledgers_; }
  std::vector<PriorLedger>& ledgers() { return ledgers_; }
  const PriorLedger& ledger(int p) const { return ledgers_.at(static_cast<std::size_t>(p)); }
  std::vector<bool> alive_mask() const;
  int num_alive() const;
  bool alive(int p) const { return !ledger(p).eliminated; }
  std::size_t num_priors() const { return ledgers_.size(); }

  std::vector<std::string> warnings;

 private:
  std::vector<PriorLedger> ledgers_;
};

/// Result of one elimination update.
struct UpdateOutcome {
  double eta = 0.0;
  double abs_error_sum = 0.0;
  double threshold = 0.0;  // sqrt(xi_t |S|) + sum beta sigma
  double xi = 0.0;
  std::optional<int> eliminated;
  std::optional<int> reinstated;  // set when the surviving set would have become empty
};

/// Doubly optimistic selection over feasible x surviving priors.
Selection pe_gp_ucb_select(const PolicyState& state, const PosteriorTable& table, const Eigen::VectorXd& betas);

/// Records y for the selected prior and eliminates it when
/// |sum eta| > sqrt(xi_t |S|) + sum beta sigma.
UpdateOutcome pe_gp_ucb_update(PolicyState& state, const Selection& chosen, double y, int t,
                               const ConfidenceSchedule& schedule);

/// Suspected regret bound R^p(n) for the n-th use of a prior.
using RegretBound = std::function<double(int)>;

inline RegretBound linear_regret_bound() {
  return [](int n) { return static_cast<double>(n); };
}

struct BalancingLedger {
  std::string id;
  int count = 0;
  double y_sum = 0.0;
  double beta_sigma_sum = 0.0;
  bool eliminated = false;
  int eliminated_at = 0;
};

class RegretBalancingState {
 public:
  RegretBalancingState(std::vector<std::string> prior_ids, std::vector<RegretBound> bounds = {});

  const std::vector<BalancingLedger>& ledgers() const { return ledgers_; }
  const BalancingLedger& ledger(int p) const { return ledgers_.at(static_cast<std::size_t>(p)); }
  const RegretBound& bound(int p) const { return bounds_.at(static_cast<std::size_t>(p)); }
  std::vector<BalancingLedger>& ledgers() { return ledgers_; }
  int num_alive() const;
  std::size_t num_priors() const { return ledgers_.size(); }

  /// L_t(p) = mean y under p - sqrt(xi / |S^p|).
  double lower_value(int p, double xi_t) const;

 private:
  std::vector<BalancingLedger> ledgers_;
  std::vector<RegretBound> bounds_;
};

/// Prior with the smallest R^p(|S^p| + 1), then its UCB argmax.
Selection regret_balancing_select(const RegretBalancingState& state, const PosteriorTable& table,
                                  const Eigen::VectorXd& betas);

/// Records y and, once every surviving prior has been used, drops priors with
/// L_t(p) + mean(beta sigma) < max_p' L_t(p'). Returns eliminated prior indices.
std::vector<int> regret_balancing_update(RegretBalancingState& state, const Selection& chosen, double y, int t,
                                         const ConfidenceSchedule& schedule);

}  // namespace pegp::policies
