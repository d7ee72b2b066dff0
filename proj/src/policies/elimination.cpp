#include "pegp/policies/elimination.hpp"

#include <cmath>
#include <limits>

#include "pegp/errors.hpp"

namespace pegp::policies {

PolicyState::PolicyState(std::vector<std::string> prior_ids) {
  if (prior_ids.empty()) throw PolicyError("policy needs at least one prior");
  for (auto& id : prior_ids) {
    PriorLedger l;
    l.id = std::move(id);
    ledgers_.push_back(std::move(l));
  }
}

std::vector<bool> PolicyState::alive_mask() const {
  std::vector<bool> out;
  out.reserve(ledgers_.size());
  for (const auto& l : ledgers_) out.push_back(!l.eliminated);
  return out;
}

int PolicyState::num_alive() const {
  int n = 0;
  for (const auto& l : ledgers_) n += l.eliminated ? 0 : 1;
  return n;
}

Selection pe_gp_ucb_select(const PolicyState& state, const PosteriorTable& table, const Eigen::VectorXd& betas) {
  if (state.num_alive() == 0) throw PolicyError("surviving prior set is empty");
  if (static_cast<std::size_t>(table.num_priors()) != state.num_priors())
    throw PolicyError("posterior table does not match the prior set");
  return joint_ucb_select(table, betas, state.alive_mask());
}

namespace {

double threshold_of(const PriorLedger& l, double xi_t) {
  return std::sqrt(xi_t * static_cast<double>(l.steps.size())) + l.beta_sigma_sum;
}

}  // namespace

UpdateOutcome pe_gp_ucb_update(PolicyState& state, const Selection& chosen, double y, int t,
                               const ConfidenceSchedule& schedule) {
  if (chosen.prior < 0 || static_cast<std::size_t>(chosen.prior) >= state.num_priors())
    throw PolicyError("selected prior index out of range");
  auto& ledger = state.ledgers()[static_cast<std::size_t>(chosen.prior)];
  if (ledger.eliminated) throw PolicyError("selected prior '" + ledger.id + "' was already eliminated");

  UpdateOutcome out;
  out.eta = y - chosen.mean;
  out.xi = schedule.xi(t);
  ledger.steps.push_back(t);
  ledger.errors.push_back(out.eta);
  ledger.eta_sum += out.eta;
  ledger.beta_sigma_sum += chosen.beta * chosen.sigma;
  out.abs_error_sum = std::abs(ledger.eta_sum);
  out.threshold = threshold_of(ledger, out.xi);
  if (out.abs_error_sum <= out.threshold) return out;

  ledger.eliminated = true;
  ledger.eliminated_at = t;
  out.eliminated = chosen.prior;

  if (state.num_alive() == 0) {
    // Cannot happen in exact arithmetic under the concentration events; keep
    // the prior whose violation is smallest.
    int best = -1;
    double best_violation = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < state.num_priors(); ++p) {
      const auto& l = state.ledgers()[p];
      const double violation = std::abs(l.eta_sum) - threshold_of(l, out.xi);
      if (violation < best_violation) {
        best_violation = violation;
        best = static_cast<int>(p);
      }
    }
    auto& back = state.ledgers()[static_cast<std::size_t>(best)];
    back.eliminated = false;
    back.eliminated_at = 0;
    out.reinstated = best;
    state.warnings.push_back("t=" + std::to_string(t) + ": surviving set became empty; reinstated prior '" + back.id +
                             "'");
  }
  return out;
}

RegretBalancingState::RegretBalancingState(std::vector<std::string> prior_ids, std::vector<RegretBound> bounds) {
  if (prior_ids.empty()) throw PolicyError("policy needs at least one prior");
  if (bounds.empty()) bounds.assign(prior_ids.size(), linear_regret_bound());
  if (bounds.size() != prior_ids.size()) throw PolicyError("need one suspected regret bound per prior");
  for (auto& id : prior_ids) {
    BalancingLedger l;
    l.id = std::move(id);
    ledgers_.push_back(std::move(l));
  }
  bounds_ = std::move(bounds);
}

int RegretBalancingState::num_alive() const {
  int n = 0;
  for (const auto& l : ledgers_) n += l.eliminated ? 0 : 1;
  return n;
}

double RegretBalancingState::lower_value(int p, double xi_t) const {
  const auto& l = ledger(p);
  if (l.count == 0) throw PolicyError("lower value undefined for an unused prior");
  const double n = l.count;
  return l.y_sum / n - std::sqrt(xi_t / n);
}

Selection regret_balancing_select(const RegretBalancingState& state, const PosteriorTable& table,
                                  const Eigen::VectorXd& betas) {
  int prior = -1;
  double lowest = std::numeric_limits<double>::infinity();
  for (int p = 0; p < static_cast<int>(state.num_priors()); ++p) {
    const auto& l = state.ledger(p);
    if (l.eliminated) continue;
    const double bound = state.bound(p)(l.count + 1);
    if (prior < 0 || bound < lowest) {
      lowest = bound;
      prior = p;
    }
  }
  if (prior < 0) throw PolicyError("surviving prior set is empty");
  return ucb_select(table, betas, prior);
}

std::vector<int> regret_balancing_update(RegretBalancingState& state, const Selection& chosen, double y, int t,
                                         const ConfidenceSchedule& schedule) {
  if (chosen.prior < 0 || static_cast<std::size_t>(chosen.prior) >= state.num_priors())
    throw PolicyError("selected prior index out of range");
  auto& ledger = state.ledgers()[static_cast<std::size_t>(chosen.prior)];
  if (ledger.eliminated) throw PolicyError("selected prior '" + ledger.id + "' was already eliminated");
  ledger.count += 1;
  ledger.y_sum += y;
  ledger.beta_sigma_sum += chosen.beta * chosen.sigma;

  std::vector<int> dropped;
  const int n = static_cast<int>(state.num_priors());
  for (int p = 0; p < n; ++p)
    if (!state.ledger(p).eliminated && state.ledger(p).count == 0) return dropped;

  const double xi_t = schedule.xi(t);
  double best = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < n; ++p)
    if (!state.ledger(p).eliminated) best = std::max(best, state.lower_value(p, xi_t));
  for (int p = 0; p < n; ++p) {
    const auto& l = state.ledger(p);
    if (l.eliminated) continue;
    const double optimism = l.beta_sigma_sum / static_cast<double>(l.count);
    if (state.lower_value(p, xi_t) + optimism < best) dropped.push_back(p);
  }
  for (int p : dropped) {
    state.ledgers()[static_cast<std::size_t>(p)].eliminated = true;
    state.ledgers()[static_cast<std::size_t>(p)].eliminated_at = t;
  }
  return dropped;
}

}  // namespace pegp::policies
