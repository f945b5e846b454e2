#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "cth/game.hpp"

namespace cth {

/// Game produced by REPLACE: a subset of agents is fixed to given
/// policies and folded into the transition function. Remaining agents
/// are renumbered in ascending original-index order; original ids are
/// recoverable through original_id().
///
/// Transitions marginalize over the replaced agents' policies:
///   T'(s'|s, a_-R) = sum_{a_R} T(s'|s, a_-R, a_R) * prod_r pi_r(a_r|s)
/// For deterministic fixed policies this collapses to the indicator form.
/// Rewards of remaining agents are kept, taken in expectation over the
/// replaced actions conditioned on the realized successor state.
class ReplacedGame : public StochasticGame {
 public:
  ReplacedGame(GamePtr base, std::map<AgentId, Policy> fixed)
      : base_(std::move(base)), fixed_(std::move(fixed)) {
    if (fixed_.empty()) throw DomainError("replace: no agents to fix");
    const int n = base_->n_agents();
    for (const auto& [id, pol] : fixed_) {
      if (id < 0 || id >= n) throw DomainError("replace: unknown agent id " + std::to_string(id));
      if (!pol.valid()) throw DomainError("replace: invalid policy for agent " + std::to_string(id));
    }
    if (static_cast<int>(fixed_.size()) >= n)
      throw ArityError("replace: cannot fix all agents of the game");
    for (AgentId i = 0; i < n; ++i)
      if (!fixed_.count(i)) kept_.push_back(i);
  }

  int n_agents() const override { return static_cast<int>(kept_.size()); }
  double discount() const override { return base_->discount(); }
  bool is_terminal(StateId s) const override { return base_->is_terminal(s); }

  std::vector<ActionId> legal_actions(StateId s, AgentId agent) const override {
    return base_->legal_actions(s, to_base(agent));
  }

  std::vector<Transition> transition_dist(StateId s, const JointAction& a) const override {
    check_arity(a);
    std::map<StateId, double> acc;
    for (const auto& [full, w] : expand(s, a)) {
      for (const auto& tr : base_->transition_dist(s, full)) acc[tr.next] += w * tr.prob;
    }
    std::vector<Transition> out;
    out.reserve(acc.size());
    for (const auto& [next, p] : acc)
      if (p > 0.0) out.push_back({next, p});
    return out;
  }

  std::vector<double> reward_vector(StateId s, const JointAction& a, StateId next) const override {
    check_arity(a);
    std::vector<double> num(kept_.size(), 0.0);
    double denom = 0.0;
    for (const auto& [full, w] : expand(s, a)) {
      for (const auto& tr : base_->transition_dist(s, full)) {
        if (tr.next != next) continue;
        const double p = w * tr.prob;
        if (p <= 0.0) continue;
        auto r = base_->reward_vector(s, full, next);
        for (std::size_t i = 0; i < kept_.size(); ++i) num[i] += p * r[kept_[i]];
        denom += p;
      }
    }
    if (denom <= 0.0) throw DomainError("reward_vector: successor state has zero probability");
    for (double& v : num) v /= denom;
    return num;
  }

  std::vector<StateId> enumerate_states() const override { return base_->enumerate_states(); }
  AgentId original_id(AgentId agent) const override { return base_->original_id(to_base(agent)); }
  std::uint64_t state_key(StateId s) const override { return base_->state_key(s); }

  ActionDist base_policy(StateId s, AgentId agent, BasePolicyKind kind) const override {
    return base_->base_policy(s, to_base(agent), kind);
  }

  ActionDist rollout_policy(StateId s, AgentId agent) const override {
    return base_->rollout_policy(s, to_base(agent));
  }

  const StochasticGame& base() const { return *base_; }
  const std::vector<AgentId>& kept_agents() const { return kept_; }

 private:
  AgentId to_base(AgentId agent) const {
    if (agent < 0 || agent >= static_cast<int>(kept_.size()))
      throw DomainError("invalid agent id " + std::to_string(agent));
    return kept_[agent];
  }

  void check_arity(const JointAction& a) const {
    if (a.size() != kept_.size()) throw DomainError("joint action arity mismatch");
  }

  /// All full joint actions consistent with the remaining agents' action,
  /// weighted by the fixed policies' probabilities at s.
  std::vector<std::pair<JointAction, double>> expand(StateId s, const JointAction& a) const {
    std::vector<std::pair<JointAction, double>> combos;
    JointAction full;
    full.actions.assign(base_->n_agents(), 0);
    for (std::size_t i = 0; i < kept_.size(); ++i) full.actions[kept_[i]] = a[i];
    combos.emplace_back(full, 1.0);
    for (const auto& [rid, pol] : fixed_) {
      const ActionDist& dist = pol(s);
      std::vector<std::pair<JointAction, double>> next;
      next.reserve(combos.size() * dist.size());
      for (const auto& [ja, w] : combos) {
        for (const auto& [act, p] : dist) {
          if (p <= 0.0) continue;
          JointAction ext = ja;
          ext.actions[rid] = act;
          next.emplace_back(std::move(ext), w * p);
        }
      }
      combos = std::move(next);
    }
    return combos;
  }

  GamePtr base_;
  std::map<AgentId, Policy> fixed_;
  std::vector<AgentId> kept_;
};

inline GamePtr replace(GamePtr game, std::map<AgentId, Policy> fixed) {
  return std::make_shared<ReplacedGame>(std::move(game), std::move(fixed));
}

}  // namespace cth
