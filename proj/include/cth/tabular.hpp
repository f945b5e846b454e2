#pragma once

#include <map>
#include <vector>

#include "cth/game.hpp"

namespace cth {

/// Explicitly tabulated stochastic game for desk-scale fixtures: every
/// transition distribution and reward vector is stored. Useful for
/// randomized operator tests and hand-built toy games.
class TabularGame : public StochasticGame {
 public:
  struct Entry {
    std::vector<Transition> transitions;
    std::map<StateId, std::vector<double>> rewards;  // by successor
  };

  TabularGame(int n_agents, int n_states, double gamma)
      : n_(n_agents), gamma_(gamma), actions_(n_states), terminal_(n_states, false) {
    if (n_agents < 1) throw DomainError("need at least one agent");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("discount must be in (0,1]");
  }

  void set_terminal(StateId s, bool v = true) { terminal_.at(s) = v; }

  void set_actions(StateId s, std::vector<std::vector<ActionId>> per_agent) {
    if (static_cast<int>(per_agent.size()) != n_) throw DomainError("per-agent action list arity");
    actions_.at(s) = std::move(per_agent);
  }

  void add_transition(StateId s, const JointAction& a, StateId next, double prob,
                      std::vector<double> reward) {
    if (static_cast<int>(reward.size()) != n_) throw DomainError("reward vector arity");
    Entry& e = table_[key(s, a)];
    e.transitions.push_back({next, prob});
    e.rewards[next] = std::move(reward);
  }

  int n_agents() const override { return n_; }
  double discount() const override { return gamma_; }
  bool is_terminal(StateId s) const override { return terminal_.at(s); }

  std::vector<ActionId> legal_actions(StateId s, AgentId agent) const override {
    if (agent < 0 || agent >= n_) throw DomainError("invalid agent id");
    if (terminal_.at(s)) return {};
    return actions_.at(s).at(agent);
  }

  std::vector<Transition> transition_dist(StateId s, const JointAction& a) const override {
    if (terminal_.at(s)) throw TerminalError("transition from terminal state");
    auto it = table_.find(key(s, a));
    if (it == table_.end()) throw DomainError("illegal joint action");
    return it->second.transitions;
  }

  std::vector<double> reward_vector(StateId s, const JointAction& a, StateId next) const override {
    auto it = table_.find(key(s, a));
    if (it == table_.end()) throw DomainError("illegal joint action");
    auto rit = it->second.rewards.find(next);
    bool possible = false;
    for (const auto& tr : it->second.transitions)
      if (tr.next == next && tr.prob > 0.0) possible = true;
    if (!possible || rit == it->second.rewards.end())
      throw DomainError("successor state has zero probability");
    return rit->second;
  }

  std::vector<StateId> enumerate_states() const override {
    std::vector<StateId> out;
    for (StateId s = 0; s < static_cast<StateId>(actions_.size()); ++s) out.push_back(s);
    return out;
  }

 private:
  std::vector<int> key(StateId s, const JointAction& a) const {
    std::vector<int> k{s};
    for (std::size_t i = 0; i < a.size(); ++i) k.push_back(a[i]);
    return k;
  }

  int n_;
  double gamma_;
  std::vector<std::vector<std::vector<ActionId>>> actions_;  // [state][agent]
  std::vector<bool> terminal_;
  std::map<std::vector<int>, Entry> table_;
};

}  // namespace cth
