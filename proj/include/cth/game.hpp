#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cth/errors.hpp"

namespace cth {

using StateId = std::int32_t;
using AgentId = int;
using ActionId = int;

/// One agent's action distribution at a state: (action, probability) pairs.
using ActionDist = std::vector<std::pair<ActionId, double>>;

struct JointAction {
  std::vector<ActionId> actions;  // indexed by agent

  JointAction() = default;
  explicit JointAction(std::vector<ActionId> a) : actions(std::move(a)) {}
  std::size_t size() const { return actions.size(); }
  ActionId operator[](std::size_t i) const { return actions[i]; }
};

struct Transition {
  StateId next;
  double prob;
};

/// Leaf policies that ground CTH recursion. UniformRandom is always
/// available; GreedySolo needs domain support (see StochasticGame::base_policy).
enum class BasePolicyKind { UniformRandom, GreedySolo };

/// Simultaneous-move stochastic game: n agents, per-agent action sets,
/// distribution-valued transitions, per-agent rewards, discount in (0,1].
///
/// States are opaque ids. enumerate_states() is only required for
/// desk-scale games; samplers (UCT) work from transition_dist alone.
/// Implementations must be immutable after construction (or internally
/// synchronized) so games can be shared across planner workers.
class StochasticGame {
 public:
  virtual ~StochasticGame() = default;

  virtual int n_agents() const = 0;
  virtual double discount() const = 0;
  virtual bool is_terminal(StateId s) const = 0;
  virtual std::vector<ActionId> legal_actions(StateId s, AgentId agent) const = 0;
  virtual std::vector<Transition> transition_dist(StateId s, const JointAction& a) const = 0;
  virtual std::vector<double> reward_vector(StateId s, const JointAction& a, StateId next) const = 0;

  virtual std::vector<StateId> enumerate_states() const {
    throw CapacityError("this game does not support state enumeration");
  }

  /// Original agent id before any REPLACE re-indexing.
  virtual AgentId original_id(AgentId agent) const { return agent; }

  /// Stable content key for a state, independent of interning order.
  /// Used to derive per-state planner seeds deterministically.
  virtual std::uint64_t state_key(StateId s) const {
    return static_cast<std::uint64_t>(s) * 0x9e3779b97f4a7c15ULL;
  }

  /// Non-strategic leaf policy for one agent. Default supports
  /// UniformRandom only; domains override to add GreedySolo.
  virtual ActionDist base_policy(StateId s, AgentId agent, BasePolicyKind kind) const {
    if (kind != BasePolicyKind::UniformRandom)
      throw DomainError("GreedySolo base policy is not available for this game");
    auto acts = legal_actions(s, agent);
    if (acts.empty()) throw DomainError("no legal actions for base policy");
    ActionDist d;
    d.reserve(acts.size());
    const double p = 1.0 / static_cast<double>(acts.size());
    for (ActionId a : acts) d.emplace_back(a, p);
    return d;
  }

  /// Default-action distribution used by sample-based planners for leaf
  /// evaluation. Domains may override with a coordination-aware
  /// heuristic; the default is the myopic GreedySolo leaf policy.
  virtual ActionDist rollout_policy(StateId s, AgentId agent) const {
    return base_policy(s, agent, BasePolicyKind::GreedySolo);
  }
};

using GamePtr = std::shared_ptr<const StochasticGame>;

/// Memoizing state -> action-distribution map. Copyable; copies share
/// the cache. Thread-safe for concurrent lookups (idempotent inserts).
class Policy {
 public:
  Policy() = default;
  explicit Policy(std::function<ActionDist(StateId)> fn)
      : impl_(std::make_shared<Impl>(std::move(fn))) {}

  /// Point-mass policy on a fixed action at every state.
  static Policy deterministic(ActionId a) {
    return Policy([a](StateId) { return ActionDist{{a, 1.0}}; });
  }

  const ActionDist& operator()(StateId s) const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->cache.find(s);
    if (it != impl_->cache.end()) return it->second;
    auto dist = impl_->fn(s);
    return impl_->cache.emplace(s, std::move(dist)).first->second;
  }

  bool valid() const { return impl_ != nullptr; }

 private:
  struct Impl {
    explicit Impl(std::function<ActionDist(StateId)> f) : fn(std::move(f)) {}
    std::function<ActionDist(StateId)> fn;
    std::unordered_map<StateId, ActionDist> cache;
    std::mutex mu;
  };
  std::shared_ptr<Impl> impl_;
};

/// Enumerate the joint action space at a state (cartesian product of
/// per-agent legal actions), invoking fn for each joint action.
template <typename Fn>
void for_each_joint_action(const StochasticGame& game, StateId s, Fn&& fn) {
  const int n = game.n_agents();
  std::vector<std::vector<ActionId>> per_agent(n);
  for (int i = 0; i < n; ++i) {
    per_agent[i] = game.legal_actions(s, i);
    if (per_agent[i].empty()) return;
  }
  JointAction ja;
  ja.actions.assign(n, 0);
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    for (int i = 0; i < n; ++i) ja.actions[i] = per_agent[i][idx[i]];
    fn(ja);
    int i = n - 1;
    while (i >= 0 && ++idx[i] == per_agent[i].size()) idx[i--] = 0;
    if (i < 0) break;
  }
}

inline std::vector<JointAction> joint_actions(const StochasticGame& game, StateId s) {
  std::vector<JointAction> out;
  for_each_joint_action(game, s, [&](const JointAction& ja) { out.push_back(ja); });
  return out;
}

inline double dist_total(const std::vector<Transition>& d) {
  double t = 0.0;
  for (const auto& tr : d) t += tr.prob;
  return t;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cth
