#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <unordered_map>
#include <vector>

#include "cth/game.hpp"

namespace cth {

struct PlannerConfig {
  enum class Mode { Exact, Uct };
  /// UCT leaf evaluation: uniform-random joint actions, or per-agent
  /// draws from the game's rollout_policy (much stronger value signal
  /// when payoffs need coordinated multi-step approaches).
  enum class Rollout { Random, Greedy };
  Mode mode = Mode::Exact;
  Rollout rollout = Rollout::Random;
  int horizon = 10;
  int budget = 10000;          // UCT simulations per query
  double exploration_c = 1.4;  // UCB exploration constant
  std::uint64_t seed = 0;
  double tie_eps = 1e-6;       // absolute tolerance for argmax ties
  std::size_t state_cap = 2'000'000;
};

struct QEntry {
  JointAction action;
  double value;
};
using QRow = std::vector<QEntry>;

/// One agent's Q slice: (own action, value).
using MarginalRow = std::vector<std::pair<ActionId, double>>;

/// Max over teammates' actions for one agent's coordinate of the joint row.
inline MarginalRow marginalize_max(const QRow& joint, int agent_index) {
  MarginalRow out;
  for (const auto& e : joint) {
    ActionId a = e.action[agent_index];
    auto it = std::find_if(out.begin(), out.end(), [a](const auto& p) { return p.first == a; });
    if (it == out.end())
      out.emplace_back(a, e.value);
    else
      it->second = std::max(it->second, e.value);
  }
  return out;
}

/// Uniform distribution over the eps-argmax set of a Q row.
inline ActionDist tie_broken_policy(const MarginalRow& row, double tie_eps) {
  if (row.empty()) throw DomainError("empty Q row");
  double best = row[0].second;
  for (const auto& [a, v] : row) best = std::max(best, v);
  ActionDist out;
  for (const auto& [a, v] : row)
    if (v >= best - tie_eps) out.emplace_back(a, 0.0);
  const double p = 1.0 / static_cast<double>(out.size());
  for (auto& [a, q] : out) q = p;
  return out;
}

inline double team_reward(const StochasticGame& game, StateId s, const JointAction& a, StateId next) {
  auto r = game.reward_vector(s, a, next);
  double sum = 0.0;
  for (double v : r) sum += v;
  return sum;
}

/// Finite-horizon expectimax over the game's joint action space,
/// optimizing the summed reward of all agents in the game, memoized on
/// (state, remaining depth). For a 1-agent game this is the Bellman
/// recursion; for an n-agent game it is the centralized team plan.
class ExactSolver {
 public:
  ExactSolver(GamePtr game, int horizon, std::size_t state_cap = 2'000'000)
      : game_(std::move(game)), horizon_(horizon), cap_(state_cap) {
    if (horizon_ < 0) throw ConfigError("horizon must be >= 0");
  }

  const QRow& q(StateId s, int depth) {
    std::lock_guard<std::mutex> lock(mu_);
    return q_unlocked(s, depth);
  }

  QRow q_root(StateId s) { return q(s, horizon_); }

  double value(StateId s, int depth) {
    std::lock_guard<std::mutex> lock(mu_);
    return value_unlocked(s, depth);
  }

  int horizon() const { return horizon_; }
  const StochasticGame& game() const { return *game_; }

 private:
  std::uint64_t key(StateId s, int depth) const {
    return static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) * (horizon_ + 1) + depth;
  }

  double value_unlocked(StateId s, int depth) {
    if (depth <= 0 || game_->is_terminal(s)) return 0.0;
    const QRow& row = q_unlocked(s, depth);
    double best = row.empty() ? 0.0 : row[0].value;
    for (const auto& e : row) best = std::max(best, e.value);
    return best;
  }

  const QRow& q_unlocked(StateId s, int depth) {
    auto it = memo_.find(key(s, depth));
    if (it != memo_.end()) return it->second;
    if (memo_.size() >= cap_) throw CapacityError("exact planner exceeded expanded-state cap");
    if (game_->is_terminal(s)) throw TerminalError("Q requested at terminal state");
    const double gamma = game_->discount();
    QRow row;
    for (const auto& ja : joint_actions(*game_, s)) {
      double v = 0.0;
      if (depth > 0) {
        for (const auto& tr : game_->transition_dist(s, ja)) {
          v += tr.prob *
               (team_reward(*game_, s, ja, tr.next) + gamma * value_unlocked(tr.next, depth - 1));
        }
      }
      row.push_back({ja, v});
    }
    return memo_.emplace(key(s, depth), std::move(row)).first->second;
  }

  GamePtr game_;
  int horizon_;
  std::size_t cap_;
  std::unordered_map<std::uint64_t, QRow> memo_;
  std::mutex mu_;
};

/// UCT root-slice Q estimates for the team objective, depth-limited to
/// cfg.horizon. Seeded per (cfg.seed, state content key): identical
/// inputs give bit-identical estimates.
inline QRow uct_q(const StochasticGame& game, StateId root, const PlannerConfig& cfg) {
  if (cfg.budget < 1) throw ConfigError("UCT budget must be >= 1");
  if (game.is_terminal(root)) throw TerminalError("UCT called on terminal state");

  struct Node {
    std::vector<JointAction> actions;
    std::vector<int> n;
    std::vector<double> q;
    int total = 0;
  };
  std::unordered_map<std::uint64_t, Node> tree;
  const int H = cfg.horizon;
  auto node_key = [H](StateId s, int depth) {
    return static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) * (H + 1) + depth;
  };
  std::mt19937_64 rng(mix_seed(cfg.seed, game.state_key(root)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double gamma = game.discount();

  auto sample_next = [&](StateId s, const JointAction& ja) {
    auto dist = game.transition_dist(s, ja);
    double u = unit(rng) * dist_total(dist);
    for (const auto& tr : dist) {
      if (u <= tr.prob) return tr.next;
      u -= tr.prob;
    }
    return dist.back().next;
  };

  auto rollout_action = [&](StateId s) {
    if (cfg.rollout == PlannerConfig::Rollout::Greedy) {
      JointAction ja;
      for (int i = 0; i < game.n_agents(); ++i) {
        auto d = game.rollout_policy(s, i);
        double total = 0.0;
        for (const auto& [a, p] : d) total += p;
        double u = unit(rng) * total;
        ActionId picked = d.back().first;
        for (const auto& [a, p] : d) {
          if (u <= p) {
            picked = a;
            break;
          }
          u -= p;
        }
        ja.actions.push_back(picked);
      }
      return ja;
    }
    auto acts = joint_actions(game, s);
    return acts[rng() % acts.size()];
  };

  auto rollout = [&](StateId s, int depth) {
    double g = 0.0, scale = 1.0;
    while (depth > 0 && !game.is_terminal(s)) {
      JointAction ja = rollout_action(s);
      StateId next = sample_next(s, ja);
      g += scale * team_reward(game, s, ja, next);
      scale *= gamma;
      s = next;
      --depth;
    }
    return g;
  };

  // Max-backup (MaxUCT): each node propagates the value of its best
  // visited arm rather than the sampled trajectory return. With mean
  // backup, the near-random returns of early sibling exploration poison
  // every arm's estimate and coordinated multi-step plans are only found
  // when the whole descent chain gets lucky at once; backing up the max
  // lets a plan discovered anywhere in a subtree dominate immediately.
  auto node_value = [](const Node& node) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < node.actions.size(); ++a)
      if (node.n[a] > 0) best = std::max(best, node.q[a]);
    return best;
  };

  std::function<double(StateId, int)> simulate = [&](StateId s, int depth) -> double {
    if (depth <= 0 || game.is_terminal(s)) return 0.0;
    auto [it, fresh] = tree.try_emplace(node_key(s, depth));
    Node& node = it->second;
    if (fresh) {
      node.actions = joint_actions(game, s);
      node.n.assign(node.actions.size(), 0);
      node.q.assign(node.actions.size(), 0.0);
      // Leaf: estimate by rollout, expand on the next visit. Seed the
      // estimate through the rollout policy's own arm so the first
      // descent through a chain of fresh nodes evaluates one coherent
      // rollout trajectory; a random first arm breaks coordinated
      // multi-step plans at every new node and leaves their value
      // undiscovered until the tree deepens by chance.
      std::size_t a = rng() % node.actions.size();
      if (cfg.rollout == PlannerConfig::Rollout::Greedy) {
        JointAction ga = rollout_action(s);
        for (std::size_t i = 0; i < node.actions.size(); ++i) {
          if (node.actions[i].actions == ga.actions) {
            a = i;
            break;
          }
        }
      }
      StateId next = sample_next(s, node.actions[a]);
      double g = team_reward(game, s, node.actions[a], next) + gamma * rollout(next, depth - 1);
      node.total = 1;
      node.n[a] = 1;
      node.q[a] = g;
      return g;
    }
    std::size_t pick = 0;
    bool untried = false;
    for (std::size_t a = 0; a < node.actions.size(); ++a) {
      if (node.n[a] == 0) {
        pick = a;
        untried = true;
        break;
      }
    }
    if (!untried) {
      // Scale the UCB bonus by the node's value spread so exploration
      // keeps up with the reward magnitude: with a fixed constant, an arm
      // whose first sample came back unlucky is never revisited once a
      // sibling leads by more than the bonus.
      double q_lo = node.q[0], q_hi = node.q[0];
      for (std::size_t a = 1; a < node.actions.size(); ++a) {
        q_lo = std::min(q_lo, node.q[a]);
        q_hi = std::max(q_hi, node.q[a]);
      }
      const double scale = std::max(1.0, q_hi - q_lo);
      double best = -std::numeric_limits<double>::infinity();
      const double logN = std::log(static_cast<double>(node.total));
      for (std::size_t a = 0; a < node.actions.size(); ++a) {
        double u = node.q[a] + cfg.exploration_c * scale * std::sqrt(logN / node.n[a]);
        if (u > best) {
          best = u;
          pick = a;
        }
      }
    }
    StateId next = sample_next(s, node.actions[pick]);
    double g = team_reward(game, s, node.actions[pick], next) + gamma * simulate(next, depth - 1);
    node.total += 1;
    node.n[pick] += 1;
    node.q[pick] += (g - node.q[pick]) / node.n[pick];
    return node_value(node);
  };

  for (int i = 0; i < cfg.budget; ++i) simulate(root, H);

  const Node& root_node = tree.at(node_key(root, H));
  double mean = 0.0;
  int visited = 0;
  for (std::size_t a = 0; a < root_node.actions.size(); ++a) {
    if (root_node.n[a] > 0) {
      mean += root_node.q[a];
      ++visited;
    }
  }
  mean = visited > 0 ? mean / visited : 0.0;
  QRow row;
  for (std::size_t a = 0; a < root_node.actions.size(); ++a)
    row.push_back({root_node.actions[a], root_node.n[a] > 0 ? root_node.q[a] : mean});
  return row;
}

/// Lazily evaluated plan for one game: joint Q rows on demand plus
/// per-agent tie-broken policies. Each query plans with a fresh
/// cfg.horizon lookahead from the queried state (receding horizon).
class Plan {
 public:
  Plan(GamePtr game, PlannerConfig cfg) : impl_(std::make_shared<Impl>()) {
    impl_->game = std::move(game);
    impl_->cfg = cfg;
    if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (cfg.mode == PlannerConfig::Mode::Exact)
      impl_->exact = std::make_shared<ExactSolver>(impl_->game, cfg.horizon, cfg.state_cap);
  }

  QRow joint_q(StateId s) const {
    Impl& im = *impl_;
    {
      std::lock_guard<std::mutex> lock(im.mu);
      auto it = im.cache.find(s);
      if (it != im.cache.end()) return it->second;
    }
    QRow row = im.cfg.mode == PlannerConfig::Mode::Exact ? im.exact->q_root(s)
                                                         : uct_q(*im.game, s, im.cfg);
    std::lock_guard<std::mutex> lock(im.mu);
    return im.cache.emplace(s, std::move(row)).first->second;
  }

  MarginalRow agent_q(StateId s, int agent_index) const {
    return marginalize_max(joint_q(s), agent_index);
  }

  Policy agent_policy(int agent_index) const {
    Plan self = *this;
    return Policy([self, agent_index](StateId s) {
      return tie_broken_policy(self.agent_q(s, agent_index), self.config().tie_eps);
    });
  }

  const StochasticGame& game() const { return *impl_->game; }
  const PlannerConfig& config() const { return impl_->cfg; }

 private:
  struct Impl {
    GamePtr game;
    PlannerConfig cfg;
    std::shared_ptr<ExactSolver> exact;
    std::unordered_map<StateId, QRow> cache;
    std::mutex mu;
  };
  std::shared_ptr<Impl> impl_;
};

/// BR operator: optimal plan for the single agent of a reduced game.
inline Plan best_response(GamePtr game, const PlannerConfig& cfg) {
  if (game->n_agents() != 1)
    throw ArityError("best_response requires a 1-agent game, got " +
                     std::to_string(game->n_agents()));
  return Plan(std::move(game), cfg);
}

/// JP operator: centralized plan maximizing the summed team reward.
inline Plan joint_plan(GamePtr game, const PlannerConfig& cfg) {
  if (game->n_agents() < 1) throw ArityError("joint_plan requires at least one agent");
  return Plan(std::move(game), cfg);
}

}  // namespace cth
