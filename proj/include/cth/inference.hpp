#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include "cth/game.hpp"
#include "cth/tree.hpp"

namespace cth {

/// Luce-choice (Boltzmann) probability of one action given a Q row:
/// exp(beta*Q(a)) / sum_a' exp(beta*Q(a')), max-subtracted for stability.
/// beta = 0 is uniform; large beta approaches the argmax.
inline double luce_likelihood(const MarginalRow& q, ActionId action, double beta) {
  if (q.empty()) throw DomainError("luce_likelihood: empty action set");
  if (beta < 0.0) throw DomainError("luce_likelihood: beta must be >= 0");
  double qmax = q[0].second;
  for (const auto& [a, v] : q) qmax = std::max(qmax, v);
  double z = 0.0, num = -1.0;
  for (const auto& [a, v] : q) {
    double w = std::exp(beta * (v - qmax));
    z += w;
    if (a == action) num = w;
  }
  if (num < 0.0) throw DomainError("luce_likelihood: action not in Q row");
  return num / z;
}

inline ActionDist luce_distribution(const MarginalRow& q, double beta) {
  ActionDist out;
  for (const auto& [a, v] : q) out.emplace_back(a, luce_likelihood(q, a, beta));
  return out;
}

/// Normalized belief over a finite hypothesis set for one agent, plus
/// the accumulated log marginal likelihood of the observations so far.
struct Posterior {
  HypothesisSet hypotheses;
  std::vector<double> probs;
  double log_evidence = 0.0;

  static Posterior uniform(HypothesisSet hyps) {
    if (hyps.empty()) throw DomainError("empty hypothesis set");
    Posterior p;
    p.probs.assign(hyps.size(), 1.0 / static_cast<double>(hyps.size()));
    p.hypotheses = std::move(hyps);
    return p;
  }

  static Posterior with_prior(HypothesisSet hyps, std::vector<double> prior) {
    if (hyps.size() != prior.size()) throw DomainError("prior length mismatch");
    double total = 0.0;
    for (double v : prior) {
      if (v < 0.0) throw DomainError("negative prior mass");
      total += v;
    }
    if (total <= 0.0) throw DomainError("prior sums to zero");
    for (double& v : prior) v /= total;
    Posterior p;
    p.hypotheses = std::move(hyps);
    p.probs = std::move(prior);
    return p;
  }
};

/// One Bayes step: probs' ∝ probs ⊙ likelihoods, renormalized;
/// log evidence accumulates log sum(probs ⊙ likelihoods).
inline Posterior update(const Posterior& prior, const std::vector<double>& likelihoods) {
  if (likelihoods.size() != prior.probs.size())
    throw DomainError("likelihood vector length mismatch");
  Posterior post = prior;
  double total = 0.0;
  for (std::size_t h = 0; h < likelihoods.size(); ++h) {
    post.probs[h] = prior.probs[h] * likelihoods[h];
    total += post.probs[h];
  }
  if (total <= 0.0) throw DomainError("all hypothesis likelihoods are zero");
  for (double& v : post.probs) v /= total;
  post.log_evidence += std::log(total);
  return post;
}

/// Likelihood of one observed action under a compiled hypothesis.
/// Planning roots go through the Luce rule on the root Q row; base roots
/// are their own action distribution.
inline double action_likelihood(const CompiledCth& compiled, StateId s, ActionId action,
                                double beta) {
  if (compiled.has_q()) return luce_likelihood(compiled.q_row(s), action, beta);
  const ActionDist& d = compiled.policy(s);
  for (const auto& [a, p] : d)
    if (a == action) return p;
  return 0.0;
}

/// Predictive action distribution of a compiled hypothesis at a state.
inline ActionDist action_distribution(const CompiledCth& compiled, StateId s, double beta) {
  if (compiled.has_q()) return luce_distribution(compiled.q_row(s), beta);
  return compiled.policy(s);
}

struct ObservationTrace {
  std::vector<StateId> states;        // s_1 ... s_T
  std::vector<JointAction> actions;   // a_1 ... a_T, per-agent each step

  std::size_t length() const { return actions.size(); }
};

/// Check a trace against the game dynamics: lengths match, every action
/// is legal in its state and every successor has nonzero probability.
inline void validate_trace(const StochasticGame& game, const ObservationTrace& trace) {
  if (trace.states.size() != trace.actions.size())
    throw ValidationError("trace state/action length mismatch");
  for (std::size_t t = 0; t < trace.actions.size(); ++t) {
    const StateId s = trace.states[t];
    const JointAction& ja = trace.actions[t];
    if (static_cast<int>(ja.size()) != game.n_agents())
      throw ValidationError("trace joint action arity at step " + std::to_string(t));
    for (int i = 0; i < game.n_agents(); ++i) {
      auto legal = game.legal_actions(s, i);
      if (std::find(legal.begin(), legal.end(), ja[i]) == legal.end())
        throw ValidationError("illegal action for agent " + agent_name(i) + " at step " +
                              std::to_string(t));
    }
    if (t + 1 < trace.states.size()) {
      bool reachable = false;
      for (const auto& tr : game.transition_dist(s, ja))
        if (tr.next == trace.states[t + 1] && tr.prob > 0.0) reachable = true;
      if (!reachable)
        throw ValidationError("trace successor unreachable at step " + std::to_string(t));
    }
  }
}

enum class PredictionMode { Bma, MaxLikelihood };

/// Bayesian inverse group planning over per-agent CTH hypothesis sets.
/// Each observed agent's posterior conditions on that agent's own action
/// sequence; cross-agent coupling enters only through the shared states.
/// Hypotheses are compiled lazily (receding-horizon Q from each observed
/// state) and cached for the engine's lifetime.
class InferenceEngine {
 public:
  InferenceEngine(GamePtr game, std::vector<HypothesisSet> hypothesis_sets, double beta,
                  PlannerConfig cfg, std::vector<std::vector<double>> priors = {})
      : game_(std::move(game)), beta_(beta), cfg_(cfg) {
    if (static_cast<int>(hypothesis_sets.size()) != game_->n_agents())
      throw DomainError("one hypothesis set per agent required");
    if (beta < 0.0) throw DomainError("beta must be >= 0");
    for (AgentId i = 0; i < game_->n_agents(); ++i) {
      if (priors.empty())
        priors_.push_back(Posterior::uniform(hypothesis_sets[i]));
      else
        priors_.push_back(Posterior::with_prior(hypothesis_sets[i], priors.at(i)));
      compiled_.emplace_back(hypothesis_sets[i].size());
    }
    sets_ = std::move(hypothesis_sets);
  }

  double beta() const { return beta_; }
  const StochasticGame& game() const { return *game_; }
  const HypothesisSet& hypotheses(AgentId agent) const { return sets_.at(agent); }
  const Posterior& prior(AgentId agent) const { return priors_.at(agent); }

  const CompiledCth& compiled(AgentId agent, std::size_t h) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = compiled_.at(agent).at(h);
    if (!slot) {
      PlannerConfig cfg = cfg_;
      cfg.seed = mix_seed(cfg_.seed, mix_seed(static_cast<std::uint64_t>(agent), h));
      slot = std::make_shared<CompiledCth>(compile(sets_[agent][h], game_, cfg));
    }
    return *slot;
  }

  std::vector<double> step_likelihoods(AgentId agent, StateId s, ActionId observed) const {
    std::vector<double> lk(sets_[agent].size());
    for (std::size_t h = 0; h < lk.size(); ++h)
      lk[h] = action_likelihood(compiled(agent, h), s, observed, beta_);
    return lk;
  }

  /// Posterior sequences, one per agent: element t is the belief after
  /// observations 1..t (element 0 is the prior).
  std::vector<std::vector<Posterior>> infer_trace(const ObservationTrace& trace) const {
    validate_trace(*game_, trace);
    std::vector<std::vector<Posterior>> out(game_->n_agents());
    for (AgentId i = 0; i < game_->n_agents(); ++i) {
      out[i].push_back(priors_[i]);
      for (std::size_t t = 0; t < trace.length(); ++t) {
        auto lk = step_likelihoods(i, trace.states[t], trace.actions[t][i]);
        out[i].push_back(update(out[i].back(), lk));
      }
    }
    return out;
  }

  /// Predictive next-action distribution for one agent at a state.
  /// BMA: posterior-weighted mixture of per-hypothesis Luce distributions.
  /// MaxLikelihood: the single argmax-posterior hypothesis (ties to the
  /// lowest canonical index).
  ActionDist predict(AgentId agent, const Posterior& posterior, StateId s,
                     PredictionMode mode) const {
    if (posterior.probs.size() != sets_[agent].size())
      throw DomainError("posterior does not match hypothesis set");
    if (mode == PredictionMode::MaxLikelihood) {
      std::size_t best = 0;
      for (std::size_t h = 1; h < posterior.probs.size(); ++h)
        if (posterior.probs[h] > posterior.probs[best]) best = h;
      return action_distribution(compiled(agent, best), s, beta_);
    }
    std::map<ActionId, double> mix;
    for (std::size_t h = 0; h < posterior.probs.size(); ++h) {
      if (posterior.probs[h] <= 0.0) continue;
      for (const auto& [a, p] : action_distribution(compiled(agent, h), s, beta_))
        mix[a] += posterior.probs[h] * p;
    }
    return ActionDist(mix.begin(), mix.end());
  }

 private:
  GamePtr game_;
  std::vector<HypothesisSet> sets_;
  double beta_;
  PlannerConfig cfg_;
  std::vector<Posterior> priors_;
  mutable std::vector<std::vector<std::shared_ptr<CompiledCth>>> compiled_;
  mutable std::mutex mu_;
};

/// Marginal probability that `other` is on the agent's team under its
/// posterior: total mass of hypotheses whose root Jp team contains other.
inline double team_membership(const Posterior& posterior, AgentId other) {
  double p = 0.0;
  for (std::size_t h = 0; h < posterior.probs.size(); ++h)
    if (cooperates(posterior.hypotheses[h], other)) p += posterior.probs[h];
  return p;
}

enum class TeamReadout { Product, Mean };

/// Pairwise cooperation readout from two agents' posteriors. Product
/// rule by default; arithmetic mean available for sensitivity checks.
inline double team_probability(const Posterior& posterior_i, const Posterior& posterior_j,
                               AgentId agent_i, AgentId agent_j,
                               TeamReadout readout = TeamReadout::Product) {
  const double pi = team_membership(posterior_i, agent_j);
  const double pj = team_membership(posterior_j, agent_i);
  return readout == TeamReadout::Product ? pi * pj : 0.5 * (pi + pj);
}

}  // namespace cth
