#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cth/game.hpp"
#include "cth/planner.hpp"
#include "cth/replace.hpp"

namespace cth {

struct CthNode;
using CthPtr = std::shared_ptr<const CthNode>;

/// One agent's planning stance: a finite tree of Base / BR / JP nodes.
/// Agents are referenced by their original (pre-REPLACE) ids. `agent` is
/// the perspective agent whose policy the node denotes; for Jp it must
/// be a team member. Children cover every other agent at that level.
struct CthNode {
  enum class Kind { Base, Br, Jp };

  Kind kind = Kind::Base;
  AgentId agent = 0;
  BasePolicyKind base_kind = BasePolicyKind::UniformRandom;
  std::vector<AgentId> team;           // Jp only; sorted, contains agent
  std::map<AgentId, CthPtr> children;  // keyed by the child's agent

  static CthPtr base(AgentId agent, BasePolicyKind kind = BasePolicyKind::UniformRandom) {
    auto n = std::make_shared<CthNode>();
    n->kind = Kind::Base;
    n->agent = agent;
    n->base_kind = kind;
    return n;
  }

  static CthPtr br(AgentId agent, std::map<AgentId, CthPtr> children) {
    auto n = std::make_shared<CthNode>();
    n->kind = Kind::Br;
    n->agent = agent;
    n->children = std::move(children);
    return n;
  }

  static CthPtr jp(AgentId agent, std::vector<AgentId> team,
                   std::map<AgentId, CthPtr> children = {}) {
    auto n = std::make_shared<CthNode>();
    n->kind = Kind::Jp;
    n->agent = agent;
    std::sort(team.begin(), team.end());
    n->team = std::move(team);
    n->children = std::move(children);
    if (std::find(n->team.begin(), n->team.end(), agent) == n->team.end())
      throw DomainError("Jp perspective agent must be in the team");
    if (n->team.size() < 2 && !n->children.empty())
      throw DomainError("Jp team of one cannot have outside children");
    return n;
  }

  int depth() const {
    if (kind == Kind::Base) return 0;
    int d = 0;
    for (const auto& [id, c] : children) d = std::max(d, c->depth());
    return 1 + d;
  }

  bool contains_jp() const {
    if (kind == Kind::Jp) return true;
    for (const auto& [id, c] : children)
      if (c->contains_jp()) return true;
    return false;
  }
};

inline std::string agent_name(AgentId id) {
  if (id < 0 || id >= 26) return "#" + std::to_string(id);
  return std::string(1, static_cast<char>('A' + id));
}

inline AgentId agent_from_name(const std::string& s) {
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'Z') return s[0] - 'A';
  throw DomainError("bad agent name: '" + s + "'");
}

/// Parenthesized prefix form, e.g. BR(A; JP(B,C; BASE(A))).
inline std::string to_string(const CthNode& node) {
  std::ostringstream os;
  auto emit_children = [&os](const std::map<AgentId, CthPtr>& kids) {
    bool first = true;
    for (const auto& [id, c] : kids) {
      os << (first ? "; " : ", ") << to_string(*c);
      first = false;
    }
  };
  switch (node.kind) {
    case CthNode::Kind::Base:
      os << (node.base_kind == BasePolicyKind::GreedySolo ? "GREEDY(" : "BASE(")
         << agent_name(node.agent) << ")";
      break;
    case CthNode::Kind::Br:
      os << "BR(" << agent_name(node.agent);
      emit_children(node.children);
      os << ")";
      break;
    case CthNode::Kind::Jp: {
      // perspective agent first, remaining members ascending
      os << "JP(" << agent_name(node.agent);
      for (AgentId id : node.team)
        if (id != node.agent) os << "," << agent_name(id);
      emit_children(node.children);
      os << ")";
      break;
    }
  }
  return os.str();
}

inline std::string to_string(const CthPtr& node) { return to_string(*node); }

namespace detail {

struct CthParser {
  const std::string& text;
  std::size_t pos = 0;

  explicit CthParser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  void expect(char c) {
    if (peek() != c) throw ValidationError("CTH parse error at position " + std::to_string(pos) +
                                           ": expected '" + std::string(1, c) + "'");
    ++pos;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '#'))
      ++pos;
    if (pos == start) throw ValidationError("CTH parse error: identifier expected at " + std::to_string(start));
    return text.substr(start, pos - start);
  }

  /// Jp perspective is the first listed team member (the form to_string emits).
  CthPtr node() {
    std::string head = ident();
    expect('(');
    if (head == "BASE" || head == "GREEDY") {
      AgentId a = agent_from_name(ident());
      expect(')');
      return CthNode::base(a, head == "GREEDY" ? BasePolicyKind::GreedySolo
                                               : BasePolicyKind::UniformRandom);
    }
    if (head == "BR") {
      AgentId a = agent_from_name(ident());
      auto kids = children();
      expect(')');
      return CthNode::br(a, std::move(kids));
    }
    if (head == "JP") {
      std::vector<AgentId> team{agent_from_name(ident())};
      while (peek() == ',') {
        ++pos;
        team.push_back(agent_from_name(ident()));
      }
      auto kids = children();
      expect(')');
      AgentId perspective = team.front();
      return CthNode::jp(perspective, std::move(team), std::move(kids));
    }
    throw ValidationError("CTH parse error: unknown operator '" + head + "'");
  }

  std::map<AgentId, CthPtr> children() {
    std::map<AgentId, CthPtr> kids;
    if (peek() != ';') return kids;
    ++pos;
    for (;;) {
      CthPtr c = node();
      kids[c->agent] = c;
      if (peek() != ',') break;
      ++pos;
    }
    return kids;
  }
};

}  // namespace detail

inline CthPtr parse_cth(const std::string& text) {
  detail::CthParser p(text);
  CthPtr n = p.node();
  p.skip_ws();
  if (p.pos != text.size()) throw ValidationError("CTH parse error: trailing input");
  return n;
}

using HypothesisSet = std::vector<CthPtr>;

/// Depth-1 hypothesis set for one observed agent, in canonical order:
/// optional uniform base, solo best response against base others, then
/// every team containing the agent (by size, then lexicographically)
/// jointly planning against base non-members.
inline HypothesisSet enumerate_depth1(int n_agents, AgentId agent, bool include_base = true,
                                      BasePolicyKind leaf_kind = BasePolicyKind::UniformRandom) {
  if (n_agents < 2) throw DomainError("need at least 2 agents for depth-1 hypotheses");
  if (agent < 0 || agent >= n_agents) throw DomainError("invalid agent id");
  HypothesisSet out;
  if (include_base) out.push_back(CthNode::base(agent, leaf_kind));

  auto base_children = [&](const std::vector<AgentId>& members) {
    std::map<AgentId, CthPtr> kids;
    for (AgentId i = 0; i < n_agents; ++i)
      if (std::find(members.begin(), members.end(), i) == members.end())
        kids[i] = CthNode::base(i, leaf_kind);
    return kids;
  };
  out.push_back(CthNode::br(agent, base_children({agent})));

  std::vector<AgentId> others;
  for (AgentId i = 0; i < n_agents; ++i)
    if (i != agent) others.push_back(i);
  // subsets of others by size then lexicographic member order
  const int m = static_cast<int>(others.size());
  for (int size = 1; size <= m; ++size) {
    std::vector<int> pick(size);
    for (int i = 0; i < size; ++i) pick[i] = i;
    for (;;) {
      std::vector<AgentId> team{agent};
      for (int i : pick) team.push_back(others[i]);
      out.push_back(CthNode::jp(agent, team, base_children(team)));
      int i = size - 1;
      while (i >= 0 && pick[i] == m - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

/// Level-K tower (Fig-1a shape): depth-k iterated best responses with no
/// Jp anywhere, grounded in base policies.
inline CthPtr levelk_tower(int n_agents, AgentId agent, int k,
                           BasePolicyKind leaf_kind = BasePolicyKind::UniformRandom) {
  if (k <= 0) return CthNode::base(agent, leaf_kind);
  std::map<AgentId, CthPtr> kids;
  for (AgentId i = 0; i < n_agents; ++i)
    if (i != agent) kids[i] = levelk_tower(n_agents, i, k - 1, leaf_kind);
  return CthNode::br(agent, std::move(kids));
}

inline HypothesisSet enumerate_levelk(int n_agents, AgentId agent, int k_max,
                                      BasePolicyKind leaf_kind = BasePolicyKind::UniformRandom) {
  if (k_max < 0) throw DomainError("k_max must be >= 0");
  if (agent < 0 || agent >= n_agents) throw DomainError("invalid agent id");
  HypothesisSet out;
  for (int k = 0; k <= k_max; ++k) out.push_back(levelk_tower(n_agents, agent, k, leaf_kind));
  return out;
}

/// True iff the hypothesis has `other` on the root agent's team.
inline bool cooperates(const CthNode& cth, AgentId other) {
  return cth.kind == CthNode::Kind::Jp &&
         std::find(cth.team.begin(), cth.team.end(), other) != cth.team.end();
}

inline bool cooperates(const CthPtr& cth, AgentId other) { return cooperates(*cth, other); }

/// Result of compiling a CTH for its root agent: a policy plus, for
/// planning roots, the root Q row feeding the Luce likelihood. Base
/// roots have no Q; their likelihood is the policy itself.
struct CompiledCth {
  Policy policy;
  std::function<MarginalRow(StateId)> q_row;

  bool has_q() const { return static_cast<bool>(q_row); }
};

namespace detail {

inline AgentId local_index(const StochasticGame& game, AgentId original) {
  for (AgentId i = 0; i < game.n_agents(); ++i)
    if (game.original_id(i) == original) return i;
  throw DomainError("agent " + agent_name(original) + " is not present in this game");
}

struct CompileCtx {
  GamePtr root_game;
  PlannerConfig cfg;
  std::map<std::string, CompiledCth> memo;
};

inline CompiledCth compile_node(CompileCtx& ctx, const CthPtr& node, const GamePtr& game);

/// Compile all children against `game` and fold them in via REPLACE.
inline GamePtr reduce_with_children(CompileCtx& ctx, const CthNode& node, const GamePtr& game) {
  std::map<AgentId, Policy> fixed;
  for (const auto& [orig_id, child] : node.children) {
    if (child->agent != orig_id)
      throw DomainError("child subtree for " + agent_name(orig_id) + " roots " +
                        agent_name(child->agent));
    CompiledCth c = compile_node(ctx, child, game);
    fixed[local_index(*game, orig_id)] = c.policy;
  }
  // the children must cover every agent outside the node's own scope
  std::vector<AgentId> scope =
      node.kind == CthNode::Kind::Jp ? node.team : std::vector<AgentId>{node.agent};
  for (AgentId i = 0; i < game->n_agents(); ++i) {
    AgentId orig = game->original_id(i);
    bool in_scope = std::find(scope.begin(), scope.end(), orig) != scope.end();
    if (!in_scope && !node.children.count(orig))
      throw DomainError("no child subtree for agent " + agent_name(orig));
  }
  return fixed.empty() ? game : replace(game, std::move(fixed));
}

inline CompiledCth compile_node(CompileCtx& ctx, const CthPtr& node, const GamePtr& game) {
  const std::string key = agent_name(node->agent) + "|" + to_string(*node);
  auto it = ctx.memo.find(key);
  if (it != ctx.memo.end()) return it->second;

  CompiledCth out;
  switch (node->kind) {
    case CthNode::Kind::Base: {
      GamePtr g = game;
      AgentId local = local_index(*g, node->agent);
      BasePolicyKind kind = node->base_kind;
      out.policy = Policy([g, local, kind](StateId s) { return g->base_policy(s, local, kind); });
      break;
    }
    case CthNode::Kind::Br: {
      GamePtr reduced = reduce_with_children(ctx, *node, game);
      if (reduced->n_agents() != 1)
        throw DomainError("BR node for " + agent_name(node->agent) + " left " +
                          std::to_string(reduced->n_agents()) + " agents unreplaced");
      PlannerConfig cfg = ctx.cfg;
      cfg.seed = mix_seed(ctx.cfg.seed, std::hash<std::string>{}(key));
      Plan plan = best_response(reduced, cfg);
      out.policy = plan.agent_policy(0);
      out.q_row = [plan](StateId s) { return plan.agent_q(s, 0); };
      break;
    }
    case CthNode::Kind::Jp: {
      GamePtr reduced = reduce_with_children(ctx, *node, game);
      PlannerConfig cfg = ctx.cfg;
      cfg.seed = mix_seed(ctx.cfg.seed, std::hash<std::string>{}(key));
      Plan plan = joint_plan(reduced, cfg);
      AgentId local = local_index(*reduced, node->agent);
      out.policy = plan.agent_policy(local);
      out.q_row = [plan, local](StateId s) { return plan.agent_q(s, local); };
      break;
    }
  }
  ctx.memo.emplace(key, out);
  return out;
}

}  // namespace detail

/// Compile a CTH tree against a game: children first, REPLACE folds them
/// into the environment, then BR/JP solves the reduced game. Identical
/// subtrees are compiled once per call. Pure in (cth, game, cfg, seed).
inline CompiledCth compile(const CthPtr& cth, GamePtr game, const PlannerConfig& cfg) {
  detail::CompileCtx ctx{game, cfg, {}};
  return detail::compile_node(ctx, cth, game);
}

}  // namespace cth
