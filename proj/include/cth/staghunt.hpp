#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cth/game.hpp"

namespace cth::staghunt {

struct Cell {
  int x = 0;  // increases East
  int y = 0;  // increases North; origin bottom-left
  friend bool operator==(const Cell& a, const Cell& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Cell& a, const Cell& b) { return !(a == b); }
};

inline int manhattan(const Cell& a, const Cell& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

enum class Move : ActionId { North = 0, South = 1, East = 2, West = 3, Stay = 4 };
inline constexpr int kNumMoves = 5;

inline Cell apply_move(const Cell& c, Move m) {
  switch (m) {
    case Move::North: return {c.x, c.y + 1};
    case Move::South: return {c.x, c.y - 1};
    case Move::East: return {c.x + 1, c.y};
    case Move::West: return {c.x - 1, c.y};
    case Move::Stay: return c;
  }
  return c;
}

inline const char* move_name(Move m) {
  switch (m) {
    case Move::North: return "N";
    case Move::South: return "S";
    case Move::East: return "E";
    case Move::West: return "W";
    case Move::Stay: return "Stay";
  }
  return "?";
}

inline Move move_from_name(const std::string& s) {
  if (s == "N" || s == "North") return Move::North;
  if (s == "S" || s == "South") return Move::South;
  if (s == "E" || s == "East") return Move::East;
  if (s == "W" || s == "West") return Move::West;
  if (s == "Stay" || s == "X") return Move::Stay;
  throw DomainError("unknown move name: " + s);
}

/// Static geometry shared by every state of one scenario.
struct Board {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> wall;  // row-major, width*height

  Board(int w, int h) : width(w), height(h), wall(static_cast<std::size_t>(w) * h, 0) {
    if (w <= 0 || h <= 0) throw DomainError("board dimensions must be positive");
  }
  bool in_bounds(const Cell& c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  bool is_wall(const Cell& c) const { return wall[static_cast<std::size_t>(c.y) * width + c.x] != 0; }
  void set_wall(const Cell& c) {
    if (!in_bounds(c)) throw DomainError("wall outside bounds");
    wall[static_cast<std::size_t>(c.y) * width + c.x] = 1;
  }
  bool passable(const Cell& c) const { return in_bounds(c) && !is_wall(c); }
};

struct Prey {
  Cell pos;
  bool alive = true;
  friend bool operator==(const Prey& a, const Prey& b) {
    return a.pos == b.pos && a.alive == b.alive;
  }
};

/// Dynamic world configuration. Hunters may stack; hares never move;
/// terminal is set as soon as any prey is captured.
struct GridWorld {
  std::shared_ptr<const Board> board;
  std::vector<Cell> hunters;
  std::vector<Prey> stags;
  std::vector<Prey> hares;
  bool terminal = false;

  friend bool operator==(const GridWorld& a, const GridWorld& b) {
    return a.hunters == b.hunters && a.stags == b.stags && a.hares == b.hares &&
           a.terminal == b.terminal;
  }
};

inline std::uint64_t hash_world(const GridWorld& w, int t) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(t);
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& c : w.hunters) mix((std::uint64_t(c.x) << 16) | std::uint64_t(c.y));
  for (const auto& p : w.stags) mix((std::uint64_t(p.pos.x) << 17) | (std::uint64_t(p.pos.y) << 1) | p.alive);
  for (const auto& p : w.hares) mix((std::uint64_t(p.pos.x) << 18) | (std::uint64_t(p.pos.y) << 2) | p.alive);
  mix(w.terminal ? 0xabcdULL : 0x1234ULL);
  return h;
}

/// Scoring and flee parameters. Stag points are split equally among all
/// hunters on the capture cell; same for the hare point.
struct Rules {
  int flee_radius = 2;     // stags only react to hunters within this Manhattan distance
  double hare_reward = 1.0;
  double stag_reward = 20.0;
};

struct CaptureEvent {
  bool is_stag = false;
  int prey_index = 0;
  std::vector<int> hunters;      // capturing hunter ids
  std::vector<double> rewards;   // aligned with hunters
};

struct StepOutcome {
  GridWorld world;
  std::vector<double> rewards;   // per hunter
  std::vector<CaptureEvent> events;
  double prob = 0.0;
};

inline void validate_world(const GridWorld& w) {
  if (!w.board) throw DomainError("world has no board");
  auto check = [&](const Cell& c, const std::string& what) {
    if (!w.board->in_bounds(c))
      throw DomainError(what + " out of bounds at (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    if (w.board->is_wall(c))
      throw DomainError(what + " starts on wall (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
  };
  for (std::size_t i = 0; i < w.hunters.size(); ++i) check(w.hunters[i], "hunter " + std::to_string(i));
  std::vector<Cell> prey_cells;
  for (std::size_t i = 0; i < w.stags.size(); ++i) {
    check(w.stags[i].pos, "stag " + std::to_string(i));
    if (w.stags[i].alive) prey_cells.push_back(w.stags[i].pos);
  }
  for (std::size_t i = 0; i < w.hares.size(); ++i) {
    check(w.hares[i].pos, "hare " + std::to_string(i));
    if (w.hares[i].alive) prey_cells.push_back(w.hares[i].pos);
  }
  for (std::size_t i = 0; i < prey_cells.size(); ++i)
    for (std::size_t j = i + 1; j < prey_cells.size(); ++j)
      if (prey_cells[i] == prey_cells[j]) throw DomainError("two prey share a cell at t=0");
}

inline std::vector<Move> legal_moves_at(const Board& board, const Cell& c) {
  std::vector<Move> out;
  for (Move m : {Move::North, Move::South, Move::East, Move::West}) {
    if (board.passable(apply_move(c, m))) out.push_back(m);
  }
  out.push_back(Move::Stay);
  return out;
}

inline std::vector<Move> legal_moves(const GridWorld& w, int hunter_id) {
  if (hunter_id < 0 || hunter_id >= static_cast<int>(w.hunters.size()))
    throw DomainError("invalid hunter id " + std::to_string(hunter_id));
  if (w.terminal) throw TerminalError("legal_moves on terminal world");
  return legal_moves_at(*w.board, w.hunters[hunter_id]);
}

/// Flee rule: stags only notice hunters within flee_radius. When alerted
/// they move (uniformly over ties) to maximize post-move Manhattan
/// distance to the nearest hunter, measured against pre-move hunter
/// positions; otherwise they stay put.
inline std::vector<std::pair<Move, double>> stag_flee_dist(const GridWorld& w, int stag_index,
                                                           const Rules& rules = {}) {
  if (stag_index < 0 || stag_index >= static_cast<int>(w.stags.size()))
    throw DomainError("invalid stag index " + std::to_string(stag_index));
  const Prey& stag = w.stags[stag_index];
  if (!stag.alive) throw DomainError("stag " + std::to_string(stag_index) + " is dead");

  int nearest = std::numeric_limits<int>::max();
  for (const auto& h : w.hunters) nearest = std::min(nearest, manhattan(stag.pos, h));
  if (w.hunters.empty() || nearest > rules.flee_radius) return {{Move::Stay, 1.0}};

  auto moves = legal_moves_at(*w.board, stag.pos);
  int best = -1;
  std::vector<Move> argmax;
  for (Move m : moves) {
    Cell dst = apply_move(stag.pos, m);
    int d = std::numeric_limits<int>::max();
    for (const auto& h : w.hunters) d = std::min(d, manhattan(dst, h));
    if (d > best) {
      best = d;
      argmax.assign(1, m);
    } else if (d == best) {
      argmax.push_back(m);
    }
  }
  std::vector<std::pair<Move, double>> out;
  const double p = 1.0 / static_cast<double>(argmax.size());
  for (Move m : argmax) out.emplace_back(m, p);
  return out;
}

/// Simultaneous step: hunters move per their actions, alive stags per
/// their flee distributions, all from pre-move positions. Captures are
/// judged on post-move cells: a hare falls to >=1 hunter, a stag to >=2
/// hunters on its post-move cell. Any capture terminates the episode.
inline std::vector<StepOutcome> step_dist(const GridWorld& w, const std::vector<Move>& actions,
                                          const Rules& rules = {}) {
  if (w.terminal) throw TerminalError("step on terminal world");
  if (actions.size() != w.hunters.size()) throw DomainError("hunter action count mismatch");
  std::vector<Cell> hunters_post(w.hunters.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    Cell dst = apply_move(w.hunters[i], actions[i]);
    if (!w.board->passable(dst))
      throw DomainError("illegal move " + std::string(move_name(actions[i])) + " for hunter " +
                        std::to_string(i));
    hunters_post[i] = dst;
  }

  // Product distribution over alive stags' flee moves.
  std::vector<int> moving;
  std::vector<std::vector<std::pair<Move, double>>> flee;
  for (int i = 0; i < static_cast<int>(w.stags.size()); ++i) {
    if (!w.stags[i].alive) continue;
    moving.push_back(i);
    flee.push_back(stag_flee_dist(w, i, rules));
  }

  std::vector<StepOutcome> outcomes;
  std::vector<std::size_t> idx(moving.size(), 0);
  for (;;) {
    double prob = 1.0;
    GridWorld next = w;
    next.hunters = hunters_post;
    for (std::size_t k = 0; k < moving.size(); ++k) {
      const auto& [m, p] = flee[k][idx[k]];
      prob *= p;
      next.stags[moving[k]].pos = apply_move(w.stags[moving[k]].pos, m);
    }

    StepOutcome oc;
    oc.rewards.assign(w.hunters.size(), 0.0);
    auto capture = [&](bool is_stag, int prey_index, const Cell& cell, double total, int min_hunters) {
      std::vector<int> on_cell;
      for (int h = 0; h < static_cast<int>(hunters_post.size()); ++h)
        if (hunters_post[h] == cell) on_cell.push_back(h);
      if (static_cast<int>(on_cell.size()) < min_hunters) return false;
      CaptureEvent ev;
      ev.is_stag = is_stag;
      ev.prey_index = prey_index;
      ev.hunters = on_cell;
      const double share = total / static_cast<double>(on_cell.size());
      for (int h : on_cell) {
        ev.rewards.push_back(share);
        oc.rewards[h] += share;
      }
      oc.events.push_back(std::move(ev));
      return true;
    };
    for (int i = 0; i < static_cast<int>(next.hares.size()); ++i) {
      if (next.hares[i].alive && capture(false, i, next.hares[i].pos, rules.hare_reward, 1))
        next.hares[i].alive = false;
    }
    for (int i = 0; i < static_cast<int>(next.stags.size()); ++i) {
      if (next.stags[i].alive && capture(true, i, next.stags[i].pos, rules.stag_reward, 2))
        next.stags[i].alive = false;
    }
    next.terminal = !oc.events.empty();
    oc.world = std::move(next);
    oc.prob = prob;

    // Merge duplicate worlds from different flee combinations.
    bool merged = false;
    for (auto& existing : outcomes) {
      if (existing.world == oc.world && existing.rewards == oc.rewards) {
        existing.prob += oc.prob;
        merged = true;
        break;
      }
    }
    if (!merged) outcomes.push_back(std::move(oc));

    std::size_t k = moving.size();
    while (k > 0 && ++idx[k - 1] == flee[k - 1].size()) idx[--k] = 0;
    if (moving.empty() || k == 0) break;
  }
  return outcomes;
}

/// BFS distances over passable cells; -1 where unreachable.
inline std::vector<int> bfs_distances(const Board& board, const Cell& from) {
  std::vector<int> dist(static_cast<std::size_t>(board.width) * board.height, -1);
  auto at = [&](const Cell& c) -> int& { return dist[static_cast<std::size_t>(c.y) * board.width + c.x]; };
  std::deque<Cell> frontier{from};
  at(from) = 0;
  while (!frontier.empty()) {
    Cell c = frontier.front();
    frontier.pop_front();
    for (Move m : {Move::North, Move::South, Move::East, Move::West}) {
      Cell n = apply_move(c, m);
      if (board.passable(n) && at(n) < 0) {
        at(n) = at(c) + 1;
        frontier.push_back(n);
      }
    }
  }
  return dist;
}

/// Adapter exposing the stag hunt as a StochasticGame. States are
/// (GridWorld, t) pairs interned lazily; t counts steps since the root
/// world and the game is terminal at capture or t == horizon.
class StagHuntGame : public StochasticGame,
                     public std::enable_shared_from_this<StagHuntGame> {
 public:
  StagHuntGame(GridWorld initial, int horizon, double gamma, Rules rules = {},
               std::size_t state_cap = 4'000'000)
      : horizon_(horizon), gamma_(gamma), rules_(rules), state_cap_(state_cap) {
    if (horizon <= 0) throw ConfigError("horizon must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("discount must be in (0,1]");
    validate_world(initial);
    intern(std::move(initial), 0);
  }

  int n_agents() const override { return static_cast<int>(world(0).hunters.size()); }
  double discount() const override { return gamma_; }
  const Rules& rules() const { return rules_; }
  int horizon() const { return horizon_; }

  bool is_terminal(StateId s) const override {
    std::lock_guard<std::mutex> lock(mu_);
    const Entry& e = entry(s);
    return e.world.terminal || e.t >= horizon_;
  }

  std::vector<ActionId> legal_actions(StateId s, AgentId agent) const override {
    GridWorld w = world(s);
    if (agent < 0 || agent >= static_cast<int>(w.hunters.size()))
      throw DomainError("invalid hunter id " + std::to_string(agent));
    if (is_terminal(s)) return {};
    std::vector<ActionId> out;
    for (Move m : legal_moves(w, agent)) out.push_back(static_cast<ActionId>(m));
    return out;
  }

  std::vector<Transition> transition_dist(StateId s, const JointAction& a) const override {
    return step(s, a).transitions;
  }

  std::vector<double> reward_vector(StateId s, const JointAction& a, StateId next) const override {
    const CachedStep& cs = step(s, a);
    for (std::size_t i = 0; i < cs.transitions.size(); ++i)
      if (cs.transitions[i].next == next) return cs.rewards[i];
    throw DomainError("reward_vector: successor state has zero probability");
  }

  std::uint64_t state_key(StateId s) const override {
    std::lock_guard<std::mutex> lock(mu_);
    const Entry& e = entry(s);
    return hash_world(e.world, e.t);
  }

  /// Myopic solo policy: pick the reachable prey maximizing
  /// gamma^distance * value (hare = 1, stag = half the split pot),
  /// then move uniformly along BFS-shortest first steps toward it.
  ActionDist base_policy(StateId s, AgentId agent, BasePolicyKind kind) const override {
    if (kind == BasePolicyKind::UniformRandom)
      return StochasticGame::base_policy(s, agent, kind);
    GridWorld w = world(s);
    if (agent < 0 || agent >= static_cast<int>(w.hunters.size()))
      throw DomainError("invalid hunter id " + std::to_string(agent));
    auto dist = bfs_distances(*w.board, w.hunters[agent]);
    auto at = [&](const Cell& c) { return dist[static_cast<std::size_t>(c.y) * w.board->width + c.x]; };
    double best_score = -1.0;
    Cell target{};
    bool found = false;
    auto consider = [&](const Prey& p, double value) {
      if (!p.alive) return;
      int d = at(p.pos);
      if (d < 0) return;
      double score = std::pow(gamma_, d) * value;
      if (score > best_score) {
        best_score = score;
        target = p.pos;
        found = true;
      }
    };
    for (const auto& p : w.hares) consider(p, rules_.hare_reward);
    for (const auto& p : w.stags) consider(p, rules_.stag_reward / 2.0);
    if (!found) return {{static_cast<ActionId>(Move::Stay), 1.0}};
    return steps_toward(w, agent, target);
  }

  /// Rollout heuristic for sample-based planning: like GreedySolo, but a
  /// stag only counts as a target when some other hunter is also closing
  /// in on it, and a hunter adjacent to a stag holds position until a
  /// partner is adjacent too (so a lone hunter never pushes the stag out
  /// of a trap). Falls back to a uniform step when nothing is worth
  /// chasing.
  ActionDist rollout_policy(StateId s, AgentId agent) const override {
    {
      std::lock_guard<std::mutex> lock(rollout_mu_);
      auto it = rollout_cache_.find(rollout_key(s, agent));
      if (it != rollout_cache_.end()) return it->second;
    }
    ActionDist out = rollout_policy_uncached(s, agent);
    std::lock_guard<std::mutex> lock(rollout_mu_);
    return rollout_cache_.emplace(rollout_key(s, agent), std::move(out)).first->second;
  }

 private:
  static std::uint64_t rollout_key(StateId s, AgentId agent) {
    return static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) * 64 + agent;
  }

  ActionDist rollout_policy_uncached(StateId s, AgentId agent) const {
    GridWorld w = world(s);
    if (agent < 0 || agent >= static_cast<int>(w.hunters.size()))
      throw DomainError("invalid hunter id " + std::to_string(agent));
    auto mine = bfs_distances(*w.board, w.hunters[agent]);
    auto my_d = [&](const Cell& c) { return mine[static_cast<std::size_t>(c.y) * w.board->width + c.x]; };

    double best_score = -1.0;
    Cell target{};
    bool found = false, target_is_stag = false;
    const Prey* target_stag = nullptr;
    for (const auto& p : w.hares) {
      if (!p.alive) continue;
      int d = my_d(p.pos);
      if (d < 0) continue;
      double score = std::pow(gamma_, d) * rules_.hare_reward;
      if (score > best_score) {
        best_score = score;
        target = p.pos;
        found = true;
        target_is_stag = false;
      }
    }
    for (const auto& p : w.stags) {
      if (!p.alive) continue;
      auto from_stag = bfs_distances(*w.board, p.pos);
      auto sd = [&](const Cell& c) { return from_stag[static_cast<std::size_t>(c.y) * w.board->width + c.x]; };
      int d = sd(w.hunters[agent]);
      if (d < 0) continue;
      bool partnered = false;
      for (int j = 0; j < static_cast<int>(w.hunters.size()); ++j) {
        if (j == agent) continue;
        int dj = sd(w.hunters[j]);
        if (dj >= 0 && dj <= d + 2) partnered = true;
      }
      if (!partnered) continue;
      double score = std::pow(gamma_, d) * rules_.stag_reward / 2.0;
      if (score > best_score) {
        best_score = score;
        target = p.pos;
        found = true;
        target_is_stag = true;
        target_stag = &p;
      }
    }
    if (!found) return StochasticGame::base_policy(s, agent, BasePolicyKind::UniformRandom);
    if (target_is_stag && my_d(target) == 1) {
      bool partner_adjacent = false;
      for (int j = 0; j < static_cast<int>(w.hunters.size()); ++j)
        if (j != agent && manhattan(w.hunters[j], target_stag->pos) <= 1) partner_adjacent = true;
      if (!partner_adjacent) return {{static_cast<ActionId>(Move::Stay), 1.0}};
    }
    return steps_toward(w, agent, target);
  }

 public:
  std::vector<StateId> enumerate_states() const override {
    std::vector<StateId> frontier{0}, all{0};
    std::size_t head = 0;
    while (head < all.size()) {
      StateId s = all[head++];
      if (is_terminal(s)) continue;
      for (const auto& ja : joint_actions(*this, s)) {
        for (const auto& tr : transition_dist(s, ja)) {
          if (std::find(all.begin(), all.end(), tr.next) == all.end()) all.push_back(tr.next);
        }
      }
      if (all.size() > state_cap_) throw CapacityError("state enumeration exceeded cap");
    }
    return all;
  }

  GridWorld world(StateId s) const {
    std::lock_guard<std::mutex> lock(mu_);
    return entry(s).world;
  }
  int time_of(StateId s) const {
    std::lock_guard<std::mutex> lock(mu_);
    return entry(s).t;
  }
  StateId intern_state(const GridWorld& w, int t) const { return intern(w, t); }

 private:
  struct Entry {
    GridWorld world;
    int t;
  };
  struct CachedStep {
    std::vector<Transition> transitions;
    std::vector<std::vector<double>> rewards;  // aligned with transitions
    std::vector<std::vector<CaptureEvent>> events;
  };

  /// Uniform distribution over the legal moves that shorten the BFS
  /// distance to `target` (Stay when already there or unreachable).
  ActionDist steps_toward(const GridWorld& w, AgentId agent, const Cell& target) const {
    auto to_target = bfs_distances(*w.board, target);
    auto td = [&](const Cell& c) { return to_target[static_cast<std::size_t>(c.y) * w.board->width + c.x]; };
    int here = td(w.hunters[agent]);
    if (here <= 0) return {{static_cast<ActionId>(Move::Stay), 1.0}};
    std::vector<ActionId> steps;
    for (Move m : legal_moves(w, agent)) {
      Cell n = apply_move(w.hunters[agent], m);
      if (td(n) == here - 1) steps.push_back(static_cast<ActionId>(m));
    }
    ActionDist out;
    const double p = 1.0 / static_cast<double>(steps.size());
    for (ActionId a : steps) out.emplace_back(a, p);
    return out;
  }

  const Entry& entry(StateId s) const {
    if (s < 0 || s >= static_cast<StateId>(states_.size()))
      throw DomainError("unknown state id " + std::to_string(s));
    return states_[s];
  }

  StateId intern(GridWorld w, int t) const {
    std::lock_guard<std::mutex> lock(mu_);
    const std::uint64_t h = hash_world(w, t);
    auto range = index_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      const Entry& e = states_[it->second];
      if (e.t == t && e.world == w) return it->second;
    }
    if (states_.size() >= state_cap_) throw CapacityError("state interner exceeded cap");
    StateId id = static_cast<StateId>(states_.size());
    states_.push_back(Entry{std::move(w), t});
    index_.emplace(h, id);
    return id;
  }

  const CachedStep& step(StateId s, const JointAction& a) const {
    GridWorld w;
    int t;
    {
      std::lock_guard<std::mutex> lock(mu_);
      const Entry& e = entry(s);
      if (e.world.terminal || e.t >= horizon_) throw TerminalError("transition from terminal state");
      w = e.world;
      t = e.t;
    }
    if (a.size() != w.hunters.size()) throw DomainError("joint action arity mismatch");
    std::uint64_t key = static_cast<std::uint64_t>(s);
    for (std::size_t i = 0; i < a.size(); ++i) key = key * 7 + static_cast<std::uint64_t>(a[i]) + 1;
    {
      std::lock_guard<std::mutex> lock(step_mu_);
      auto it = step_cache_.find(key);
      if (it != step_cache_.end()) return it->second;
    }
    std::vector<Move> moves;
    moves.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) moves.push_back(static_cast<Move>(a[i]));
    auto outcomes = step_dist(w, moves, rules_);
    CachedStep cs;
    for (auto& oc : outcomes) {
      cs.transitions.push_back({intern(oc.world, t + 1), oc.prob});
      cs.rewards.push_back(std::move(oc.rewards));
      cs.events.push_back(std::move(oc.events));
    }
    std::lock_guard<std::mutex> lock(step_mu_);
    return step_cache_.emplace(key, std::move(cs)).first->second;
  }

  int horizon_;
  double gamma_;
  Rules rules_;
  std::size_t state_cap_;
  mutable std::vector<Entry> states_;
  mutable std::unordered_multimap<std::uint64_t, StateId> index_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint64_t, CachedStep> step_cache_;
  mutable std::mutex step_mu_;
  mutable std::unordered_map<std::uint64_t, ActionDist> rollout_cache_;
  mutable std::mutex rollout_mu_;
};

/// Wrap a world as a finite-horizon game.
inline std::shared_ptr<StagHuntGame> as_stochastic_game(GridWorld world, int horizon,
                                                        double gamma = 0.95, Rules rules = {}) {
  return std::make_shared<StagHuntGame>(std::move(world), horizon, gamma, rules);
}

}  // namespace cth::staghunt
