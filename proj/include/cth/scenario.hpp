#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cth/inference.hpp"
#include "cth/staghunt.hpp"

namespace cth::harness {

using json = nlohmann::json;
using staghunt::Cell;
using staghunt::GridWorld;
using staghunt::Move;

/// Optional human-reference block: pairwise cooperation judgments in
/// [0,1] and per-step action distributions, aligned with the trajectory.
struct ReferenceBlock {
  // [step][pair "A-B"] -> value
  std::map<int, std::map<std::string, double>> team;
  // [step][agent][move name] -> probability
  std::map<int, std::map<std::string, std::map<std::string, double>>> actions;

  bool empty() const { return team.empty() && actions.empty(); }
};

/// One stag-hunt scene plus its observed hunter trajectory. Coordinates
/// are (x east, y north), origin bottom-left. stag_moves optionally pins
/// the flee outcomes of the replayed trajectory so fixtures are exact.
struct Scenario {
  int schema = 1;
  std::string name;
  int width = 0, height = 0;
  std::vector<Cell> walls;
  std::vector<Cell> hunters;
  std::vector<Cell> stags;
  std::vector<Cell> hares;
  int flee_radius = 2;
  double gamma = 0.95;
  int horizon = 10;
  std::string notes;
  std::vector<std::vector<Move>> trajectory;   // [step][hunter]
  std::vector<std::vector<Move>> stag_moves;   // optional, [step][stag]
  ReferenceBlock reference;

  GridWorld initial_world() const {
    auto board = std::make_shared<staghunt::Board>(width, height);
    for (const Cell& c : walls) board->set_wall(c);
    GridWorld w;
    w.board = board;
    w.hunters = hunters;
    for (const Cell& c : stags) w.stags.push_back({c, true});
    for (const Cell& c : hares) w.hares.push_back({c, true});
    staghunt::validate_world(w);
    return w;
  }

  staghunt::Rules rules() const {
    staghunt::Rules r;
    r.flee_radius = flee_radius;
    return r;
  }

  std::shared_ptr<staghunt::StagHuntGame> make_game() const {
    return staghunt::as_stochastic_game(initial_world(), horizon, gamma, rules());
  }
};

inline Cell cell_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("cell must be [x, y]");
  return Cell{j[0].get<int>(), j[1].get<int>()};
}

inline json cell_to_json(const Cell& c) { return json::array({c.x, c.y}); }

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  try {
    sc.schema = j.value("schema", 1);
    sc.name = j.at("name").get<std::string>();
    const auto& grid = j.at("grid");
    sc.width = grid.at("width").get<int>();
    sc.height = grid.at("height").get<int>();
    for (const auto& w : grid.value("walls", json::array())) sc.walls.push_back(cell_from_json(w));
    for (const auto& h : j.at("hunters")) sc.hunters.push_back(cell_from_json(h));
    for (const auto& s : j.at("stags")) sc.stags.push_back(cell_from_json(s));
    for (const auto& h : j.at("hares")) sc.hares.push_back(cell_from_json(h));
    sc.flee_radius = j.value("flee_radius", 2);
    sc.gamma = j.value("gamma", 0.95);
    sc.horizon = j.value("horizon", 10);
    sc.notes = j.value("notes", std::string{});
    for (const auto& step : j.value("trajectory", json::array())) {
      std::vector<Move> moves;
      for (const auto& m : step) moves.push_back(staghunt::move_from_name(m.get<std::string>()));
      sc.trajectory.push_back(std::move(moves));
    }
    for (const auto& step : j.value("stag_moves", json::array())) {
      std::vector<Move> moves;
      for (const auto& m : step) moves.push_back(staghunt::move_from_name(m.get<std::string>()));
      sc.stag_moves.push_back(std::move(moves));
    }
    if (j.contains("reference")) {
      const auto& ref = j.at("reference");
      for (const auto& rec : ref.value("team", json::array())) {
        int step = rec.at("step").get<int>();
        for (const auto& [pair, v] : rec.at("pairs").items())
          sc.reference.team[step][pair] = v.get<double>();
      }
      for (const auto& rec : ref.value("actions", json::array())) {
        int step = rec.at("step").get<int>();
        std::string agent = rec.at("agent").get<std::string>();
        for (const auto& [mv, v] : rec.at("dist").items())
          sc.reference.actions[step][agent][mv] = v.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return sc;
}

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema"] = sc.schema;
  j["name"] = sc.name;
  j["grid"]["width"] = sc.width;
  j["grid"]["height"] = sc.height;
  j["grid"]["walls"] = json::array();
  for (const Cell& c : sc.walls) j["grid"]["walls"].push_back(cell_to_json(c));
  for (const Cell& c : sc.hunters) j["hunters"].push_back(cell_to_json(c));
  j["stags"] = json::array();
  for (const Cell& c : sc.stags) j["stags"].push_back(cell_to_json(c));
  j["hares"] = json::array();
  for (const Cell& c : sc.hares) j["hares"].push_back(cell_to_json(c));
  j["flee_radius"] = sc.flee_radius;
  j["gamma"] = sc.gamma;
  j["horizon"] = sc.horizon;
  if (!sc.notes.empty()) j["notes"] = sc.notes;
  j["trajectory"] = json::array();
  for (const auto& step : sc.trajectory) {
    json row = json::array();
    for (Move m : step) row.push_back(staghunt::move_name(m));
    j["trajectory"].push_back(row);
  }
  if (!sc.stag_moves.empty()) {
    j["stag_moves"] = json::array();
    for (const auto& step : sc.stag_moves) {
      json row = json::array();
      for (Move m : step) row.push_back(staghunt::move_name(m));
      j["stag_moves"].push_back(row);
    }
  }
  return j;
}

/// Replay the scenario's trajectory through the dynamics, producing the
/// observation trace. Pinned stag moves are honored (and checked to have
/// nonzero probability); otherwise stag moves are sampled from `rng`.
inline ObservationTrace replay(const staghunt::StagHuntGame& game, const Scenario& sc,
                               std::mt19937_64& rng) {
  ObservationTrace trace;
  StateId s = 0;
  for (std::size_t t = 0; t < sc.trajectory.size(); ++t) {
    if (game.is_terminal(s))
      throw ValidationError("scenario '" + sc.name + "': trajectory continues past terminal at step " +
                            std::to_string(t));
    GridWorld w = game.world(s);
    if (sc.trajectory[t].size() != w.hunters.size())
      throw ValidationError("scenario '" + sc.name + "': trajectory arity at step " + std::to_string(t));
    JointAction ja;
    for (Move m : sc.trajectory[t]) ja.actions.push_back(static_cast<ActionId>(m));
    for (int i = 0; i < static_cast<int>(w.hunters.size()); ++i) {
      auto legal = game.legal_actions(s, i);
      if (std::find(legal.begin(), legal.end(), ja[i]) == legal.end())
        throw ValidationError("scenario '" + sc.name + "': illegal move " +
                              staghunt::move_name(sc.trajectory[t][i]) + " for hunter " +
                              agent_name(i) + " at step " + std::to_string(t));
    }
    trace.states.push_back(s);
    trace.actions.push_back(ja);

    StateId next;
    if (t < sc.stag_moves.size()) {
      GridWorld target = w;
      for (std::size_t h = 0; h < w.hunters.size(); ++h)
        target.hunters[h] = staghunt::apply_move(w.hunters[h], sc.trajectory[t][h]);
      std::size_t mi = 0;
      for (std::size_t k = 0; k < w.stags.size(); ++k) {
        if (!w.stags[k].alive) continue;
        if (mi >= sc.stag_moves[t].size())
          throw ValidationError("scenario '" + sc.name + "': missing stag move at step " +
                                std::to_string(t));
        target.stags[k].pos = staghunt::apply_move(w.stags[k].pos, sc.stag_moves[t][mi++]);
      }
      auto dist = game.transition_dist(s, ja);
      next = -1;
      for (const auto& tr : dist) {
        GridWorld cand = game.world(tr.next);
        bool same = cand.hunters == target.hunters;
        for (std::size_t k = 0; same && k < cand.stags.size(); ++k)
          same = cand.stags[k].pos == target.stags[k].pos;
        if (same) {
          next = tr.next;
          break;
        }
      }
      if (next < 0)
        throw ValidationError("scenario '" + sc.name + "': pinned stag move has zero probability at step " +
                              std::to_string(t));
    } else {
      auto dist = game.transition_dist(s, ja);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      double u = unit(rng) * dist_total(dist);
      next = dist.back().next;
      for (const auto& tr : dist) {
        if (u <= tr.prob) {
          next = tr.next;
          break;
        }
        u -= tr.prob;
      }
    }
    s = next;
  }
  return trace;
}

/// Load and fully validate a scenario file (schema, world invariants,
/// trajectory replay, reference alignment).
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("scenario '" + path + "': " + e.what());
  }
  Scenario sc = scenario_from_json(j);
  auto game = sc.make_game();  // validates world invariants
  std::mt19937_64 rng(0);
  replay(*game, sc, rng);  // validates trajectory
  const int T = static_cast<int>(sc.trajectory.size());
  for (const auto& [step, pairs] : sc.reference.team)
    if (step < 1 || step > T)
      throw ValidationError("scenario '" + sc.name + "': reference team step " +
                            std::to_string(step) + " outside trajectory");
  for (const auto& [step, agents] : sc.reference.actions)
    if (step < 1 || step > T)
      throw ValidationError("scenario '" + sc.name + "': reference action step " +
                            std::to_string(step) + " outside trajectory");
  return sc;
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write scenario file: " + path);
  out << scenario_to_json(sc).dump(2) << "\n";
}

}  // namespace cth::harness
