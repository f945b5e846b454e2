// Command-line front end: scenario validation, episode simulation, team
// inference and action prediction over scenario sets, metric evaluation
// and plot-data emission.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cth/experiments.hpp"
#include "cth/tree.hpp"

namespace fs = std::filesystem;
using cth::harness::ExperimentConfig;
using cth::harness::Scenario;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitEngine = 3;

struct GlobalOpts {
  std::uint64_t seed = 0;
  double beta = -1.0;  // <0: per-experiment default
  std::string planner = "uct";
  std::string rollout = "greedy";
  int budget = 10000;
  int horizon = 10;
  double gamma = -1.0;  // <0: scenario value
  double exploration_c = 4.0;
  std::string prior = "uniform";
  std::vector<std::string> variants;
  std::string out_dir = "out";
  int jobs = 1;
  bool include_base = true;
  int levelk_max = 1;
};

ExperimentConfig make_config(const GlobalOpts& g) {
  ExperimentConfig cfg;
  cfg.planner.mode = g.planner == "exact" ? cth::PlannerConfig::Mode::Exact
                                          : cth::PlannerConfig::Mode::Uct;
  if (g.planner != "exact" && g.planner != "uct")
    throw cth::ConfigError("--planner must be 'exact' or 'uct'");
  cfg.planner.rollout = g.rollout == "random" ? cth::PlannerConfig::Rollout::Random
                                              : cth::PlannerConfig::Rollout::Greedy;
  if (g.rollout != "random" && g.rollout != "greedy")
    throw cth::ConfigError("--rollout must be 'random' or 'greedy'");
  cfg.planner.seed = g.seed;
  cfg.planner.budget = g.budget;
  cfg.planner.horizon = g.horizon;
  cfg.planner.exploration_c = g.exploration_c;
  if (g.beta >= 0.0) {
    cfg.beta_team = g.beta;
    cfg.beta_action = g.beta;
  }
  cfg.jobs = g.jobs;
  cfg.include_base = g.include_base;
  cfg.levelk_max = g.levelk_max;
  if (g.prior != "uniform") {
    std::istringstream in(g.prior);
    std::string tok;
    while (std::getline(in, tok, ','))
      if (!tok.empty()) cfg.prior.push_back(std::stod(tok));
    if (cfg.prior.empty()) throw cth::ConfigError("--prior must be 'uniform' or a comma list");
  }
  return cfg;
}

std::vector<Scenario> load_all(const std::vector<std::string>& paths, double gamma_override) {
  std::vector<Scenario> out;
  for (const auto& p : paths) {
    Scenario sc = cth::harness::load_scenario(p);
    if (gamma_override > 0.0) sc.gamma = gamma_override;
    out.push_back(std::move(sc));
  }
  return out;
}

void write_manifest(const GlobalOpts& g, const ExperimentConfig& cfg, const std::string& command,
                    const std::vector<std::string>& inputs) {
  fs::create_directories(g.out_dir);
  json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["seed"] = g.seed;
  m["planner"] = g.planner;
  m["rollout"] = g.rollout;
  m["budget"] = g.budget;
  m["horizon"] = g.horizon;
  m["exploration_c"] = g.exploration_c;
  m["gamma"] = g.gamma > 0.0 ? json(g.gamma) : json("scenario");
  m["beta_team"] = cfg.beta_team;
  m["beta_action"] = cfg.beta_action;
  m["prior"] = g.prior;
  m["include_base"] = g.include_base;
  m["levelk_max"] = g.levelk_max;
  m["jobs"] = g.jobs;
  m["variants"] = g.variants;
  std::ofstream out(fs::path(g.out_dir) / "run-manifest.json", std::ios::binary);
  out << m.dump(2) << "\n";
}

void write_results(const cth::harness::ResultTable& table, const std::string& out_dir,
                   const std::string& filename) {
  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / filename, std::ios::binary);
  cth::harness::write_result_table(table, out);
  std::cout << "wrote " << (fs::path(out_dir) / filename).string() << " (" << table.records.size()
            << " records)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composable team hierarchies for the spatial stag hunt: planning, "
               "inverse group planning, and experiment harness"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--beta", g.beta, "rationality parameter (default: 1 for teams, 5 for actions)");
  app.add_option("--planner", g.planner, "planner backend: exact|uct")->default_str("uct");
  app.add_option("--rollout", g.rollout, "UCT rollout policy: greedy|random")->default_str("greedy");
  app.add_option("--budget", g.budget, "UCT simulation budget per query");
  app.add_option("--horizon", g.horizon, "planning lookahead depth");
  app.add_option("--gamma", g.gamma, "override scenario discount factor");
  app.add_option("--exploration-c", g.exploration_c, "UCT exploration constant");
  app.add_option("--prior", g.prior, "hypothesis prior: 'uniform' or comma-separated weights");
  app.add_option("--variant", g.variants, "model variants to run (bma, ml, levelk)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--jobs", g.jobs, "parallel scenario workers");
  app.add_flag("--no-base,!--base", g.include_base, "include the base-policy hypothesis")
      ->default_val(true);
  app.add_option("--levelk-max", g.levelk_max, "max level for the level-K baseline");

  auto* validate = app.add_subcommand("validate", "check scenario files against the schema");
  std::vector<std::string> validate_paths;
  validate->add_option("scenarios", validate_paths, "scenario files")->required();

  auto* enumerate = app.add_subcommand("enumerate-hypotheses", "print a hypothesis set");
  int enum_agents = 3;
  std::string enum_agent = "A";
  bool enum_levelk = false;
  enumerate->add_option("--agents", enum_agents, "number of hunters");
  enumerate->add_option("--agent", enum_agent, "observed agent (A, B, ...)");
  enumerate->add_flag("--levelk", enum_levelk, "level-K towers instead of depth-1 CTH");

  auto* simulate = app.add_subcommand("simulate", "roll an episode under per-hunter stances");
  std::string sim_scenario;
  std::vector<std::string> sim_cth;
  int sim_max_steps = 50;
  simulate->add_option("scenario", sim_scenario, "scenario file")->required();
  simulate->add_option("--cth", sim_cth,
                       "per-hunter stance: CTH expression, 'uniform' or 'greedy' (repeat per hunter; "
                       "defaults to uniform)");
  simulate->add_option("--max-steps", sim_max_steps, "step cap before truncation");

  auto* infer = app.add_subcommand("infer-teams", "Experiment 1: posterior team structure");
  std::vector<std::string> infer_paths;
  infer->add_option("scenarios", infer_paths, "scenario files")->required();

  auto* predict = app.add_subcommand("predict-actions", "Experiment 2: next-action prediction");
  std::vector<std::string> predict_paths;
  predict->add_option("scenarios", predict_paths, "scenario files")->required();

  auto* evaluate = app.add_subcommand("evaluate", "R / RMSE against scenario reference blocks");
  std::vector<std::string> eval_paths;
  std::string eval_results;
  evaluate->add_option("scenarios", eval_paths, "scenario files with reference blocks")->required();
  evaluate->add_option("--results", eval_results, "result table (TSV) to score")->required();

  auto* plots = app.add_subcommand("emit-plots", "per-scenario time-series files");
  std::string plot_results;
  plots->add_option("--results", plot_results, "result table (TSV)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      try {
        for (const auto& p : validate_paths) {
          cth::harness::load_scenario(p);
          std::cout << p << ": OK\n";
        }
      } catch (const cth::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
      }
      return kExitOk;
    }

    if (enumerate->parsed()) {
      cth::AgentId agent = cth::agent_from_name(enum_agent);
      auto set = enum_levelk ? cth::enumerate_levelk(enum_agents, agent, g.levelk_max)
                             : cth::enumerate_depth1(enum_agents, agent, g.include_base);
      for (std::size_t h = 0; h < set.size(); ++h)
        std::cout << h << "\t" << cth::to_string(set[h]) << "\n";
      return kExitOk;
    }

    if (simulate->parsed()) {
      Scenario sc = cth::harness::load_scenario(sim_scenario);
      if (g.gamma > 0.0) sc.gamma = g.gamma;
      auto game = sc.make_game();
      ExperimentConfig cfg = make_config(g);
      std::vector<cth::Policy> policies;
      for (int i = 0; i < game->n_agents(); ++i) {
        std::string spec = i < static_cast<int>(sim_cth.size()) ? sim_cth[i] : "uniform";
        if (spec == "uniform") {
          policies.push_back(
              cth::compile(cth::CthNode::base(i, cth::BasePolicyKind::UniformRandom), game,
                           cfg.planner)
                  .policy);
        } else if (spec == "greedy") {
          policies.push_back(
              cth::compile(cth::CthNode::base(i, cth::BasePolicyKind::GreedySolo), game, cfg.planner)
                  .policy);
        } else {
          cth::PlannerConfig pc = cfg.planner;
          pc.seed = cth::mix_seed(g.seed, static_cast<std::uint64_t>(i));
          policies.push_back(cth::compile(cth::parse_cth(spec), game, pc).policy);
        }
      }
      auto result = cth::harness::simulate(game, policies, g.seed, sim_max_steps);
      json out;
      out["scenario"] = sc.name;
      out["truncated"] = result.truncated;
      out["total_rewards"] = result.total_rewards;
      out["steps"] = json::array();
      for (std::size_t t = 0; t < result.trace.length(); ++t) {
        json step;
        step["t"] = t;
        json moves = json::array();
        for (std::size_t i = 0; i < result.trace.actions[t].size(); ++i)
          moves.push_back(
              cth::staghunt::move_name(static_cast<cth::staghunt::Move>(result.trace.actions[t][i])));
        step["hunter_moves"] = moves;
        json hunters = json::array();
        for (const auto& c : game->world(result.trace.states[t]).hunters)
          hunters.push_back(json::array({c.x, c.y}));
        step["hunters"] = hunters;
        out["steps"].push_back(step);
      }
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }

    if (infer->parsed()) {
      ExperimentConfig cfg = make_config(g);
      auto scenarios = load_all(infer_paths, g.gamma);
      std::vector<std::string> variants = g.variants.empty()
                                              ? std::vector<std::string>{"bma", "ml"}
                                              : g.variants;
      auto table = cth::harness::run_team_inference(scenarios, cfg, variants);
      write_manifest(g, cfg, "infer-teams", infer_paths);
      write_results(table, g.out_dir, "team_inference.tsv");
      return kExitOk;
    }

    if (predict->parsed()) {
      ExperimentConfig cfg = make_config(g);
      auto scenarios = load_all(predict_paths, g.gamma);
      std::vector<std::string> variants = g.variants.empty()
                                              ? std::vector<std::string>{"bma", "ml", "levelk"}
                                              : g.variants;
      auto table = cth::harness::run_action_prediction(scenarios, cfg, variants);
      write_manifest(g, cfg, "predict-actions", predict_paths);
      write_results(table, g.out_dir, "action_prediction.tsv");
      return kExitOk;
    }

    if (evaluate->parsed()) {
      auto scenarios = load_all(eval_paths, -1.0);
      std::ifstream in(eval_results);
      if (!in) throw cth::ValidationError("cannot open results file: " + eval_results);
      auto table = cth::harness::read_result_table(in);
      auto report = cth::harness::evaluate(table, scenarios);
      cth::harness::write_metrics(report, std::cout);
      fs::create_directories(g.out_dir);
      std::ofstream out(fs::path(g.out_dir) / "metrics.tsv", std::ios::binary);
      cth::harness::write_metrics(report, out);
      return kExitOk;
    }

    if (plots->parsed()) {
      std::ifstream in(plot_results);
      if (!in) throw cth::ValidationError("cannot open results file: " + plot_results);
      auto table = cth::harness::read_result_table(in);
      for (const auto& path : cth::harness::emit_plot_data(table, g.out_dir))
        std::cout << "wrote " << path << "\n";
      return kExitOk;
    }
  } catch (const cth::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const cth::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return kExitEngine;
  }
  return kExitOk;
}
