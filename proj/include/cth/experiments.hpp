#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cth/metrics.hpp"
#include "cth/scenario.hpp"

namespace cth::harness {

inline std::string pair_key(AgentId i, AgentId j) {
  if (i > j) std::swap(i, j);
  return agent_name(i) + "-" + agent_name(j);
}

struct ResultRecord {
  std::string scenario;
  int step = 0;
  std::string kind;     // team_prob | action_prob
  std::string key;      // "A-B" for pairs, "A:N" for agent+action
  std::string variant;  // bma | ml | levelk
  double value = 0.0;
};

struct ResultTable {
  std::vector<ResultRecord> records;

  void sort() {
    std::stable_sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
      return std::tie(a.scenario, a.step, a.kind, a.key, a.variant) <
             std::tie(b.scenario, b.step, b.kind, b.key, b.variant);
    });
  }
};

inline std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

inline void write_result_table(const ResultTable& table, std::ostream& out) {
  out << "scenario\tstep\tkind\tkey\tvariant\tvalue\n";
  for (const auto& r : table.records) {
    out << r.scenario << "\t" << r.step << "\t" << r.kind << "\t" << r.key << "\t" << r.variant
        << "\t" << format_value(r.value) << "\n";
  }
}

inline ResultTable read_result_table(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty result table");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    ResultRecord rec;
    std::string step, value;
    if (!std::getline(row, rec.scenario, '\t') || !std::getline(row, step, '\t') ||
        !std::getline(row, rec.kind, '\t') || !std::getline(row, rec.key, '\t') ||
        !std::getline(row, rec.variant, '\t') || !std::getline(row, value, '\t'))
      throw ValidationError("malformed result row at line " + std::to_string(lineno));
    rec.step = std::stoi(step);
    rec.value = std::stod(value);
    table.records.push_back(std::move(rec));
  }
  return table;
}

struct ExperimentConfig {
  PlannerConfig planner;
  double beta_team = 1.0;
  double beta_action = 5.0;
  bool include_base = true;
  BasePolicyKind leaf_kind = BasePolicyKind::UniformRandom;
  int levelk_max = 1;
  TeamReadout readout = TeamReadout::Product;
  std::vector<double> prior;  // empty = uniform; else per-hypothesis weights
  std::vector<int> report_steps;  // empty = every trajectory step
  int jobs = 1;
};

inline std::vector<int> effective_steps(const ExperimentConfig& cfg, int traj_len) {
  if (!cfg.report_steps.empty()) return cfg.report_steps;
  std::vector<int> steps;
  for (int t = 1; t <= traj_len; ++t) steps.push_back(t);
  return steps;
}

/// Roll an episode forward under per-hunter policies, sampling both
/// hunter actions and stag flights; reproducible by seed.
struct SimulationResult {
  ObservationTrace trace;
  std::vector<double> total_rewards;
  bool truncated = false;
};

inline SimulationResult simulate(const std::shared_ptr<staghunt::StagHuntGame>& game,
                                 const std::vector<Policy>& policies, std::uint64_t seed,
                                 int max_steps) {
  if (static_cast<int>(policies.size()) != game->n_agents())
    throw DomainError("one policy per hunter required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample = [&](const auto& weighted) {
    double total = 0.0;
    for (const auto& [x, p] : weighted) total += p;
    double u = unit(rng) * total;
    for (const auto& [x, p] : weighted) {
      if (u <= p) return x;
      u -= p;
    }
    return weighted.back().first;
  };

  SimulationResult result;
  result.total_rewards.assign(game->n_agents(), 0.0);
  StateId s = 0;
  for (int t = 0; t < max_steps; ++t) {
    if (game->is_terminal(s)) return result;
    JointAction ja;
    for (int i = 0; i < game->n_agents(); ++i) ja.actions.push_back(sample(policies[i](s)));
    std::vector<std::pair<StateId, double>> successors;
    for (const auto& tr : game->transition_dist(s, ja)) successors.emplace_back(tr.next, tr.prob);
    StateId next = sample(successors);
    auto r = game->reward_vector(s, ja, next);
    for (int i = 0; i < game->n_agents(); ++i) result.total_rewards[i] += r[i];
    result.trace.states.push_back(s);
    result.trace.actions.push_back(ja);
    s = next;
  }
  result.truncated = !game->is_terminal(s);
  return result;
}

namespace detail {

inline std::vector<std::vector<double>> priors_for(const ExperimentConfig& cfg, int n_agents,
                                                   std::size_t set_size) {
  if (cfg.prior.empty()) return {};
  if (cfg.prior.size() != set_size)
    throw ConfigError("prior vector length " + std::to_string(cfg.prior.size()) +
                      " does not match hypothesis count " + std::to_string(set_size));
  return std::vector<std::vector<double>>(n_agents, cfg.prior);
}

/// Run fn over scenarios, sequentially or on a small worker pool; output
/// order is by input index regardless of completion order.
template <typename Fn>
std::vector<ResultTable> map_scenarios(const std::vector<Scenario>& scenarios, int jobs, Fn&& fn) {
  std::vector<ResultTable> parts(scenarios.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) parts[i] = fn(scenarios[i]);
    return parts;
  }
  std::vector<std::future<void>> futures;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < jobs; ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= scenarios.size()) return;
        parts[i] = fn(scenarios[i]);
      }
    }));
  }
  for (auto& f : futures) f.get();
  return parts;
}

}  // namespace detail

/// Experiment 1: per-scenario, per report step, per unordered hunter
/// pair, the cooperation probability under the BMA posterior and the 0/1
/// judgment of the maximum-likelihood hypotheses.
inline ResultTable run_team_inference(const std::vector<Scenario>& scenarios,
                                      const ExperimentConfig& cfg,
                                      const std::vector<std::string>& variants = {"bma", "ml"}) {
  auto run_one = [&](const Scenario& sc) {
    ResultTable part;
    try {
      auto game = sc.make_game();
      const int n = game->n_agents();
      std::vector<HypothesisSet> sets;
      for (AgentId i = 0; i < n; ++i)
        sets.push_back(enumerate_depth1(n, i, cfg.include_base, cfg.leaf_kind));
      PlannerConfig pc = cfg.planner;
      pc.seed = mix_seed(cfg.planner.seed, std::hash<std::string>{}(sc.name));
      InferenceEngine engine(game, sets, cfg.beta_team, pc,
                             detail::priors_for(cfg, n, sets[0].size()));
      std::mt19937_64 rng(mix_seed(pc.seed, 0x7261636bULL));
      auto trace = replay(*game, sc, rng);
      auto posteriors = engine.infer_trace(trace);

      for (int step : effective_steps(cfg, static_cast<int>(sc.trajectory.size()))) {
        for (AgentId i = 0; i < n; ++i) {
          for (AgentId j = i + 1; j < n; ++j) {
            for (const auto& variant : variants) {
              double value;
              if (variant == "bma") {
                value = team_probability(posteriors[i][step], posteriors[j][step], i, j, cfg.readout);
              } else if (variant == "ml") {
                auto argmax = [](const Posterior& p) {
                  std::size_t best = 0;
                  for (std::size_t h = 1; h < p.probs.size(); ++h)
                    if (p.probs[h] > p.probs[best]) best = h;
                  return p.hypotheses[best];
                };
                bool both = cooperates(argmax(posteriors[i][step]), j) &&
                            cooperates(argmax(posteriors[j][step]), i);
                value = both ? 1.0 : 0.0;
              } else {
                throw ConfigError("unknown team-inference variant: " + variant);
              }
              part.records.push_back({sc.name, step, "team_prob", pair_key(i, j), variant, value});
            }
          }
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("scenario '" + sc.name + "': " + e.what());
    }
    return part;
  };

  ResultTable out;
  for (auto& part : detail::map_scenarios(scenarios, cfg.jobs, run_one))
    out.records.insert(out.records.end(), part.records.begin(), part.records.end());
  out.sort();
  return out;
}

/// Experiment 2: at each elicitation step t, each hunter's predicted
/// next-action distribution given the trace through step t-1, under
/// BMA-CTH, ML-CTH and the level-K baseline (no JP anywhere).
inline ResultTable run_action_prediction(
    const std::vector<Scenario>& scenarios, const ExperimentConfig& cfg,
    const std::vector<std::string>& variants = {"bma", "ml", "levelk"}) {
  auto run_one = [&](const Scenario& sc) {
    ResultTable part;
    try {
      auto game = sc.make_game();
      const int n = game->n_agents();
      PlannerConfig pc = cfg.planner;
      pc.seed = mix_seed(cfg.planner.seed, std::hash<std::string>{}(sc.name));
      std::mt19937_64 rng(mix_seed(pc.seed, 0x7261636bULL));
      auto trace = replay(*game, sc, rng);

      std::vector<HypothesisSet> cth_sets, lk_sets;
      for (AgentId i = 0; i < n; ++i) {
        cth_sets.push_back(enumerate_depth1(n, i, cfg.include_base, cfg.leaf_kind));
        lk_sets.push_back(enumerate_levelk(n, i, cfg.levelk_max, cfg.leaf_kind));
      }
      InferenceEngine cth_engine(game, cth_sets, cfg.beta_action, pc,
                                 detail::priors_for(cfg, n, cth_sets[0].size()));
      PlannerConfig lk_pc = pc;
      lk_pc.seed = mix_seed(pc.seed, 0x6c6576656cULL);
      InferenceEngine lk_engine(game, lk_sets, cfg.beta_action, lk_pc);

      bool need_cth = false, need_lk = false;
      for (const auto& v : variants) (v == "levelk" ? need_lk : need_cth) = true;
      auto cth_post = need_cth ? cth_engine.infer_trace(trace)
                               : std::vector<std::vector<Posterior>>{};
      auto lk_post = need_lk ? lk_engine.infer_trace(trace)
                             : std::vector<std::vector<Posterior>>{};

      for (int step : effective_steps(cfg, static_cast<int>(sc.trajectory.size()))) {
        const StateId s = trace.states.at(step - 1);
        for (AgentId i = 0; i < n; ++i) {
          for (const auto& variant : variants) {
            ActionDist dist;
            if (variant == "bma") {
              dist = cth_engine.predict(i, cth_post[i][step - 1], s, PredictionMode::Bma);
            } else if (variant == "ml") {
              dist = cth_engine.predict(i, cth_post[i][step - 1], s, PredictionMode::MaxLikelihood);
            } else if (variant == "levelk") {
              dist = lk_engine.predict(i, lk_post[i][step - 1], s, PredictionMode::Bma);
            } else {
              throw ConfigError("unknown action-prediction variant: " + variant);
            }
            for (const auto& [a, p] : dist) {
              std::string key = agent_name(i) + ":" + staghunt::move_name(static_cast<Move>(a));
              part.records.push_back({sc.name, step, "action_prob", key, variant, p});
            }
          }
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("scenario '" + sc.name + "': " + e.what());
    }
    return part;
  };

  ResultTable out;
  for (auto& part : detail::map_scenarios(scenarios, cfg.jobs, run_one))
    out.records.insert(out.records.end(), part.records.begin(), part.records.end());
  out.sort();
  return out;
}

struct MetricsEntry {
  std::string experiment;  // team_prob | action_prob
  std::string variant;
  std::string scenario;    // "ALL" for the pooled entry
  std::optional<double> r;
  double rmse_value = 0.0;
  int n = 0;
};

struct MetricsReport {
  std::vector<MetricsEntry> entries;
};

/// Pearson R and RMSE of model values against scenario reference blocks,
/// pooled per (experiment, variant) with a per-scenario breakdown.
/// Records without a matching reference entry raise; zero variance is
/// reported as an undefined R, not an error.
inline MetricsReport evaluate(const ResultTable& results, const std::vector<Scenario>& scenarios) {
  std::map<std::string, const Scenario*> by_name;
  for (const auto& sc : scenarios) by_name[sc.name] = &sc;

  auto lookup = [&](const ResultRecord& rec) -> std::optional<double> {
    auto it = by_name.find(rec.scenario);
    if (it == by_name.end()) throw ValidationError("no scenario loaded for result '" + rec.scenario + "'");
    const ReferenceBlock& ref = it->second->reference;
    if (rec.kind == "team_prob") {
      auto sit = ref.team.find(rec.step);
      if (sit == ref.team.end()) return std::nullopt;
      auto pit = sit->second.find(rec.key);
      return pit == sit->second.end() ? std::nullopt : std::optional<double>(pit->second);
    }
    auto sit = ref.actions.find(rec.step);
    if (sit == ref.actions.end()) return std::nullopt;
    auto colon = rec.key.find(':');
    auto ait = sit->second.find(rec.key.substr(0, colon));
    if (ait == sit->second.end()) return std::nullopt;
    auto mit = ait->second.find(rec.key.substr(colon + 1));
    // absent moves in a reference distribution mean probability zero
    return mit == ait->second.end() ? 0.0 : mit->second;
  };

  struct Pooled {
    std::vector<double> model, ref;
  };
  std::map<std::tuple<std::string, std::string, std::string>, Pooled> groups;
  std::vector<std::string> missing;
  for (const auto& rec : results.records) {
    auto v = lookup(rec);
    if (!v) {
      missing.push_back(rec.scenario + "/step " + std::to_string(rec.step) + "/" + rec.key);
      continue;
    }
    auto add = [&](const std::string& scope) {
      auto& g = groups[{rec.kind, rec.variant, scope}];
      g.model.push_back(rec.value);
      g.ref.push_back(*v);
    };
    add("ALL");
    add(rec.scenario);
  }
  if (!missing.empty()) {
    std::string msg = "missing reference entries (" + std::to_string(missing.size()) + "):";
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i)
      msg += " " + missing[i] + ";";
    throw ValidationError(msg);
  }

  MetricsReport report;
  for (const auto& [key, g] : groups) {
    MetricsEntry e;
    std::tie(e.experiment, e.variant, e.scenario) = key;
    e.n = static_cast<int>(g.model.size());
    e.r = g.model.size() >= 2 ? pearson(g.model, g.ref) : std::nullopt;
    e.rmse_value = rmse(g.model, g.ref);
    report.entries.push_back(std::move(e));
  }
  return report;
}

inline void write_metrics(const MetricsReport& report, std::ostream& out) {
  out << "experiment\tvariant\tscenario\tn\tR\tRMSE\n";
  for (const auto& e : report.entries) {
    out << e.experiment << "\t" << e.variant << "\t" << e.scenario << "\t" << e.n << "\t";
    if (e.r)
      out << format_value(*e.r);
    else
      out << "undefined (zero variance)";
    out << "\t" << format_value(e.rmse_value) << "\n";
  }
}

/// One delimited time-series file per scenario: step, key, variant, value.
inline std::vector<std::string> emit_plot_data(const ResultTable& results,
                                               const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::map<std::string, std::vector<const ResultRecord*>> by_scenario;
  for (const auto& rec : results.records) by_scenario[rec.scenario].push_back(&rec);
  std::vector<std::string> written;
  for (const auto& [name, recs] : by_scenario) {
    const std::string path = (fs::path(out_dir) / (name + ".tsv")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write plot file: " + path);
    out << "step\tkind\tkey\tvariant\tvalue\n";
    for (const auto* r : recs)
      out << r->step << "\t" << r->kind << "\t" << r->key << "\t" << r->variant << "\t"
          << format_value(r->value) << "\n";
    written.push_back(path);
  }
  return written;
}

}  // namespace cth::harness
