// sej: batch pipeline and session server.
//
//   sej ingest   --judgments J [--outcomes O] [--questions Q] [--out DIR]
//   sej analyze  --judgments J [--outcomes O] [--questions Q] --out DIR [scoring flags]
//   sej simulate [--config sim.json] [--seed N] --out DIR
//   sej surface  --sigma2 S [--step H] [--out FILE]
//   sej serve    --questions Q [--outcomes O] --data-dir DIR [--port P] [--facilitator-token T]
//
// Exit codes: 0 success, 2 validation failure, 3 runtime or convergence failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sej/analysis.hpp"
#include "sej/csv.hpp"
#include "sej/dataset.hpp"
#include "sej/error.hpp"
#include "sej/http_service.hpp"
#include "sej/recomposition.hpp"
#include "sej/session.hpp"
#include "sej/simulate.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct InputFlags {
  std::string judgments;
  std::string outcomes;
  std::string questions;

  void add(CLI::App* cmd, bool judgments_required) {
    auto* j = cmd->add_option("--judgments", judgments, "judgments CSV");
    if (judgments_required) j->required();
    cmd->add_option("--outcomes", outcomes, "outcomes CSV");
    cmd->add_option("--questions", questions, "questions CSV");
  }

  sej::Dataset load() const {
    auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
    return sej::ingest(judgments, opt(outcomes), opt(questions));
  }
};

struct ScoringFlags {
  std::vector<std::string> rules;
  std::optional<double> sigma2;
  std::string sigma_map;
  std::optional<int> mc_samples;
  std::optional<std::uint64_t> seed;
  std::string tie_policy;
  std::string pool_path;
  std::string config;
  unsigned threads = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--rule", rules, "recomposition rules to score (EUM, ARA, ARU, MNL); default all");
    cmd->add_option("--sigma2", sigma2, "fixed ARA sigma^2 instead of the knowledge map");
    cmd->add_option("--sigma-map", sigma_map, "JSON file mapping knowledge levels 1..5 to sigma^2");
    cmd->add_option("--mc-samples", mc_samples, "Monte Carlo draws per record");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--tie-policy", tie_policy, "consistent|separate");
    cmd->add_option("--pool-path", pool_path, "midpoint|mc");
    cmd->add_option("--config", config, "JSON config; flags override its values");
    cmd->add_option("--threads", threads, "scoring threads (0 = all cores)");
  }

  sej::AnalysisConfig build() const {
    sej::AnalysisConfig cfg;
    nlohmann::json file = nlohmann::json::object();
    if (!config.empty()) file = nlohmann::json::parse(sej::read_file(config));

    std::vector<std::string> rule_names = rules;
    if (rule_names.empty() && file.contains("rules")) rule_names = file.at("rules").get<std::vector<std::string>>();
    if (!rule_names.empty()) {
      cfg.scoring.rules.clear();
      for (const auto& r : rule_names) {
        auto tag = sej::parse_rule(r);
        if (!tag) throw sej::ValidationError("unknown rule " + r);
        cfg.scoring.rules.push_back(*tag);
      }
    }
    if (sigma2) cfg.scoring.sigma2_override = *sigma2;
    else if (file.contains("sigma2")) cfg.scoring.sigma2_override = file.at("sigma2").get<double>();
    if (cfg.scoring.sigma2_override && !(*cfg.scoring.sigma2_override > 0.0)) {
      throw sej::ValidationError("--sigma2 must be positive");
    }
    if (!sigma_map.empty()) cfg.scoring.sigma_map = sej::SigmaMap::load(sigma_map);
    else if (file.contains("sigma_map")) cfg.scoring.sigma_map = sej::SigmaMap::from_json(file.at("sigma_map"));

    if (mc_samples) cfg.scoring.n_mc = *mc_samples;
    else if (file.contains("mc_samples")) cfg.scoring.n_mc = file.at("mc_samples").get<int>();
    if (cfg.scoring.n_mc < 1) throw sej::ValidationError("--mc-samples must be at least 1");
    if (seed) cfg.scoring.seed = *seed;
    else if (file.contains("seed")) cfg.scoring.seed = file.at("seed").get<std::uint64_t>();
    cfg.pool.seed = cfg.scoring.seed;
    cfg.pool.n_mc = cfg.scoring.n_mc;

    std::string tie = tie_policy.empty() ? file.value("tie_policy", std::string{}) : tie_policy;
    if (!tie.empty()) {
      auto p = sej::parse_tie_policy(tie);
      if (!p) throw sej::ValidationError("--tie-policy must be consistent or separate");
      cfg.tie_policy = *p;
    }
    std::string path = pool_path.empty() ? file.value("pool_path", std::string{}) : pool_path;
    if (path == "mc") cfg.pool.path = sej::PoolPath::MonteCarlo;
    else if (!path.empty() && path != "midpoint") throw sej::ValidationError("--pool-path must be midpoint or mc");
    if (file.contains("credible_level")) cfg.credible_level = file.at("credible_level").get<double>();
    cfg.threads = threads;
    return cfg;
  }
};

sej::SimulationConfig default_simulation() {
  sej::SimulationConfig cfg;
  cfg.questions = {
      {"Q1", "Will the adversary act on target 1?", sej::Domain::Politics, 0.3, 0.7},
      {"Q2", "Will the adversary act on target 2?", sej::Domain::Products, 0.6, 0.4},
      {"Q3", "Will the adversary act on target 3?", sej::Domain::Sports, 0.45, 0.55},
  };
  return cfg;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Structured expert judgment: decomposition, recomposition and scoring"};
  app.require_subcommand(1);

  InputFlags ingest_in;
  std::string ingest_out;
  auto* ingest_cmd = app.add_subcommand("ingest", "validate a dataset and print a summary");
  ingest_in.add(ingest_cmd, true);
  ingest_cmd->add_option("--out", ingest_out, "write the normalised dataset to this directory");

  InputFlags analyze_in;
  ScoringFlags analyze_flags;
  std::string analyze_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "run consistency, scoring, inference and aggregation");
  analyze_in.add(analyze_cmd, true);
  analyze_flags.add(analyze_cmd);
  analyze_cmd->add_option("--out", analyze_out, "base output directory")->required();

  std::string sim_config;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  std::vector<std::string> sim_rule;
  std::optional<double> sim_sigma2;
  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim_cmd->add_option("--config", sim_config, "simulation JSON config");
  sim_cmd->add_option("--seed", sim_seed, "simulation seed");
  sim_cmd->add_option("--rule", sim_rule, "adversary decision rule")->expected(1);
  sim_cmd->add_option("--sigma2", sim_sigma2, "sigma^2 for an ARA adversary");
  sim_cmd->add_option("--out", sim_out, "output directory")->required();

  std::vector<double> surf_sigma2;
  double surf_step = 0.01;
  std::string surf_out;
  std::string surf_map;
  auto* surf_cmd = app.add_subcommand("surface", "ARA recomposition grid over (pB, pC)");
  surf_cmd->add_option("--sigma2", surf_sigma2, "one or more sigma^2 values");
  surf_cmd->add_option("--sigma-map", surf_map, "emit one grid per knowledge level of this map");
  surf_cmd->add_option("--step", surf_step, "grid step")->check(CLI::Range(1e-4, 1.0));
  surf_cmd->add_option("--out", surf_out, "output file (single sigma^2) or directory");

  std::string serve_questions;
  std::string serve_outcomes;
  std::string serve_data = "sej-data";
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::string serve_token;
  std::string serve_map;
  auto* serve_cmd = app.add_subcommand("serve", "run the elicitation session service");
  serve_cmd->add_option("--questions", serve_questions, "questions CSV")->required();
  serve_cmd->add_option("--outcomes", serve_outcomes, "outcomes CSV already known");
  serve_cmd->add_option("--data-dir", serve_data, "event log directory");
  serve_cmd->add_option("--host", serve_host, "bind address");
  serve_cmd->add_option("--port", serve_port, "listen port");
  serve_cmd->add_option("--facilitator-token", serve_token, "service facilitator token (random if absent)");
  serve_cmd->add_option("--sigma-map", serve_map, "sigma^2 map for facilitator recompositions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*ingest_cmd) {
    const auto ds = ingest_in.load();
    nlohmann::json summary = {{"questions", ds.questions.size()},
                              {"judgment_sets", ds.sets.size()},
                              {"outcomes", ds.outcomes().size()},
                              {"content_hash", sej::hex64(ds.content_hash())}};
    for (const auto& f : ds.provenance.files) {
      summary["files"].push_back({{"role", f.role}, {"path", f.path}, {"fnv1a64", f.fnv1a64}});
    }
    if (!ingest_out.empty()) sej::export_dataset(ds, ingest_out);
    std::cout << summary.dump(2) << "\n";
    return 0;
  }

  if (*analyze_cmd) {
    const auto cfg = analyze_flags.build();
    const auto ds = analyze_in.load();
    const auto result = sej::analyze(ds, cfg, analyze_out);
    for (const auto& w : result.manifest.value("warnings", nlohmann::json::array())) {
      std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
    std::cout << result.run_dir << "\n";
    return 0;
  }

  if (*sim_cmd) {
    auto cfg = sim_config.empty() ? default_simulation()
                                  : sej::SimulationConfig::from_json(nlohmann::json::parse(sej::read_file(sim_config)));
    if (sim_seed) cfg.seed = *sim_seed;
    if (!sim_rule.empty()) {
      auto tag = sej::parse_rule(sim_rule.front());
      if (!tag) throw sej::ValidationError("unknown rule " + sim_rule.front());
      cfg.adversary_rule = sej::RecompositionRule::make(
          *tag, *tag == sej::RuleTag::ARA ? std::optional<double>(sim_sigma2.value_or(1.0)) : std::nullopt);
    } else if (sim_sigma2) {
      cfg.adversary_rule = sej::RecompositionRule::ara(*sim_sigma2);
    }
    const auto ds = sej::simulate(cfg);
    sej::export_dataset(ds, sim_out);
    sej::write_file((std::filesystem::path(sim_out) / "simulation.json").string(), cfg.to_json().dump(2) + "\n");
    std::cout << sim_out << "\n";
    return 0;
  }

  if (*surf_cmd) {
    std::vector<std::pair<std::string, double>> grids;
    for (double s : surf_sigma2) grids.emplace_back(sej::fixed6(s), s);
    if (!surf_map.empty()) {
      const auto map = sej::SigmaMap::load(surf_map);
      for (int level = 1; level <= 5; ++level) grids.emplace_back("k" + std::to_string(level), map.at(level));
    }
    if (grids.empty()) throw sej::ValidationError("surface needs --sigma2 or --sigma-map");
    for (const auto& [label, s] : grids) {
      if (!(s > 0.0)) throw sej::ValidationError("sigma^2 must be positive");
    }
    if (grids.size() == 1 && surf_map.empty()) {
      const auto csv = sej::surface_csv(sej::ara_surface(grids.front().second, surf_step));
      if (surf_out.empty()) std::cout << csv;
      else sej::write_file(surf_out, csv);
      return 0;
    }
    if (surf_out.empty()) throw sej::ValidationError("several grids need --out <dir>");
    std::filesystem::create_directories(surf_out);
    for (const auto& [label, s] : grids) {
      const auto path = std::filesystem::path(surf_out) / ("surface_" + label + ".csv");
      sej::write_file(path.string(), sej::surface_csv(sej::ara_surface(s, surf_step)));
      std::cout << path.string() << "\n";
    }
    return 0;
  }

  if (*serve_cmd) {
    sej::ServiceConfig cfg;
    cfg.data_dir = serve_data;
    cfg.questions = sej::parse_questions_csv(sej::read_file(serve_questions));
    if (!serve_outcomes.empty()) {
      for (const auto& [id, o] : sej::parse_outcomes_csv(sej::read_file(serve_outcomes))) {
        auto it = std::find_if(cfg.questions.begin(), cfg.questions.end(),
                               [&id = id](const sej::Question& q) { return q.question_id() == id; });
        if (it == cfg.questions.end()) throw sej::ValidationError("outcome for unknown question " + id);
        it->record_outcome(o);
      }
    }
    cfg.facilitator_token = serve_token;
    if (!serve_map.empty()) cfg.sigma_map = sej::SigmaMap::load(serve_map);
    sej::SessionService service(std::move(cfg));
    std::cerr << "listening on " << serve_host << ":" << serve_port << "\n";
    if (serve_token.empty()) std::cerr << "facilitator token: " << service.facilitator_token() << "\n";
    if (!sej::serve(service, serve_host, serve_port)) {
      std::cerr << "error: cannot listen on " << serve_host << ":" << serve_port << "\n";
      return kExitRuntime;
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const sej::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const sej::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
