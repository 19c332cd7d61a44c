#include "sej/analysis.hpp"

#include <filesystem>
#include <set>

#include "sej/csv.hpp"
#include "sej/error.hpp"
#include "sej/inference.hpp"
#include "sej/rng.hpp"

namespace sej {

namespace fs = std::filesystem;

nlohmann::json AnalysisConfig::to_json() const {
  nlohmann::json rules = nlohmann::json::array();
  for (RuleTag t : scoring.rules) rules.push_back(std::string(rule_name(t)));
  nlohmann::json tier_map = nlohmann::json::object();
  for (int level = 1; level <= 5; ++level) tier_map[std::to_string(level)] = tiers.tier(level);
  return {
      {"rules", rules},
      {"sigma_map", scoring.sigma_map.to_json()},
      {"sigma2_override", scoring.sigma2_override ? nlohmann::json(*scoring.sigma2_override) : nlohmann::json(nullptr)},
      {"ara_divisor", scoring.ara_scale == AraScale::Variance ? "sigma2" : "sigma"},
      {"mc_samples", scoring.n_mc},
      {"seed", scoring.seed},
      {"interval_mass", scoring.fit.interval_mass},
      {"fit_tol", scoring.fit.tol},
      {"fit_max_iterations", scoring.fit.max_iterations},
      {"tie_policy", std::string(tie_policy_name(tie_policy))},
      {"knowledge_tiers", tier_map},
      {"cdf_grid_step", cdf_grid_step},
      {"credible_level", credible_level},
      {"pool_path", pool.path == PoolPath::Midpoint ? "midpoint" : "monte-carlo"},
      {"pool_mc_samples", pool.n_mc},
      {"pool_seed", pool.seed},
  };
}

std::string run_name(const Dataset& ds, const AnalysisConfig& config) {
  const auto h = fnv1a64(config.to_json().dump(), ds.content_hash());
  return "run-" + hex64(h);
}

namespace {

class RunWriter {
 public:
  explicit RunWriter(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& stage, const std::string& content) {
    write_file((dir_ / name).string(), content);
    files_.push_back({{"file", name}, {"stage", stage}, {"fnv1a64", hex64(fnv1a64(content))}});
  }
  void write_json(const std::string& name, const std::string& stage, const nlohmann::json& j) {
    write(name, stage, j.dump(2) + "\n");
  }
  const nlohmann::json& files() const { return files_; }

 private:
  fs::path dir_;
  nlohmann::json files_ = nlohmann::json::array();
};

std::string safe_name(const std::string& id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace

AnalysisResult analyze(const Dataset& ds, const AnalysisConfig& config, const std::string& out_base) {
  ds.validate();
  const fs::path run_dir = fs::path(out_base) / run_name(ds, config);
  if (fs::exists(run_dir)) {
    throw ConflictError("run directory " + run_dir.string() + " already exists; refusing to overwrite");
  }
  fs::create_directories(run_dir);
  RunWriter out(run_dir);
  nlohmann::json warnings = nlohmann::json::array();
  nlohmann::json stages = nlohmann::json::array();

  // Consistency -----------------------------------------------------------
  {
    nlohmann::json report = {
        {"initial", quadrant_table(ds.sets, false).to_json()},
        {"revised", quadrant_table(ds.sets, true).to_json()},
        {"revision", revision_analysis(ds.sets).to_json()},
        {"tie_policy", std::string(tie_policy_name(config.tie_policy))},
        {"path", "midpoint"},
    };
    try {
      const auto hist = inconsistency_histogram(ds.sets);
      report["histogram"] = hist.to_json();
      out.write("table2.csv", "consistency", hist.to_csv());
    } catch (const ValidationError& e) {
      report["histogram"] = nullptr;
      warnings.push_back(std::string("consistency: ") + e.what());
    }
    out.write_json("consistency.json", "consistency", report);
    out.write("table1_initial.csv", "consistency", quadrant_table(ds.sets, false).to_csv());
    out.write("table1_revised.csv", "consistency", quadrant_table(ds.sets, true).to_csv());
    out.write("scatter_initial.csv", "consistency", scatter_csv(ds.sets, false));
    out.write("scatter_revised.csv", "consistency", scatter_csv(ds.sets, true));
    stages.push_back("consistency");
  }

  const auto outcomes = ds.outcomes();
  std::set<std::string> unresolved;
  for (const auto& q : ds.questions) {
    if (!q.outcome()) unresolved.insert(q.question_id());
  }

  if (outcomes.empty()) {
    warnings.push_back("no outcomes recorded; scoring, inference and aggregation skipped");
  } else {
    if (!unresolved.empty()) {
      std::string list;
      for (const auto& id : unresolved) list += (list.empty() ? "" : ", ") + id;
      warnings.push_back("scoring restricted to resolved questions; unresolved: " + list);
    }
    std::vector<JudgmentSet> resolved_sets;
    for (const auto& js : ds.sets) {
      if (outcomes.count(js.question_id)) resolved_sets.push_back(js);
    }

    // Scoring -------------------------------------------------------------
    BetaFitCache cache;
    const auto records = score_all(resolved_sets, outcomes, config.scoring, cache, config.threads);
    out.write("scores.csv", "scoring", scores_csv(records));

    std::string recompositions = "participant_id,question_id,rule,sigma2,estimate,path\n";
    for (const auto& js : resolved_sets) {
      for (RuleTag tag : config.scoring.rules) {
        const auto rule = resolve_rule(tag, *js.knowledge, config.scoring);
        recompositions += csv_field(js.participant_id) + "," + csv_field(js.question_id) + "," +
                          std::string(rule_name(tag)) + "," + (rule.sigma2() ? fixed6(*rule.sigma2()) : "") + "," +
                          fixed6(rule.apply(midpoint(*js.pB).value(), midpoint(*js.pC).value())) + ",midpoint\n";
      }
    }
    out.write("recompositions.csv", "scoring", recompositions);

    nlohmann::json fits = nlohmann::json::array();
    for (int s = 0; s <= 100; s += 10) {
      const auto interval = IntervalResponse::from_selection(s);
      const auto m = cache.get(interval, config.scoring.fit);
      fits.push_back({{"selection", s},
                      {"interval_lo", interval.lo().value()},
                      {"interval_hi", interval.hi().value()},
                      {"alpha", m.alpha()},
                      {"beta", m.beta()}});
    }
    out.write_json("beta_fits.json", "scoring", {{"interval_mass", config.scoring.fit.interval_mass}, {"fits", fits}});

    nlohmann::json cdf_index = nlohmann::json::object();
    const auto by_tier = cdf_by_group(records, CdfGroupBy::KnowledgeTier, config.tiers);
    for (const auto& [tier, cdfs] : by_tier.groups) {
      const auto name = "cdf_knowledge_" + safe_name(tier) + ".csv";
      out.write(name, "scoring", cdf_csv(cdfs, config.cdf_grid_step));
      cdf_index["knowledge"][tier] = name;
    }
    for (const auto& n : by_tier.notices) warnings.push_back("scoring: " + n);
    std::vector<std::string> resolved_ids;
    for (const auto& [id, o] : outcomes) resolved_ids.push_back(id);
    const auto by_question = cdf_by_group(records, CdfGroupBy::Question, config.tiers, resolved_ids);
    for (const auto& [question, cdfs] : by_question.groups) {
      const auto name = "cdf_question_" + safe_name(question) + ".csv";
      out.write(name, "scoring", cdf_csv(cdfs, config.cdf_grid_step));
      cdf_index["question"][question] = name;
    }
    for (const auto& n : by_question.notices) warnings.push_back("scoring: " + n);
    stages.push_back("scoring");

    // Inference -----------------------------------------------------------
    std::vector<PairedDiffResult> intervals;
    nlohmann::json inference = nlohmann::json::array();
    auto attempt = [&](const std::string& label, auto compute) {
      try {
        auto r = compute();
        inference.push_back(r.to_json());
        intervals.push_back(std::move(r));
      } catch (const DegenerateError& e) {
        inference.push_back({{"comparison", label}, {"error", e.what()}});
      }
    };
    for (RuleTag tag : config.scoring.rules) {
      const auto label = std::string("direct-pA - ") + std::string(rule_name(tag));
      attempt(label, [&] {
        return compare_kinds(records, ForecastKind::DirectA, kind_for(tag), config.credible_level);
      });
    }
    for (std::size_t i = 0; i < config.scoring.rules.size(); ++i) {
      for (std::size_t j = i + 1; j < config.scoring.rules.size(); ++j) {
        const auto a = kind_for(config.scoring.rules[i]);
        const auto b = kind_for(config.scoring.rules[j]);
        attempt(std::string(kind_name(a)) + " - " + std::string(kind_name(b)),
                [&] { return compare_kinds(records, a, b, config.credible_level); });
      }
    }
    nlohmann::json reflection = nullptr;
    try {
      if (auto r = reflection_effect(records, config.credible_level)) {
        reflection = r->to_json();
        intervals.push_back(*r);
      }
    } catch (const DegenerateError& e) {
      reflection = {{"error", e.what()}};
    }
    out.write_json("inference.json", "inference",
                   {{"model", "normal likelihood, Jeffreys prior; Student-t posterior for the mean difference"},
                    {"score_source", "monte-carlo mean per record"},
                    {"comparisons", inference},
                    {"reflection_effect", reflection}});
    out.write("intervals.csv", "inference", intervals_csv(intervals));
    stages.push_back("inference");

    // Aggregation ---------------------------------------------------------
    const auto selected = select_coherent(resolved_sets, config.tie_policy);
    nlohmann::json pools = nlohmann::json::array();
    if (selected.empty()) {
      warnings.push_back("aggregation: no coherent participants; relax the tie policy");
    } else {
      for (RuleTag tag : config.scoring.rules) {
        pools.push_back(pool(resolved_sets, selected, tag, config.scoring, outcomes, config.pool, &cache).to_json());
      }
    }
    out.write_json("aggregation.json", "aggregation",
                   {{"selected_participants", selected},
                    {"n_selected", selected.size()},
                    {"tie_policy", std::string(tie_policy_name(config.tie_policy))},
                    {"path", config.pool.path == PoolPath::Midpoint ? "midpoint" : "monte-carlo"},
                    {"pools", pools}});
    stages.push_back("aggregation");
  }

  nlohmann::json provenance = nlohmann::json::array();
  for (const auto& f : ds.provenance.files) {
    provenance.push_back({{"role", f.role}, {"path", f.path}, {"fnv1a64", f.fnv1a64}});
  }
  nlohmann::json manifest = {
      {"run", run_dir.filename().string()},
      {"stages", stages},
      {"files", out.files()},
      {"config", config.to_json()},
      {"seeds",
       {{"base", config.scoring.seed},
        {"pool", config.pool.seed},
        {"record_seed", "splitmix64(splitmix64(base) ^ fnv1a64(participant 0x1f question 0x1f kind))"}}},
      {"rng_algorithm", std::string(kRngAlgorithm)},
      {"dataset",
       {{"content_fnv1a64", hex64(ds.content_hash())},
        {"sources", provenance},
        {"judgment_sets", ds.sets.size()},
        {"questions", ds.questions.size()},
        {"resolved_questions", outcomes.size()}}},
      {"warnings", warnings},
  };
  write_file((run_dir / "manifest.json").string(), manifest.dump(2) + "\n");
  return {run_dir.string(), manifest};
}

}  // namespace sej
