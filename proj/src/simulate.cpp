#include "sej/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sej/consistency.hpp"
#include "sej/error.hpp"
#include "sej/rng.hpp"

namespace sej {

void SimulationConfig::validate() const {
  if (n_participants < 1) throw ValidationError("n_participants must be at least 1");
  if (questions.empty()) throw ValidationError("simulation needs at least one question");
  for (const auto& q : questions) {
    if (q.question_id.empty()) throw ValidationError("simulated question without id");
    Probability{q.u_star};
    Probability{q.pc_star};
  }
  if (!(noise_width >= 0.0 && noise_width <= 1.0)) throw ValidationError("noise_width must lie in [0,1]");
  if (!(repair_fraction >= 0.0 && repair_fraction <= 1.0)) {
    throw ValidationError("repair_fraction must lie in [0,1]");
  }
  if (knowledge) KnowledgeLevel{*knowledge};
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
  try {
    SimulationConfig cfg;
    cfg.n_participants = j.value("n_participants", cfg.n_participants);
    for (const auto& q : j.at("questions")) {
      SimulatedQuestion sq;
      sq.question_id = q.at("question_id").get<std::string>();
      sq.text = q.value("text", std::string{});
      const auto tag = q.value("domain_tag", std::string("other"));
      const auto domain = parse_domain(tag);
      if (!domain) throw ValidationError("unknown domain_tag " + tag);
      sq.domain = *domain;
      sq.u_star = q.at("u_star").get<double>();
      sq.pc_star = q.at("pc_star").get<double>();
      cfg.questions.push_back(std::move(sq));
    }
    if (j.contains("adversary_rule")) {
      const auto& r = j.at("adversary_rule");
      const auto name = r.at("tag").get<std::string>();
      const auto tag = parse_rule(name);
      if (!tag) throw ValidationError("unknown adversary rule " + name);
      std::optional<double> sigma2;
      if (r.contains("sigma2") && !r.at("sigma2").is_null()) sigma2 = r.at("sigma2").get<double>();
      cfg.adversary_rule = RecompositionRule::make(*tag, sigma2);
    }
    cfg.noise_width = j.value("noise_width", cfg.noise_width);
    const auto policy = j.value("revision", std::string("none"));
    if (policy == "none") cfg.revision = RevisionPolicy::None;
    else if (policy == "repair") cfg.revision = RevisionPolicy::Repair;
    else throw ValidationError("revision policy must be none|repair, got " + policy);
    cfg.repair_fraction = j.value("repair_fraction", cfg.repair_fraction);
    if (j.contains("knowledge") && !j.at("knowledge").is_null()) cfg.knowledge = j.at("knowledge").get<int>();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("simulation config: ") + e.what());
  }
}

nlohmann::json SimulationConfig::to_json() const {
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& q : questions) {
    qs.push_back({{"question_id", q.question_id},
                  {"text", q.text},
                  {"domain_tag", std::string(domain_name(q.domain))},
                  {"u_star", q.u_star},
                  {"pc_star", q.pc_star}});
  }
  nlohmann::json rule = {{"tag", std::string(rule_name(adversary_rule.tag()))}};
  rule["sigma2"] = adversary_rule.sigma2() ? nlohmann::json(*adversary_rule.sigma2()) : nlohmann::json(nullptr);
  return {{"n_participants", n_participants},
          {"questions", qs},
          {"adversary_rule", rule},
          {"noise_width", noise_width},
          {"revision", revision == RevisionPolicy::None ? "none" : "repair"},
          {"repair_fraction", repair_fraction},
          {"knowledge", knowledge ? nlohmann::json(*knowledge) : nlohmann::json(nullptr)},
          {"seed", seed}};
}

int snap_to_grid(double p) {
  const double clamped = std::clamp(p, 0.0, 1.0);
  return static_cast<int>(std::lround(clamped * 10.0)) * 10;
}

Dataset simulate(const SimulationConfig& config) {
  config.validate();
  Dataset ds;
  for (const auto& q : config.questions) {
    Question question(q.question_id, q.text, q.domain, 30);
    Rng outcome_rng(derive_seed(config.seed, "outcome/" + q.question_id));
    const double act = config.adversary_rule.apply(q.u_star, q.pc_star);
    question.record_outcome(outcome_rng.bernoulli(act) ? 1 : 0);
    ds.questions.push_back(std::move(question));
  }

  const int width = config.n_participants >= 1000 ? 4 : 3;
  for (int p = 1; p <= config.n_participants; ++p) {
    char id[16];
    std::snprintf(id, sizeof id, "P%0*d", width, p);
    for (const auto& q : config.questions) {
      Rng rng(derive_seed(config.seed, std::string("participant/") + id + "/" + q.question_id));
      auto noisy = [&](double truth) { return truth + (rng.uniform() - 0.5) * config.noise_width; };
      const double act = config.adversary_rule.apply(q.u_star, q.pc_star);

      JudgmentSet js{id, q.question_id, {}, {}, {}, {}, {}};
      js.pA = IntervalResponse::from_selection(snap_to_grid(noisy(act)));
      js.pB = IntervalResponse::from_selection(snap_to_grid(noisy(q.u_star)));
      js.pC = IntervalResponse::from_selection(snap_to_grid(noisy(q.pc_star)));
      js.knowledge = KnowledgeLevel(config.knowledge ? *config.knowledge : rng.uniform_int(1, 5));
      js.pD = js.pA;
      if (config.revision == RevisionPolicy::Repair) {
        const auto verdict = verdict_for(midpoint(*js.pA).value(), midpoint(*js.pB).value(),
                                         midpoint(*js.pC).value());
        if (verdict.is_inconsistent() && rng.bernoulli(config.repair_fraction)) {
          js.pD = IntervalResponse::from_selection(midpoint(*js.pC) > midpoint(*js.pB) ? 70 : 30);
        }
      }
      ds.sets.push_back(std::move(js));
    }
  }
  ds.validate();
  ds.provenance.files.push_back({"simulation", "<simulator>", hex64(fnv1a64(config.to_json().dump()))});
  return ds;
}

}  // namespace sej
