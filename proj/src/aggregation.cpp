#include "sej/aggregation.hpp"

#include <algorithm>
#include <set>

#include "sej/error.hpp"

namespace sej {

std::vector<std::string> select_coherent(const std::vector<JudgmentSet>& sets, TiePolicy policy) {
  std::map<std::string, bool> coherent;
  for (const auto& js : sets) {
    const bool ok = classify(js, false).counts_as_consistent(policy);
    auto [it, inserted] = coherent.try_emplace(js.participant_id, ok);
    if (!inserted) it->second = it->second && ok;
  }
  std::vector<std::string> out;
  for (const auto& [participant, ok] : coherent) {
    if (ok) out.push_back(participant);
  }
  return out;
}

nlohmann::json PoolResult::to_json() const {
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : forecasts) {
    fs.push_back({{"question_id", f.question_id},
                  {"rule", rule_name(f.rule)},
                  {"estimate", f.estimate.value()},
                  {"n_contributors", f.n_contributors}});
  }
  return {{"rule", rule_name(rule)},
          {"forecasts", fs},
          {"aggregate_brier", aggregate_brier ? nlohmann::json(*aggregate_brier) : nlohmann::json(nullptr)},
          {"questions_scored", questions_scored}};
}

PoolResult pool(const std::vector<JudgmentSet>& sets, const std::vector<std::string>& selected,
                RuleTag rule, const ScoringConfig& config, const std::map<std::string, int>& outcomes,
                const PoolOptions& options, BetaFitCache* cache) {
  if (selected.empty()) {
    throw ValidationError(
        "no coherent participants selected; relax the tie policy (--tie-policy consistent)");
  }
  const std::set<std::string> chosen(selected.begin(), selected.end());
  BetaFitCache local_cache;
  BetaFitCache& fits = cache ? *cache : local_cache;

  // question -> participant -> estimate; std::map keeps contributor order fixed.
  std::map<std::string, std::map<std::string, double>> estimates;
  for (const auto& js : sets) {
    if (!chosen.count(js.participant_id)) continue;
    js.require_complete();
    const auto resolved = resolve_rule(rule, *js.knowledge, config);
    double estimate;
    if (options.path == PoolPath::Midpoint) {
      estimate = resolved.apply(midpoint(*js.pB).value(), midpoint(*js.pC).value());
    } else {
      const auto draws = recompose_mc(fits.get(*js.pB, config.fit), fits.get(*js.pC, config.fit), resolved,
                                      options.n_mc,
                                      record_seed(options.seed, js.participant_id, js.question_id, kind_for(rule)));
      double sum = 0.0;
      for (double d : draws) sum += d;
      estimate = sum / static_cast<double>(draws.size());
    }
    estimates[js.question_id][js.participant_id] = estimate;
  }

  PoolResult result{rule, {}, std::nullopt, 0};
  double brier_sum = 0.0;
  for (const auto& [question, contributions] : estimates) {
    double sum = 0.0;
    for (const auto& [participant, e] : contributions) sum += e;
    const auto n = static_cast<int>(contributions.size());
    // Clamp guards the last-ulp overshoot of a mean of values in [0,1].
    const double mean = std::clamp(sum / n, 0.0, 1.0);
    result.forecasts.push_back({question, rule, Probability(mean), n});
    if (auto it = outcomes.find(question); it != outcomes.end()) {
      brier_sum += brier(mean, it->second);
      ++result.questions_scored;
    }
  }
  if (result.questions_scored > 0) result.aggregate_brier = brier_sum / result.questions_scored;
  return result;
}

}  // namespace sej
