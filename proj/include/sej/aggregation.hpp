#pragma once

// Synthetic coherent participant: keep the participants consistent on every
// question and average their recomposed forecasts per question.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sej/consistency.hpp"
#include "sej/scoring.hpp"

namespace sej {

std::vector<std::string> select_coherent(const std::vector<JudgmentSet>& sets,
                                         TiePolicy policy = TiePolicy::Consistent);

struct PooledForecast {
  std::string question_id;
  RuleTag rule;
  Probability estimate;
  int n_contributors;
};

enum class PoolPath { Midpoint, MonteCarlo };

struct PoolOptions {
  PoolPath path = PoolPath::Midpoint;
  int n_mc = 10000;  // Monte Carlo path only
  std::uint64_t seed = 0;
};

struct PoolResult {
  RuleTag rule;
  std::vector<PooledForecast> forecasts;  // sorted by question_id
  std::optional<double> aggregate_brier;  // mean over questions with outcomes
  int questions_scored = 0;

  nlohmann::json to_json() const;
};

// Throws ValidationError when `selected` is empty.
PoolResult pool(const std::vector<JudgmentSet>& sets, const std::vector<std::string>& selected,
                RuleTag rule, const ScoringConfig& config,
                const std::map<std::string, int>& outcomes = {}, const PoolOptions& options = {},
                BetaFitCache* cache = nullptr);

}  // namespace sej
