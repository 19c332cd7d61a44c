#pragma once

// Batch analysis: consistency, then (when outcomes exist) recomposition
// scoring, paired inference and coherent-participant pooling. Every output
// lands in a fresh run directory together with a manifest.

#include <string>
#include <vector>

#include "json.hpp"
#include "sej/aggregation.hpp"
#include "sej/consistency.hpp"
#include "sej/dataset.hpp"
#include "sej/scoring.hpp"

namespace sej {

struct AnalysisConfig {
  ScoringConfig scoring;
  TiePolicy tie_policy = TiePolicy::Consistent;
  KnowledgeTiers tiers;
  double cdf_grid_step = 0.001;
  double credible_level = 0.95;
  PoolOptions pool;
  unsigned threads = 0;  // 0 = hardware concurrency

  nlohmann::json to_json() const;
};

struct AnalysisResult {
  std::string run_dir;
  nlohmann::json manifest;
};

// Run directory name: run-<fnv1a64(config echo, dataset content)>.
std::string run_name(const Dataset& ds, const AnalysisConfig& config);

// Throws ConflictError when the run directory already exists.
AnalysisResult analyze(const Dataset& ds, const AnalysisConfig& config, const std::string& out_base);

}  // namespace sej
