#pragma once

// Brier scoring of direct and recomposed forecasts, with Monte Carlo
// propagation of the interval imprecision and empirical CDF summaries.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sej/imprecision.hpp"
#include "sej/judgment.hpp"
#include "sej/recomposition.hpp"

namespace sej {

enum class ForecastKind { DirectA, DirectD, EUM, ARA, ARU, MNL };

inline constexpr std::array<ForecastKind, 6> kAllKinds{ForecastKind::DirectA, ForecastKind::DirectD,
                                                      ForecastKind::EUM,     ForecastKind::ARA,
                                                      ForecastKind::ARU,     ForecastKind::MNL};

std::string_view kind_name(ForecastKind kind);
std::optional<ForecastKind> parse_kind(std::string_view text);
ForecastKind kind_for(RuleTag tag);

double brier(double forecast, int outcome);

struct ScoreRecord {
  std::string participant_id;
  std::string question_id;
  ForecastKind kind;
  int knowledge = 0;
  double point_forecast = 0.0;  // midpoint-path forecast
  double point_score = 0.0;     // brier(point_forecast, outcome)
  std::vector<double> scores;   // one Brier score per Monte Carlo draw
  std::uint64_t seed = 0;

  double mc_mean() const;
  double mc_sd() const;  // sample standard deviation; 0 for fewer than two draws
};

struct ScoringConfig {
  std::vector<RuleTag> rules{kAllRules.begin(), kAllRules.end()};
  SigmaMap sigma_map;
  std::optional<double> sigma2_override;  // fixed ARA sigma2 instead of the knowledge map
  AraScale ara_scale = AraScale::Variance;
  int n_mc = 10000;
  std::uint64_t seed = 20190401;
  FitOptions fit;
};

// The rule fully specified for one judgment set (ARA picks up sigma2).
RecompositionRule resolve_rule(RuleTag tag, const KnowledgeLevel& knowledge, const ScoringConfig& config);

// Stream seed for one record: derive_seed(base, participant \x1f question \x1f kind).
std::uint64_t record_seed(std::uint64_t base, std::string_view participant,
                          std::string_view question, ForecastKind kind);

// One record per direct kind and per configured rule.
std::vector<ScoreRecord> score_set(const JudgmentSet& js, std::optional<int> outcome,
                                   const ScoringConfig& config, BetaFitCache& cache);

// Scores every set whose question has an outcome; parallel over sets, merged
// in input order.
std::vector<ScoreRecord> score_all(const std::vector<JudgmentSet>& sets,
                                   const std::map<std::string, int>& outcomes,
                                   const ScoringConfig& config, BetaFitCache& cache,
                                   unsigned threads = 0);

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);

  // Fraction of values <= x.
  double operator()(double x) const;
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

  struct Step {
    double x;
    double F;
  };
  // Jump points: each distinct value with F at that value.
  std::vector<Step> steps() const;
  // F on the grid 0, step, ..., 1.
  std::vector<Step> on_grid(double step) const;

 private:
  std::vector<double> sorted_;
};

enum class CdfGroupBy { KnowledgeTier, Question };

struct KnowledgeTiers {
  std::array<std::string, 5> tier_of_level{"low", "low", "medium", "high", "high"};
  std::vector<std::string> order{"low", "medium", "high"};
  const std::string& tier(int level) const { return tier_of_level[static_cast<std::size_t>(level - 1)]; }
};

struct GroupedCdfs {
  std::map<std::string, std::map<ForecastKind, EmpiricalCdf>> groups;
  std::vector<std::string> notices;  // groups omitted for lack of records
};

GroupedCdfs cdf_by_group(const std::vector<ScoreRecord>& records, CdfGroupBy group_by,
                         const KnowledgeTiers& tiers = {},
                         const std::vector<std::string>& expected_questions = {});

std::string scores_csv(const std::vector<ScoreRecord>& records);
std::string cdf_csv(const std::map<ForecastKind, EmpiricalCdf>& cdfs, double grid_step);

}  // namespace sej
