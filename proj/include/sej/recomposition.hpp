#pragma once

// Recomposition rules mapping the elicited status-quo utility pB and
// success probability pC to a forecast of the adversary acting.
//
// The ARA rule evaluates 1 - Phi((pB - pC) / sigma2), dividing the gap by
// the variance parameter itself. AraScale::StdDev divides by sqrt(sigma2)
// instead; it is off by default.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sej/imprecision.hpp"
#include "sej/judgment.hpp"

namespace sej {

enum class RuleTag { EUM, ARA, ARU, MNL };

inline constexpr std::array<RuleTag, 4> kAllRules{RuleTag::EUM, RuleTag::ARA, RuleTag::ARU,
                                                 RuleTag::MNL};

std::string_view rule_name(RuleTag tag);
std::optional<RuleTag> parse_rule(std::string_view text);  // case-insensitive

enum class AraScale { Variance, StdDev };

class RecompositionRule {
 public:
  static RecompositionRule eum() { return RecompositionRule(RuleTag::EUM, std::nullopt); }
  static RecompositionRule aru() { return RecompositionRule(RuleTag::ARU, std::nullopt); }
  static RecompositionRule mnl() { return RecompositionRule(RuleTag::MNL, std::nullopt); }
  static RecompositionRule ara(double sigma2, AraScale scale = AraScale::Variance);
  // sigma2 must be given exactly when tag is ARA.
  static RecompositionRule make(RuleTag tag, std::optional<double> sigma2,
                                AraScale scale = AraScale::Variance);

  RuleTag tag() const { return tag_; }
  const std::optional<double>& sigma2() const { return sigma2_; }
  AraScale ara_scale() const { return scale_; }

  double apply(double pB, double pC) const;

  friend bool operator==(const RecompositionRule&, const RecompositionRule&) = default;

 private:
  RecompositionRule(RuleTag tag, std::optional<double> sigma2, AraScale scale = AraScale::Variance)
      : tag_(tag), sigma2_(sigma2), scale_(scale) {}

  RuleTag tag_;
  std::optional<double> sigma2_;
  AraScale scale_;
};

struct RecomposedForecast {
  RecompositionRule rule;
  Probability estimate;
  Probability pB;
  Probability pC;
};

RecomposedForecast recompose(const RecompositionRule& rule, Probability pB, Probability pC);

Probability recompose_eum(Probability pB, Probability pC);
Probability recompose_ara(Probability pB, Probability pC, double sigma2,
                          AraScale scale = AraScale::Variance);
Probability recompose_aru(Probability pB, Probability pC);
Probability recompose_mnl(Probability pB, Probability pC);

enum class ChoiceRule { MNL, ARU };

// Choice probabilities over a menu of alternatives with the given utilities.
std::vector<double> choice_distribution(std::span<const double> utilities, ChoiceRule rule);

// Paired draws (b_i, c_i) from the two models pushed through the rule.
std::vector<double> recompose_mc(const ImprecisionModel& model_b, const ImprecisionModel& model_c,
                                 const RecompositionRule& rule, int n, std::uint64_t seed);

// Knowledge level (1..5) to ARA sigma2; strictly decreasing in the level.
class SigmaMap {
 public:
  // Default anchors {1: 10, 2: 1, 3: 0.5, 4: 0.25, 5: 0.1}.
  SigmaMap();
  explicit SigmaMap(std::array<double, 5> table);

  static SigmaMap from_json(const nlohmann::json& j);
  static SigmaMap load(const std::string& path);
  nlohmann::json to_json() const;

  double at(int level) const { return table_[static_cast<std::size_t>(level - 1)]; }
  const std::array<double, 5>& table() const { return table_; }

 private:
  std::array<double, 5> table_;
};

double sigma2_for(const KnowledgeLevel& knowledge, const SigmaMap& map);

struct SurfaceCell {
  double pB;
  double pC;
  double p_hat;
};

// ARA recomposition over the grid {0, step, 2 step, ..., 1}^2, sorted by (pB, pC).
std::vector<SurfaceCell> ara_surface(double sigma2, double grid_step,
                                     AraScale scale = AraScale::Variance);
std::string surface_csv(const std::vector<SurfaceCell>& cells);

}  // namespace sej
