#include "sej/recomposition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sej/csv.hpp"
#include "sej/error.hpp"
#include "sej/rng.hpp"
#include "sej/special.hpp"

namespace sej {

std::string_view rule_name(RuleTag tag) {
  switch (tag) {
    case RuleTag::EUM: return "EUM";
    case RuleTag::ARA: return "ARA";
    case RuleTag::ARU: return "ARU";
    case RuleTag::MNL: return "MNL";
  }
  return "?";
}

std::optional<RuleTag> parse_rule(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (RuleTag tag : kAllRules) {
    if (upper == rule_name(tag)) return tag;
  }
  return std::nullopt;
}

RecompositionRule RecompositionRule::ara(double sigma2, AraScale scale) {
  return make(RuleTag::ARA, sigma2, scale);
}

RecompositionRule RecompositionRule::make(RuleTag tag, std::optional<double> sigma2,
                                          AraScale scale) {
  if (tag == RuleTag::ARA) {
    if (!sigma2 || !(*sigma2 > 0.0) || !std::isfinite(*sigma2)) {
      throw ValidationError("ARA rule requires a positive finite sigma2");
    }
  } else if (sigma2) {
    throw ValidationError("sigma2 is only meaningful for the ARA rule");
  }
  return RecompositionRule(tag, sigma2, scale);
}

namespace {

double eum_value(double pB, double pC) {
  if (pC > pB) return 1.0;
  if (pC < pB) return 0.0;
  return 0.5;
}

// The remaining rules are evaluated on the pC >= pB half and mirrored, so
// that swapping the arguments yields exactly 1 - p.
template <class Upper>
double mirrored(double pB, double pC, Upper upper) {
  if (pC >= pB) return upper(pB, pC);
  return 1.0 - upper(pC, pB);
}

double ara_value(double pB, double pC, double sigma2, AraScale scale) {
  const double divisor = scale == AraScale::Variance ? sigma2 : std::sqrt(sigma2);
  // 1 - Phi((pB - pC) / d) == Phi((pC - pB) / d)
  return mirrored(pB, pC, [divisor](double b, double c) { return special::normal_cdf((c - b) / divisor); });
}

double aru_value(double pB, double pC) {
  if (pB + pC == 0.0) return 0.5;
  return mirrored(pB, pC, [](double b, double c) { return c / (b + c); });
}

double mnl_value(double pB, double pC) {
  return mirrored(pB, pC, [](double b, double c) { return 1.0 / (1.0 + std::exp(b - c)); });
}

}  // namespace

double RecompositionRule::apply(double pB, double pC) const {
  switch (tag_) {
    case RuleTag::EUM: return eum_value(pB, pC);
    case RuleTag::ARA: return ara_value(pB, pC, *sigma2_, scale_);
    case RuleTag::ARU: return aru_value(pB, pC);
    case RuleTag::MNL: return mnl_value(pB, pC);
  }
  return 0.5;
}

RecomposedForecast recompose(const RecompositionRule& rule, Probability pB, Probability pC) {
  return {rule, Probability(rule.apply(pB.value(), pC.value())), pB, pC};
}

Probability recompose_eum(Probability pB, Probability pC) {
  return Probability(eum_value(pB.value(), pC.value()));
}

Probability recompose_ara(Probability pB, Probability pC, double sigma2, AraScale scale) {
  return Probability(RecompositionRule::ara(sigma2, scale).apply(pB.value(), pC.value()));
}

Probability recompose_aru(Probability pB, Probability pC) {
  return Probability(aru_value(pB.value(), pC.value()));
}

Probability recompose_mnl(Probability pB, Probability pC) {
  return Probability(mnl_value(pB.value(), pC.value()));
}

std::vector<double> choice_distribution(std::span<const double> utilities, ChoiceRule rule) {
  if (utilities.empty()) throw ValidationError("choice set must not be empty");
  std::vector<double> out(utilities.begin(), utilities.end());
  if (rule == ChoiceRule::MNL) {
    const double top = *std::max_element(out.begin(), out.end());
    for (double& u : out) u = std::exp(u - top);
  } else {
    for (double u : out) {
      if (u < 0.0) throw DegenerateError("ARU requires non-negative utilities");
    }
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (total == 0.0) throw DegenerateError("ARU requires at least one positive utility");
  for (double& u : out) u /= total;
  return out;
}

std::vector<double> recompose_mc(const ImprecisionModel& model_b, const ImprecisionModel& model_c,
                                 const RecompositionRule& rule, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("Monte Carlo sample size must be positive");
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double b = rng.beta(model_b.alpha(), model_b.beta());
    const double c = rng.beta(model_c.alpha(), model_c.beta());
    out.push_back(rule.apply(b, c));
  }
  return out;
}

SigmaMap::SigmaMap() : SigmaMap(std::array<double, 5>{10.0, 1.0, 0.5, 0.25, 0.1}) {}

SigmaMap::SigmaMap(std::array<double, 5> table) : table_(table) {
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (!(table_[i] > 0.0) || !std::isfinite(table_[i])) {
      throw ValidationError("sigma map values must be positive and finite");
    }
    if (i > 0 && !(table_[i] < table_[i - 1])) {
      throw ValidationError("sigma map must be strictly decreasing in knowledge level");
    }
  }
}

SigmaMap SigmaMap::from_json(const nlohmann::json& j) {
  std::array<double, 5> table{};
  for (int level = 1; level <= 5; ++level) {
    const auto key = std::to_string(level);
    if (!j.contains(key)) throw ValidationError("sigma map missing level " + key);
    table[static_cast<std::size_t>(level - 1)] = j.at(key).get<double>();
  }
  if (j.size() != 5) throw ValidationError("sigma map must have exactly the keys 1..5");
  return SigmaMap(table);
}

SigmaMap SigmaMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sigma map file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("sigma map " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json SigmaMap::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (int level = 1; level <= 5; ++level) j[std::to_string(level)] = at(level);
  return j;
}

double sigma2_for(const KnowledgeLevel& knowledge, const SigmaMap& map) {
  return map.at(knowledge.level());
}

std::vector<SurfaceCell> ara_surface(double sigma2, double grid_step, AraScale scale) {
  if (!(grid_step > 0.0 && grid_step <= 0.1)) {
    throw ValidationError("grid_step must lie in (0, 0.1]");
  }
  const auto rule = RecompositionRule::ara(sigma2, scale);
  const auto steps = static_cast<int>(std::floor(1.0 / grid_step + 1e-9));
  std::vector<double> axis;
  for (int i = 0; i <= steps; ++i) axis.push_back(std::min(1.0, i * grid_step));
  if (axis.back() < 1.0) axis.push_back(1.0);

  std::vector<SurfaceCell> cells;
  cells.reserve(axis.size() * axis.size());
  for (double b : axis) {
    for (double c : axis) cells.push_back({b, c, rule.apply(b, c)});
  }
  return cells;
}

std::string surface_csv(const std::vector<SurfaceCell>& cells) {
  std::string out = "pB,pC,p_hat\n";
  for (const auto& cell : cells) {
    out += fixed6(cell.pB) + "," + fixed6(cell.pC) + "," + fixed6(cell.p_hat) + "\n";
  }
  return out;
}

}  // namespace sej
