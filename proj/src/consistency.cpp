#include "sej/consistency.hpp"

#include <algorithm>

#include "sej/csv.hpp"
#include "sej/error.hpp"

namespace sej {

std::string_view quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::CLow: return "C-low";
    case Quadrant::CHigh: return "C-high";
    case Quadrant::ILow: return "I-low";
    case Quadrant::IHigh: return "I-high";
    case Quadrant::Borderline: break;
  }
  return "Borderline";
}

std::optional<TiePolicy> parse_tie_policy(std::string_view text) {
  if (text == "consistent") return TiePolicy::Consistent;
  if (text == "separate") return TiePolicy::Separate;
  return std::nullopt;
}

std::string_view tie_policy_name(TiePolicy policy) {
  return policy == TiePolicy::Consistent ? "consistent" : "separate";
}

ConsistencyVerdict verdict_for(double direct, double pB, double pC) {
  if (direct == 0.5 || pB == pC) return {Quadrant::Borderline, std::nullopt};
  const bool act_favoured = pC > pB;
  const bool forecast_high = direct > 0.5;
  if (act_favoured) {
    return forecast_high ? ConsistencyVerdict{Quadrant::CHigh, true}
                         : ConsistencyVerdict{Quadrant::ILow, false};
  }
  return forecast_high ? ConsistencyVerdict{Quadrant::IHigh, false}
                       : ConsistencyVerdict{Quadrant::CLow, true};
}

ConsistencyVerdict classify(const JudgmentSet& js, bool use_revised) {
  js.require_complete();
  const auto& direct = use_revised ? *js.pD : *js.pA;
  return verdict_for(midpoint(direct).value(), midpoint(*js.pB).value(), midpoint(*js.pC).value());
}

std::string_view transition_name(Transition t) {
  switch (t) {
    case Transition::StayedConsistent: return "stayed-consistent";
    case Transition::StayedInconsistent: return "stayed-inconsistent";
    case Transition::Repaired: return "repaired";
    case Transition::Broken: return "broken";
    case Transition::BorderlineInvolved: break;
  }
  return "borderline-involved";
}

RevisionOutcome revision_outcome(const JudgmentSet& js) {
  const auto before = classify(js, false);
  const auto after = classify(js, true);
  const bool changed = js.pA->selection() != js.pD->selection();
  if (!before.consistent || !after.consistent) return {changed, Transition::BorderlineInvolved};
  if (*before.consistent) {
    return {changed, *after.consistent ? Transition::StayedConsistent : Transition::Broken};
  }
  return {changed, *after.consistent ? Transition::Repaired : Transition::StayedInconsistent};
}

namespace {
constexpr Quadrant kQuadrants[] = {Quadrant::CLow, Quadrant::CHigh, Quadrant::ILow, Quadrant::IHigh,
                                   Quadrant::Borderline};
}

double QuadrantTable::proportion(Quadrant q) const {
  if (total == 0) return 0.0;
  auto it = counts.find(q);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / total;
}

nlohmann::json QuadrantTable::to_json() const {
  nlohmann::json cells = nlohmann::json::object();
  for (Quadrant q : kQuadrants) {
    auto it = counts.find(q);
    cells[std::string(quadrant_name(q))] = {{"count", it == counts.end() ? 0 : it->second},
                                            {"proportion", proportion(q)}};
  }
  return {{"total", total}, {"cells", cells}};
}

std::string QuadrantTable::to_csv() const {
  std::string out = "quadrant,count,proportion\n";
  for (Quadrant q : kQuadrants) {
    auto it = counts.find(q);
    out += std::string(quadrant_name(q)) + "," + std::to_string(it == counts.end() ? 0 : it->second) +
           "," + fixed6(proportion(q)) + "\n";
  }
  return out;
}

QuadrantTable quadrant_table(const std::vector<JudgmentSet>& sets, bool use_revised) {
  QuadrantTable table;
  for (Quadrant q : kQuadrants) table.counts[q] = 0;
  for (const auto& js : sets) {
    ++table.counts[classify(js, use_revised).quadrant];
    ++table.total;
  }
  return table;
}

double InconsistencyHistogram::proportion(int count) const {
  if (participants == 0 || count < 0 ||
      count >= static_cast<int>(participants_by_count.size())) {
    return 0.0;
  }
  return static_cast<double>(participants_by_count[static_cast<std::size_t>(count)]) / participants;
}

nlohmann::json InconsistencyHistogram::to_json() const {
  nlohmann::json buckets = nlohmann::json::array();
  for (std::size_t k = 0; k < participants_by_count.size(); ++k) {
    buckets.push_back({{"inconsistent_questions", k},
                       {"participants", participants_by_count[k]},
                       {"proportion", proportion(static_cast<int>(k))}});
  }
  return {{"participants", participants},
          {"questions_per_participant", questions_per_participant},
          {"buckets", buckets}};
}

std::string InconsistencyHistogram::to_csv() const {
  std::string out = "inconsistent_questions,participants,proportion\n";
  for (std::size_t k = 0; k < participants_by_count.size(); ++k) {
    out += std::to_string(k) + "," + std::to_string(participants_by_count[k]) + "," +
           fixed6(proportion(static_cast<int>(k))) + "\n";
  }
  return out;
}

InconsistencyHistogram inconsistency_histogram(const std::vector<JudgmentSet>& sets) {
  std::map<std::string, std::pair<int, int>> per_participant;  // (questions, inconsistent)
  for (const auto& js : sets) {
    auto& entry = per_participant[js.participant_id];
    ++entry.first;
    if (classify(js, false).is_inconsistent()) ++entry.second;
  }
  InconsistencyHistogram hist;
  if (per_participant.empty()) return hist;
  hist.questions_per_participant = per_participant.begin()->second.first;
  hist.participants_by_count.assign(static_cast<std::size_t>(hist.questions_per_participant) + 1, 0);
  for (const auto& [participant, entry] : per_participant) {
    if (entry.first != hist.questions_per_participant) {
      throw ValidationError("ragged grouping: participant " + participant + " has " +
                            std::to_string(entry.first) + " questions, expected " +
                            std::to_string(hist.questions_per_participant));
    }
    ++hist.participants_by_count[static_cast<std::size_t>(entry.second)];
    ++hist.participants;
  }
  return hist;
}

namespace {
std::optional<double> ratio(int num, int den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / den;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

std::optional<double> RevisionSummary::fraction_changed() const { return ratio(changed, total); }
std::optional<double> RevisionSummary::fraction_repaired_among_inconsistent() const {
  return ratio(repaired, initially_inconsistent);
}
std::optional<double> RevisionSummary::fraction_broken_among_consistent() const {
  return ratio(broken, initially_consistent);
}

nlohmann::json RevisionSummary::to_json() const {
  return {
      {"fraction_changed", optional_json(fraction_changed())},
      {"fraction_repaired_among_inconsistent", optional_json(fraction_repaired_among_inconsistent())},
      {"fraction_broken_among_consistent", optional_json(fraction_broken_among_consistent())},
      {"denominators",
       {{"changed", "all judgment sets"},
        {"repaired", "judgment sets whose initial verdict is I-low or I-high"},
        {"broken", "judgment sets whose initial verdict is C-low or C-high"}}},
      {"counts",
       {{"total", total},
        {"changed", changed},
        {"initially_inconsistent", initially_inconsistent},
        {"repaired", repaired},
        {"initially_consistent", initially_consistent},
        {"broken", broken}}},
  };
}

RevisionSummary revision_analysis(const std::vector<JudgmentSet>& sets) {
  RevisionSummary s;
  for (const auto& js : sets) {
    const auto initial = classify(js, false);
    const auto outcome = revision_outcome(js);
    ++s.total;
    if (outcome.changed) ++s.changed;
    if (initial.consistent) {
      if (*initial.consistent) {
        ++s.initially_consistent;
        if (outcome.transition == Transition::Broken) ++s.broken;
      } else {
        ++s.initially_inconsistent;
        if (outcome.transition == Transition::Repaired) ++s.repaired;
      }
    }
  }
  return s;
}

std::string scatter_csv(const std::vector<JudgmentSet>& sets, bool use_revised) {
  std::string out = std::string("participant_id,question_id,gap,") + (use_revised ? "pD" : "pA") + "\n";
  for (const auto& js : sets) {
    js.require_complete();
    const double gap = midpoint(*js.pC).value() - midpoint(*js.pB).value();
    const double direct = midpoint(use_revised ? *js.pD : *js.pA).value();
    out += csv_field(js.participant_id) + "," + csv_field(js.question_id) + "," + fixed6(gap) + "," +
           fixed6(direct) + "\n";
  }
  return out;
}

}  // namespace sej
