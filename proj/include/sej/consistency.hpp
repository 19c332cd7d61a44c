#pragma once

// Consistency of direct judgments with the decomposed assessments: a direct
// pA (or revised pD) above 1/2 is consistent with pC > pB, below 1/2 with
// pC < pB. All comparisons use interval midpoints.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sej/judgment.hpp"

namespace sej {

enum class Quadrant { CLow, CHigh, ILow, IHigh, Borderline };

std::string_view quadrant_name(Quadrant q);

// How Borderline verdicts (pA = 1/2 or pB = pC) enter aggregates.
enum class TiePolicy {
  Consistent,  // counted as consistent
  Separate,    // neither consistent nor inconsistent
};

std::optional<TiePolicy> parse_tie_policy(std::string_view text);
std::string_view tie_policy_name(TiePolicy policy);

struct ConsistencyVerdict {
  Quadrant quadrant;
  std::optional<bool> consistent;  // absent for Borderline

  bool is_inconsistent() const { return consistent.has_value() && !*consistent; }
  bool counts_as_consistent(TiePolicy policy) const {
    return consistent ? *consistent : policy == TiePolicy::Consistent;
  }
};

ConsistencyVerdict verdict_for(double direct, double pB, double pC);

// Throws ValidationError for incomplete sets.
ConsistencyVerdict classify(const JudgmentSet& js, bool use_revised);

enum class Transition { StayedConsistent, StayedInconsistent, Repaired, Broken, BorderlineInvolved };

std::string_view transition_name(Transition t);

struct RevisionOutcome {
  bool changed;
  Transition transition;
};

RevisionOutcome revision_outcome(const JudgmentSet& js);

struct QuadrantTable {
  std::map<Quadrant, int> counts;
  int total = 0;

  double proportion(Quadrant q) const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

QuadrantTable quadrant_table(const std::vector<JudgmentSet>& sets, bool use_revised);

struct InconsistencyHistogram {
  int questions_per_participant = 0;
  std::vector<int> participants_by_count;  // index = number of inconsistent questions
  int participants = 0;

  double proportion(int count) const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Groups sets by participant; each participant must have the same number
// of questions (ValidationError otherwise). Borderline is never counted as
// inconsistent.
InconsistencyHistogram inconsistency_histogram(const std::vector<JudgmentSet>& sets);

struct RevisionSummary {
  int total = 0;
  int changed = 0;
  int initially_inconsistent = 0;
  int repaired = 0;
  int initially_consistent = 0;
  int broken = 0;

  std::optional<double> fraction_changed() const;
  std::optional<double> fraction_repaired_among_inconsistent() const;
  std::optional<double> fraction_broken_among_consistent() const;
  nlohmann::json to_json() const;
};

RevisionSummary revision_analysis(const std::vector<JudgmentSet>& sets);

// Rows of (participant_id, question_id, pC - pB, direct) for scatter plots.
std::string scatter_csv(const std::vector<JudgmentSet>& sets, bool use_revised);

}  // namespace sej
