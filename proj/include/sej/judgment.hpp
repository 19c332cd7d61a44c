#pragma once

// Domain types for elicited judgments: probabilities, 10%-step interval
// responses, knowledge self-assessments, per-question judgment bundles and
// the forecasting questions themselves.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace sej {

class Probability {
 public:
  constexpr Probability() = default;
  // Throws ValidationError outside [0, 1] (NaN included).
  explicit Probability(double value);

  constexpr double value() const { return value_; }

  friend constexpr auto operator<=>(const Probability&, const Probability&) = default;

 private:
  double value_ = 0.0;
};

// A selection on the 0%..100% scale in steps of 10%, standing for the
// interval [s/100 - 0.05, s/100 + 0.05] clamped to [0, 1]. Bounds are kept
// in integer per-mille so that midpoints are exact.
class IntervalResponse {
 public:
  // Throws ValidationError unless selection is a multiple of 10 in [0, 100].
  static IntervalResponse from_selection(int selection);

  int selection() const { return selection_; }
  Probability lo() const { return Probability(lo_permille_ / 1000.0); }
  Probability hi() const { return Probability(hi_permille_ / 1000.0); }
  int lo_permille() const { return lo_permille_; }
  int hi_permille() const { return hi_permille_; }
  double width() const { return (hi_permille_ - lo_permille_) / 1000.0; }

  friend bool operator==(const IntervalResponse& a, const IntervalResponse& b) {
    return a.selection_ == b.selection_;
  }

 private:
  IntervalResponse(int selection, int lo, int hi)
      : selection_(selection), lo_permille_(lo), hi_permille_(hi) {}

  int selection_;
  int lo_permille_;
  int hi_permille_;
};

bool is_valid_selection(int selection);
IntervalResponse interval_from_selection(int selection);
Probability midpoint(const IntervalResponse& interval);

class KnowledgeLevel {
 public:
  // Throws ValidationError outside 1..5.
  explicit KnowledgeLevel(int level);
  int level() const { return level_; }
  friend auto operator<=>(const KnowledgeLevel&, const KnowledgeLevel&) = default;

 private:
  int level_;
};

// Task 1 (pA), Task 2 (pB), Task 3 (pC) and the Task 4 repeat (pD).
enum class Task { A, B, C, D };

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view text);

struct JudgmentSet {
  std::string participant_id;
  std::string question_id;
  std::optional<IntervalResponse> pA;
  std::optional<IntervalResponse> pB;
  std::optional<IntervalResponse> pC;
  std::optional<IntervalResponse> pD;
  std::optional<KnowledgeLevel> knowledge;

  bool is_complete() const { return pA && pB && pC && pD && knowledge; }
  const std::optional<IntervalResponse>& response(Task task) const;
  std::optional<IntervalResponse>& response(Task task);

  // Throws ValidationError naming the missing parts when incomplete.
  void require_complete() const;

  friend bool operator==(const JudgmentSet&, const JudgmentSet&) = default;
};

enum class Domain { Politics, Products, Sports, Other };

std::string_view domain_name(Domain domain);
std::optional<Domain> parse_domain(std::string_view text);

class Question {
 public:
  Question(std::string question_id, std::string text, Domain domain, int horizon_days);

  const std::string& question_id() const { return question_id_; }
  const std::string& text() const { return text_; }
  Domain domain() const { return domain_; }
  int horizon_days() const { return horizon_days_; }
  const std::optional<int>& outcome() const { return outcome_; }

  // 1 = adversary acted, 0 = did not. A recorded outcome is immutable:
  // throws ConflictError on a second call, ValidationError for other values.
  void record_outcome(int outcome);

  friend bool operator==(const Question&, const Question&) = default;

 private:
  std::string question_id_;
  std::string text_;
  Domain domain_;
  int horizon_days_;
  std::optional<int> outcome_;
};

void to_json(nlohmann::json& j, const Probability& p);
void from_json(const nlohmann::json& j, Probability& p);
void to_json(nlohmann::json& j, const IntervalResponse& r);
IntervalResponse interval_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const KnowledgeLevel& k);
void to_json(nlohmann::json& j, const JudgmentSet& js);
void from_json(const nlohmann::json& j, JudgmentSet& js);
void to_json(nlohmann::json& j, const Question& q);
Question question_from_json(const nlohmann::json& j);

}  // namespace sej
