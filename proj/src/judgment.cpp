#include "sej/judgment.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sej/error.hpp"

namespace sej {

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError("probability out of [0,1]: " + std::to_string(value));
  }
}

bool is_valid_selection(int selection) {
  return selection >= 0 && selection <= 100 && selection % 10 == 0;
}

IntervalResponse IntervalResponse::from_selection(int selection) {
  if (!is_valid_selection(selection)) {
    throw ValidationError("selection must be a multiple of 10 in [0,100], got " +
                          std::to_string(selection));
  }
  const int centre = selection * 10;
  return IntervalResponse(selection, std::max(0, centre - 50), std::min(1000, centre + 50));
}

IntervalResponse interval_from_selection(int selection) {
  return IntervalResponse::from_selection(selection);
}

Probability midpoint(const IntervalResponse& interval) {
  return Probability((interval.lo_permille() + interval.hi_permille()) / 2000.0);
}

KnowledgeLevel::KnowledgeLevel(int level) : level_(level) {
  if (level < 1 || level > 5) {
    throw ValidationError("knowledge level must be in 1..5, got " + std::to_string(level));
  }
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::A: return "A";
    case Task::B: return "B";
    case Task::C: return "C";
    case Task::D: return "D";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view text) {
  if (text == "A") return Task::A;
  if (text == "B") return Task::B;
  if (text == "C") return Task::C;
  if (text == "D") return Task::D;
  return std::nullopt;
}

const std::optional<IntervalResponse>& JudgmentSet::response(Task task) const {
  switch (task) {
    case Task::A: return pA;
    case Task::B: return pB;
    case Task::C: return pC;
    case Task::D: break;
  }
  return pD;
}

std::optional<IntervalResponse>& JudgmentSet::response(Task task) {
  return const_cast<std::optional<IntervalResponse>&>(std::as_const(*this).response(task));
}

void JudgmentSet::require_complete() const {
  if (is_complete()) return;
  std::string missing;
  for (Task t : {Task::A, Task::B, Task::C, Task::D}) {
    if (!response(t)) missing += std::string(missing.empty() ? "" : ",") + "p" + std::string(task_name(t));
  }
  if (!knowledge) missing += std::string(missing.empty() ? "" : ",") + "knowledge";
  throw ValidationError("incomplete judgment set (" + participant_id + ", " + question_id +
                        "): missing " + missing);
}

std::string_view domain_name(Domain domain) {
  switch (domain) {
    case Domain::Politics: return "politics";
    case Domain::Products: return "products";
    case Domain::Sports: return "sports";
    case Domain::Other: break;
  }
  return "other";
}

std::optional<Domain> parse_domain(std::string_view text) {
  if (text == "politics") return Domain::Politics;
  if (text == "products") return Domain::Products;
  if (text == "sports") return Domain::Sports;
  if (text == "other") return Domain::Other;
  return std::nullopt;
}

Question::Question(std::string question_id, std::string text, Domain domain, int horizon_days)
    : question_id_(std::move(question_id)), text_(std::move(text)), domain_(domain),
      horizon_days_(horizon_days) {
  if (question_id_.empty()) throw ValidationError("question_id must not be empty");
  if (horizon_days_ <= 0) throw ValidationError("horizon_days must be positive");
}

void Question::record_outcome(int outcome) {
  if (outcome != 0 && outcome != 1) {
    throw ValidationError("outcome must be 0 or 1, got " + std::to_string(outcome));
  }
  if (outcome_) throw ConflictError("outcome already recorded for question " + question_id_);
  outcome_ = outcome;
}

// JSON ----------------------------------------------------------------------

void to_json(nlohmann::json& j, const Probability& p) { j = p.value(); }
void from_json(const nlohmann::json& j, Probability& p) { p = Probability(j.get<double>()); }

void to_json(nlohmann::json& j, const IntervalResponse& r) {
  j = nlohmann::json{{"selection", r.selection()},
                     {"interval_lo", r.lo().value()},
                     {"interval_hi", r.hi().value()}};
}

IntervalResponse interval_from_json(const nlohmann::json& j) {
  auto r = IntervalResponse::from_selection(j.at("selection").get<int>());
  if (j.contains("interval_lo") && j.at("interval_lo").get<double>() != r.lo().value()) {
    throw ValidationError("interval_lo inconsistent with selection");
  }
  if (j.contains("interval_hi") && j.at("interval_hi").get<double>() != r.hi().value()) {
    throw ValidationError("interval_hi inconsistent with selection");
  }
  return r;
}

void to_json(nlohmann::json& j, const KnowledgeLevel& k) { j = k.level(); }

void to_json(nlohmann::json& j, const JudgmentSet& js) {
  j = nlohmann::json{{"participant_id", js.participant_id}, {"question_id", js.question_id}};
  for (Task t : {Task::A, Task::B, Task::C, Task::D}) {
    const auto key = "p" + std::string(task_name(t));
    if (const auto& r = js.response(t)) j[key] = *r;
    else j[key] = nullptr;
  }
  if (js.knowledge) j["knowledge"] = *js.knowledge;
  else j["knowledge"] = nullptr;
}

void from_json(const nlohmann::json& j, JudgmentSet& js) {
  js.participant_id = j.at("participant_id").get<std::string>();
  js.question_id = j.at("question_id").get<std::string>();
  for (Task t : {Task::A, Task::B, Task::C, Task::D}) {
    const auto key = "p" + std::string(task_name(t));
    if (j.contains(key) && !j.at(key).is_null()) js.response(t) = interval_from_json(j.at(key));
    else js.response(t).reset();
  }
  if (j.contains("knowledge") && !j.at("knowledge").is_null()) {
    js.knowledge = KnowledgeLevel(j.at("knowledge").get<int>());
  } else {
    js.knowledge.reset();
  }
}

void to_json(nlohmann::json& j, const Question& q) {
  j = nlohmann::json{{"question_id", q.question_id()},
                     {"text", q.text()},
                     {"domain_tag", domain_name(q.domain())},
                     {"horizon_days", q.horizon_days()}};
  if (q.outcome()) j["outcome"] = *q.outcome();
  else j["outcome"] = nullptr;
}

Question question_from_json(const nlohmann::json& j) {
  const auto tag = j.at("domain_tag").get<std::string>();
  const auto domain = parse_domain(tag);
  if (!domain) throw ValidationError("unknown domain_tag: " + tag);
  Question q(j.at("question_id").get<std::string>(), j.value("text", std::string{}), *domain,
             j.at("horizon_days").get<int>());
  if (j.contains("outcome") && !j.at("outcome").is_null()) q.record_outcome(j.at("outcome").get<int>());
  return q;
}

}  // namespace sej
