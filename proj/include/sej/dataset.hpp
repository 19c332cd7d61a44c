#pragma once

// Tabular ingestion and export of judgment data.
//
// Judgments CSV (header exact):  participant_id,question_id,task,selection,knowledge
//   one row per task A/B/C/D; knowledge is given on the A row only.
// Outcomes CSV:                  question_id,outcome
// Questions CSV (optional):      question_id,text,domain_tag,horizon_days

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sej/judgment.hpp"

namespace sej {

inline constexpr std::string_view kJudgmentsHeader = "participant_id,question_id,task,selection,knowledge";
inline constexpr std::string_view kOutcomesHeader = "question_id,outcome";
inline constexpr std::string_view kQuestionsHeader = "question_id,text,domain_tag,horizon_days";

struct SourceFile {
  std::string role;  // judgments | outcomes | questions
  std::string path;
  std::string fnv1a64;  // hex digest of the file bytes
};

struct Provenance {
  std::vector<SourceFile> files;
  std::string ingested_at;  // ISO-8601 UTC
};

struct Dataset {
  std::vector<Question> questions;
  std::vector<JudgmentSet> sets;
  Provenance provenance;

  const Question* find_question(const std::string& id) const;
  Question* find_question(const std::string& id);
  // question_id -> outcome for every resolved question.
  std::map<std::string, int> outcomes() const;
  std::vector<std::string> question_ids() const;
  // Referential integrity, one set per (participant, question), completeness.
  void validate() const;
  // Hash of the exported content (excludes provenance).
  std::uint64_t content_hash() const;
};

std::vector<JudgmentSet> parse_judgments_csv(const std::string& text);
std::map<std::string, int> parse_outcomes_csv(const std::string& text);
std::vector<Question> parse_questions_csv(const std::string& text);

// Builds a validated Dataset. Without a questions file, questions are
// synthesised from the judgment ids (domain "other", 30-day horizon).
Dataset ingest(const std::string& judgments_path,
               const std::optional<std::string>& outcomes_path = std::nullopt,
               const std::optional<std::string>& questions_path = std::nullopt);

// Same as `ingest` from in-memory text; provenance records `label` paths.
Dataset ingest_text(const std::string& judgments, const std::optional<std::string>& outcomes = std::nullopt,
                    const std::optional<std::string>& questions = std::nullopt);

std::string export_judgments_csv(const std::vector<JudgmentSet>& sets);
std::string export_outcomes_csv(const std::vector<Question>& questions);
std::string export_questions_csv(const std::vector<Question>& questions);

// Writes judgments.csv, outcomes.csv and questions.csv into `dir`.
void export_dataset(const Dataset& ds, const std::string& dir);

std::string hex64(std::uint64_t value);
std::string utc_timestamp();

}  // namespace sej
