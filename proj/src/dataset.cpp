#include "sej/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <set>

#include "sej/csv.hpp"
#include "sej/error.hpp"
#include "sej/rng.hpp"

namespace sej {

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

namespace {

[[noreturn]] void row_error(std::size_t row, const std::string& message) {
  throw ValidationError("row " + std::to_string(row) + ": " + message);
}

std::optional<int> parse_int(const std::string& text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

// Data rows paired with their 1-based line number; blank lines skipped.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_table(const std::string& text,
                                                                         std::string_view header,
                                                                         std::size_t columns) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != header) {
    throw ValidationError("row 1: expected header '" + std::string(header) + "'");
  }
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(lines[i]);
    } catch (const ValidationError& e) {
      row_error(i + 1, e.what());
    }
    if (fields.size() != columns) {
      row_error(i + 1, "expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    }
    rows.emplace_back(i + 1, std::move(fields));
  }
  return rows;
}

}  // namespace

std::vector<JudgmentSet> parse_judgments_csv(const std::string& text) {
  std::vector<JudgmentSet> sets;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::map<std::tuple<std::string, std::string, Task>, std::size_t> seen_rows;
  std::map<std::pair<std::string, std::string>, std::size_t> first_row;

  for (const auto& [row, f] : read_table(text, kJudgmentsHeader, 5)) {
    const auto& participant = f[0];
    const auto& question = f[1];
    if (participant.empty()) row_error(row, "participant_id is empty");
    if (question.empty()) row_error(row, "question_id is empty");
    const auto task = parse_task(f[2]);
    if (!task) row_error(row, "task must be one of A,B,C,D, got '" + f[2] + "'");
    const auto selection = parse_int(f[3]);
    if (!selection) row_error(row, "selection is not an integer: '" + f[3] + "'");
    if (!is_valid_selection(*selection)) {
      row_error(row, "selection must be a multiple of 10 in [0,100], got " + f[3]);
    }
    std::optional<KnowledgeLevel> knowledge;
    if (*task == Task::A) {
      const auto level = parse_int(f[4]);
      if (!level) row_error(row, "knowledge required on task A rows, got '" + f[4] + "'");
      if (*level < 1 || *level > 5) row_error(row, "knowledge must be in 1..5, got " + f[4]);
      knowledge = KnowledgeLevel(*level);
    } else if (!f[4].empty()) {
      row_error(row, "knowledge must be blank except on task A rows");
    }

    const auto key3 = std::make_tuple(participant, question, *task);
    if (auto it = seen_rows.find(key3); it != seen_rows.end()) {
      row_error(row, "duplicate (participant_id, question_id, task) = (" + participant + ", " + question + ", " +
                         f[2] + "), first seen at row " + std::to_string(it->second));
    }
    seen_rows.emplace(key3, row);

    const auto key = std::make_pair(participant, question);
    auto [it, inserted] = index.try_emplace(key, sets.size());
    if (inserted) {
      sets.push_back(JudgmentSet{participant, question, {}, {}, {}, {}, {}});
      first_row[key] = row;
    }
    auto& js = sets[it->second];
    js.response(*task) = IntervalResponse::from_selection(*selection);
    if (knowledge) js.knowledge = knowledge;
  }

  for (const auto& js : sets) {
    if (!js.is_complete()) {
      try {
        js.require_complete();
      } catch (const ValidationError& e) {
        row_error(first_row.at({js.participant_id, js.question_id}), e.what());
      }
    }
  }
  return sets;
}

std::map<std::string, int> parse_outcomes_csv(const std::string& text) {
  std::map<std::string, int> out;
  std::map<std::string, std::size_t> rows_of;
  for (const auto& [row, f] : read_table(text, kOutcomesHeader, 2)) {
    if (f[0].empty()) row_error(row, "question_id is empty");
    const auto v = parse_int(f[1]);
    if (!v || (*v != 0 && *v != 1)) row_error(row, "outcome must be 0 or 1, got '" + f[1] + "'");
    if (auto it = rows_of.find(f[0]); it != rows_of.end()) {
      row_error(row, "duplicate outcome for question " + f[0] + ", first seen at row " + std::to_string(it->second));
    }
    rows_of[f[0]] = row;
    out[f[0]] = *v;
  }
  return out;
}

std::vector<Question> parse_questions_csv(const std::string& text) {
  std::vector<Question> out;
  std::map<std::string, std::size_t> rows_of;
  for (const auto& [row, f] : read_table(text, kQuestionsHeader, 4)) {
    const auto domain = parse_domain(f[2]);
    if (!domain) row_error(row, "domain_tag must be politics|products|sports|other, got '" + f[2] + "'");
    const auto horizon = parse_int(f[3]);
    if (!horizon || *horizon <= 0) row_error(row, "horizon_days must be a positive integer");
    if (auto it = rows_of.find(f[0]); it != rows_of.end()) {
      row_error(row, "duplicate question " + f[0] + ", first seen at row " + std::to_string(it->second));
    }
    rows_of[f[0]] = row;
    try {
      out.emplace_back(f[0], f[1], *domain, *horizon);
    } catch (const ValidationError& e) {
      row_error(row, e.what());
    }
  }
  return out;
}

const Question* Dataset::find_question(const std::string& id) const {
  for (const auto& q : questions) {
    if (q.question_id() == id) return &q;
  }
  return nullptr;
}

Question* Dataset::find_question(const std::string& id) {
  return const_cast<Question*>(std::as_const(*this).find_question(id));
}

std::map<std::string, int> Dataset::outcomes() const {
  std::map<std::string, int> out;
  for (const auto& q : questions) {
    if (q.outcome()) out[q.question_id()] = *q.outcome();
  }
  return out;
}

std::vector<std::string> Dataset::question_ids() const {
  std::vector<std::string> out;
  for (const auto& q : questions) out.push_back(q.question_id());
  return out;
}

void Dataset::validate() const {
  std::set<std::string> ids;
  for (const auto& q : questions) {
    if (!ids.insert(q.question_id()).second) throw ValidationError("duplicate question " + q.question_id());
  }
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& js : sets) {
    if (!ids.count(js.question_id)) {
      throw ValidationError("judgment set references unknown question " + js.question_id);
    }
    if (!keys.insert({js.participant_id, js.question_id}).second) {
      throw ValidationError("duplicate judgment set (" + js.participant_id + ", " + js.question_id + ")");
    }
    js.require_complete();
  }
}

std::uint64_t Dataset::content_hash() const {
  auto h = fnv1a64(export_judgments_csv(sets));
  h = fnv1a64(export_outcomes_csv(questions), h);
  return fnv1a64(export_questions_csv(questions), h);
}

namespace {

Dataset assemble(std::vector<JudgmentSet> sets, std::optional<std::map<std::string, int>> outcomes,
                 std::optional<std::vector<Question>> questions) {
  Dataset ds;
  ds.sets = std::move(sets);
  if (questions) {
    ds.questions = std::move(*questions);
  } else {
    std::set<std::string> added;
    for (const auto& js : ds.sets) {
      if (added.insert(js.question_id).second) ds.questions.emplace_back(js.question_id, "", Domain::Other, 30);
    }
  }
  if (outcomes) {
    for (const auto& [id, outcome] : *outcomes) {
      auto* q = ds.find_question(id);
      if (!q) throw ValidationError("outcome recorded for unknown question " + id);
      q->record_outcome(outcome);
    }
  }
  ds.validate();
  ds.provenance.ingested_at = utc_timestamp();
  return ds;
}

}  // namespace

Dataset ingest_text(const std::string& judgments, const std::optional<std::string>& outcomes,
                    const std::optional<std::string>& questions) {
  std::optional<std::map<std::string, int>> parsed_outcomes;
  if (outcomes) parsed_outcomes = parse_outcomes_csv(*outcomes);
  std::optional<std::vector<Question>> parsed_questions;
  if (questions) parsed_questions = parse_questions_csv(*questions);
  auto ds = assemble(parse_judgments_csv(judgments), std::move(parsed_outcomes), std::move(parsed_questions));
  ds.provenance.files.push_back({"judgments", "<memory>", hex64(fnv1a64(judgments))});
  if (outcomes) ds.provenance.files.push_back({"outcomes", "<memory>", hex64(fnv1a64(*outcomes))});
  if (questions) ds.provenance.files.push_back({"questions", "<memory>", hex64(fnv1a64(*questions))});
  return ds;
}

Dataset ingest(const std::string& judgments_path, const std::optional<std::string>& outcomes_path,
               const std::optional<std::string>& questions_path) {
  auto with_file = [](const std::string& path, auto parse) {
    try {
      return parse(read_file(path));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": " + e.what());
    }
  };
  const auto judgments_text = read_file(judgments_path);
  auto sets = with_file(judgments_path, parse_judgments_csv);
  std::optional<std::map<std::string, int>> outcomes;
  std::optional<std::vector<Question>> questions;
  if (outcomes_path) outcomes = with_file(*outcomes_path, parse_outcomes_csv);
  if (questions_path) questions = with_file(*questions_path, parse_questions_csv);
  auto ds = assemble(std::move(sets), std::move(outcomes), std::move(questions));
  ds.provenance.files.push_back({"judgments", judgments_path, hex64(fnv1a64(judgments_text))});
  if (outcomes_path) {
    ds.provenance.files.push_back({"outcomes", *outcomes_path, hex64(fnv1a64(read_file(*outcomes_path)))});
  }
  if (questions_path) {
    ds.provenance.files.push_back({"questions", *questions_path, hex64(fnv1a64(read_file(*questions_path)))});
  }
  return ds;
}

std::string export_judgments_csv(const std::vector<JudgmentSet>& sets) {
  std::string out = std::string(kJudgmentsHeader) + "\n";
  for (const auto& js : sets) {
    for (Task t : {Task::A, Task::B, Task::C, Task::D}) {
      const auto& r = js.response(t);
      if (!r) continue;
      out += csv_field(js.participant_id) + "," + csv_field(js.question_id) + "," + std::string(task_name(t)) +
             "," + std::to_string(r->selection()) + ",";
      if (t == Task::A && js.knowledge) out += std::to_string(js.knowledge->level());
      out += "\n";
    }
  }
  return out;
}

std::string export_outcomes_csv(const std::vector<Question>& questions) {
  std::string out = std::string(kOutcomesHeader) + "\n";
  for (const auto& q : questions) {
    if (q.outcome()) out += csv_field(q.question_id()) + "," + std::to_string(*q.outcome()) + "\n";
  }
  return out;
}

std::string export_questions_csv(const std::vector<Question>& questions) {
  std::string out = std::string(kQuestionsHeader) + "\n";
  for (const auto& q : questions) {
    out += csv_field(q.question_id()) + "," + csv_field(q.text()) + "," + std::string(domain_name(q.domain())) +
           "," + std::to_string(q.horizon_days()) + "\n";
  }
  return out;
}

void export_dataset(const Dataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_file((base / "judgments.csv").string(), export_judgments_csv(ds.sets));
  write_file((base / "outcomes.csv").string(), export_outcomes_csv(ds.questions));
  write_file((base / "questions.csv").string(), export_questions_csv(ds.questions));
}

}  // namespace sej
