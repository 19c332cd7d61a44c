#pragma once

// Live elicitation sessions. Each session walks its questions in order
// through Task1 (pA), Task2 (pB), Task3 (pC), Task4 (pD) and the knowledge
// self-assessment. Every accepted action is an event appended (and fsynced)
// to the session's JSON-lines log before it is acknowledged; the in-memory
// state is always the replay of that log.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "sej/judgment.hpp"
#include "sej/recomposition.hpp"

namespace sej {

enum class Stage { Task1, Task2, Task3, Task4, Knowledge, Done };

std::string_view stage_name(Stage stage);
// Task answered at a stage; absent for Knowledge and Done.
std::optional<Task> task_at(Stage stage);
// Accepts 1..4, "1".."4", "Task1".."Task4" and "A".."D".
std::optional<Task> parse_task_field(const nlohmann::json& value);

struct QuestionProgress {
  Stage stage = Stage::Task1;
  JudgmentSet responses;

  friend bool operator==(const QuestionProgress&, const QuestionProgress&) = default;
};

struct SessionState {
  std::string session_id;
  std::string participant_id;
  std::vector<std::string> question_order;
  std::vector<QuestionProgress> progress;  // parallel to question_order
  std::string participant_token_hash;
  std::string facilitator_token_hash;
  std::string created_at;
  bool finalized = false;
  std::uint64_t last_seq = 0;

  // Index of the first question not yet Done.
  std::optional<std::size_t> current() const;
  bool all_done() const { return !current().has_value(); }
  std::vector<JudgmentSet> judgment_sets() const;
  // {question_id, stage} the protocol expects next, or {stage: Done}.
  nlohmann::json expected_next() const;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

enum class EventKind { SessionCreated, TaskSubmitted, KnowledgeSubmitted, SessionFinalized };

std::string_view event_kind_name(EventKind kind);

struct EventRecord {
  std::uint64_t seq = 0;
  std::string timestamp;
  std::string session_id;
  EventKind kind = EventKind::SessionCreated;
  nlohmann::json payload;

  nlohmann::json to_json() const;
  static EventRecord from_json(const nlohmann::json& j);
};

// Validates `event` against `state` (sequence, protocol order, payload) and
// applies it. Throws ProtocolError or ValidationError without modifying state.
void apply_event(SessionState& state, const EventRecord& event);

// State reconstructed from an empty session.
SessionState replay(const std::vector<EventRecord>& events);

class EventLog {
 public:
  EventLog(std::filesystem::path path, bool fsync_on_append);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const nlohmann::json& record);
  const std::filesystem::path& path() const { return path_; }

  static std::vector<nlohmann::json> read_all(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  bool fsync_;
};

struct ServiceConfig {
  std::filesystem::path data_dir;
  std::vector<Question> questions;
  std::string facilitator_token;  // service-wide; guards outcomes and reports
  SigmaMap sigma_map;
  bool fsync = true;
};

struct CreatedSession {
  std::string session_id;
  std::string participant_token;
  std::string facilitator_token;
  SessionState state;
};

class SessionService {
 public:
  // Recovers every session and outcome found under data_dir.
  explicit SessionService(ServiceConfig config);
  ~SessionService();

  CreatedSession create_session(const std::string& participant_id, const std::vector<std::string>& question_ids);

  // Token-scoped view; the participant view never carries recompositions.
  nlohmann::json view(const std::string& session_id, const std::string& token) const;

  nlohmann::json submit_response(const std::string& session_id, const std::string& token,
                                 const std::string& question_id, Task task, int selection);
  nlohmann::json submit_knowledge(const std::string& session_id, const std::string& token,
                                  const std::string& question_id, int level);
  // Idempotent: a sealed session returns its stored summary.
  nlohmann::json finalize(const std::string& session_id, const std::string& token);

  nlohmann::json record_outcome(const std::string& question_id, int outcome, const std::string& token);
  nlohmann::json summary_report(const std::string& token) const;

  // Administrative accessors (tests, tooling).
  SessionState state(const std::string& session_id) const;
  std::vector<EventRecord> events(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;
  const std::string& facilitator_token() const { return config_.facilitator_token; }

 private:
  struct Session;
  enum class Access { Participant, Facilitator };

  std::shared_ptr<Session> find(const std::string& session_id) const;
  Access authorize(const SessionState& state, const std::string& token) const;
  void require_facilitator(const std::string& token) const;
  void commit(Session& session, EventKind kind, nlohmann::json payload);
  nlohmann::json finalize_summary(const SessionState& state) const;
  nlohmann::json question_view(const SessionState& state, std::size_t index, Access access) const;
  const Question& question(const std::string& id) const;

  ServiceConfig config_;
  std::map<std::string, std::size_t> question_index_;
  std::vector<std::optional<int>> outcomes_;
  mutable std::shared_mutex mutex_;  // sessions_, open_by_participant_, outcomes_
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::string> open_by_participant_;
  std::unique_ptr<EventLog> outcome_log_;
  std::uint64_t outcome_seq_ = 0;
};

}  // namespace sej
