#include "sej/session.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <set>

#include "sej/consistency.hpp"
#include "sej/csv.hpp"
#include "sej/dataset.hpp"
#include "sej/error.hpp"
#include "sej/rng.hpp"
#include "sej/scoring.hpp"

namespace sej {

namespace fs = std::filesystem;

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Task1: return "Task1";
    case Stage::Task2: return "Task2";
    case Stage::Task3: return "Task3";
    case Stage::Task4: return "Task4";
    case Stage::Knowledge: return "Knowledge";
    case Stage::Done: break;
  }
  return "Done";
}

std::optional<Task> task_at(Stage stage) {
  switch (stage) {
    case Stage::Task1: return Task::A;
    case Stage::Task2: return Task::B;
    case Stage::Task3: return Task::C;
    case Stage::Task4: return Task::D;
    default: return std::nullopt;
  }
}

namespace {

Stage stage_for(Task task) {
  switch (task) {
    case Task::A: return Stage::Task1;
    case Task::B: return Stage::Task2;
    case Task::C: return Stage::Task3;
    case Task::D: break;
  }
  return Stage::Task4;
}

Stage next_stage(Stage stage) { return static_cast<Stage>(static_cast<int>(stage) + 1); }

}  // namespace

std::optional<Task> parse_task_field(const nlohmann::json& value) {
  if (value.is_number_integer()) {
    const int n = value.get<int>();
    if (n >= 1 && n <= 4) return static_cast<Task>(n - 1);
    return std::nullopt;
  }
  if (!value.is_string()) return std::nullopt;
  const auto text = value.get<std::string>();
  if (auto t = parse_task(text)) return t;
  std::string digits = text.rfind("Task", 0) == 0 ? text.substr(4) : text;
  if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '4') return static_cast<Task>(digits[0] - '1');
  return std::nullopt;
}

std::optional<std::size_t> SessionState::current() const {
  for (std::size_t i = 0; i < progress.size(); ++i) {
    if (progress[i].stage != Stage::Done) return i;
  }
  return std::nullopt;
}

std::vector<JudgmentSet> SessionState::judgment_sets() const {
  std::vector<JudgmentSet> out;
  for (const auto& p : progress) {
    if (p.stage == Stage::Done) out.push_back(p.responses);
  }
  return out;
}

nlohmann::json SessionState::expected_next() const {
  if (finalized) return {{"stage", "Sealed"}};
  const auto idx = current();
  if (!idx) return {{"stage", "Done"}, {"action", "finalize"}};
  const auto& p = progress[*idx];
  nlohmann::json j = {{"question_id", question_order[*idx]}, {"stage", std::string(stage_name(p.stage))}};
  if (auto t = task_at(p.stage)) j["task"] = std::string(task_name(*t));
  return j;
}

std::string_view event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::SessionCreated: return "session-created";
    case EventKind::TaskSubmitted: return "task-submitted";
    case EventKind::KnowledgeSubmitted: return "knowledge-submitted";
    case EventKind::SessionFinalized: break;
  }
  return "session-finalized";
}

nlohmann::json EventRecord::to_json() const {
  return {{"seq", seq},
          {"timestamp", timestamp},
          {"session_id", session_id},
          {"kind", std::string(event_kind_name(kind))},
          {"payload", payload}};
}

EventRecord EventRecord::from_json(const nlohmann::json& j) {
  EventRecord e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.session_id = j.at("session_id").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  bool known = false;
  for (EventKind k : {EventKind::SessionCreated, EventKind::TaskSubmitted, EventKind::KnowledgeSubmitted,
                      EventKind::SessionFinalized}) {
    if (kind == event_kind_name(k)) {
      e.kind = k;
      known = true;
    }
  }
  if (!known) throw ValidationError("unknown event kind " + kind);
  e.payload = j.at("payload");
  return e;
}

void apply_event(SessionState& state, const EventRecord& event) {
  if (event.seq != state.last_seq + 1) {
    throw ValidationError("event sequence gap: expected " + std::to_string(state.last_seq + 1) + ", got " +
                          std::to_string(event.seq));
  }
  if (event.kind != EventKind::SessionCreated && event.session_id != state.session_id) {
    throw ValidationError("event belongs to session " + event.session_id);
  }
  const auto& payload = event.payload;
  SessionState next = state;

  try {
    switch (event.kind) {
      case EventKind::SessionCreated: {
        if (state.last_seq != 0) throw ValidationError("session-created must be the first event");
        next.session_id = event.session_id;
        next.participant_id = payload.at("participant_id").get<std::string>();
        next.question_order = payload.at("question_ids").get<std::vector<std::string>>();
        next.participant_token_hash = payload.at("participant_token_hash").get<std::string>();
        next.facilitator_token_hash = payload.at("facilitator_token_hash").get<std::string>();
        next.created_at = event.timestamp;
        next.progress.clear();
        for (const auto& q : next.question_order) {
          next.progress.push_back({Stage::Task1, JudgmentSet{next.participant_id, q, {}, {}, {}, {}, {}}});
        }
        break;
      }
      case EventKind::TaskSubmitted:
      case EventKind::KnowledgeSubmitted: {
        if (state.finalized) throw ProtocolError("session is sealed", state.expected_next());
        const auto question_id = payload.at("question_id").get<std::string>();
        const auto it = std::find(state.question_order.begin(), state.question_order.end(), question_id);
        if (it == state.question_order.end()) {
          throw ValidationError("question " + question_id + " is not part of this session");
        }
        const auto idx = static_cast<std::size_t>(it - state.question_order.begin());
        const auto cur = state.current();
        auto& p = next.progress[idx];

        if (event.kind == EventKind::TaskSubmitted) {
          const auto task = parse_task_field(payload.at("task"));
          if (!task) throw ValidationError("task must be one of Task1..Task4");
          if (p.responses.response(*task)) {
            throw ProtocolError("task " + std::string(stage_name(stage_for(*task))) + " for question " +
                                    question_id + " was already submitted",
                                state.expected_next());
          }
          if (!cur || *cur != idx || p.stage != stage_for(*task)) {
            throw ProtocolError("out-of-order submission", state.expected_next());
          }
          p.responses.response(*task) = IntervalResponse::from_selection(payload.at("selection").get<int>());
          p.stage = next_stage(p.stage);
        } else {
          if (p.responses.knowledge) {
            throw ProtocolError("knowledge for question " + question_id + " was already submitted",
                                state.expected_next());
          }
          if (!cur || *cur != idx || p.stage != Stage::Knowledge) {
            throw ProtocolError("out-of-order submission", state.expected_next());
          }
          p.responses.knowledge = KnowledgeLevel(payload.at("level").get<int>());
          p.stage = Stage::Done;
        }
        break;
      }
      case EventKind::SessionFinalized: {
        if (state.finalized) throw ProtocolError("session is already sealed", state.expected_next());
        if (!state.all_done()) {
          nlohmann::json pending = nlohmann::json::array();
          for (std::size_t i = 0; i < state.progress.size(); ++i) {
            if (state.progress[i].stage != Stage::Done) pending.push_back(state.question_order[i]);
          }
          std::string list;
          for (const auto& q : pending) list += (list.empty() ? "" : ", ") + q.get<std::string>();
          auto expected = state.expected_next();
          expected["pending_questions"] = pending;
          throw ProtocolError("session incomplete; pending questions: " + list, expected);
        }
        next.finalized = true;
        break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed event payload: ") + e.what());
  }
  next.last_seq = event.seq;
  state = std::move(next);
}

SessionState replay(const std::vector<EventRecord>& events) {
  SessionState state;
  for (const auto& e : events) apply_event(state, e);
  return state;
}

// EventLog -----------------------------------------------------------------

EventLog::EventLog(fs::path path, bool fsync_on_append) : path_(std::move(path)), fsync_(fsync_on_append) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw std::runtime_error("cannot open event log " + path_.string() + ": " + std::strerror(errno));
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::append(const nlohmann::json& record) {
  const std::string line = record.dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("event log write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  if (fsync_ && ::fsync(fd_) != 0) {
    throw std::runtime_error("event log fsync failed: " + std::string(std::strerror(errno)));
  }
}

std::vector<nlohmann::json> EventLog::read_all(const fs::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception&) {
      // A torn final line from a crash mid-append is dropped; anything else is corruption.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ValidationError("corrupt event log " + path.string());
    }
  }
  return out;
}

// SessionService -------------------------------------------------------------

struct SessionService::Session {
  std::mutex mutex;
  SessionState state;
  std::unique_ptr<EventLog> log;
};

namespace {

std::string random_hex(int words) {
  static thread_local std::random_device device;
  std::string out;
  for (int i = 0; i < words; ++i) {
    const std::uint64_t v = (static_cast<std::uint64_t>(device()) << 32) ^ device();
    out += hex64(v);
  }
  return out;
}

std::string token_hash(const std::string& token) { return hex64(fnv1a64(token)); }

nlohmann::json verdict_json(const ConsistencyVerdict& v) {
  return {{"quadrant", std::string(quadrant_name(v.quadrant))},
          {"consistent", v.consistent ? nlohmann::json(*v.consistent) : nlohmann::json(nullptr)}};
}

nlohmann::json recompositions_json(const JudgmentSet& js, const SigmaMap& map) {
  nlohmann::json out = nlohmann::json::object();
  const double pB = midpoint(*js.pB).value();
  const double pC = midpoint(*js.pC).value();
  for (RuleTag tag : kAllRules) {
    const auto rule = tag == RuleTag::ARA ? RecompositionRule::ara(sigma2_for(*js.knowledge, map))
                                          : RecompositionRule::make(tag, std::nullopt);
    nlohmann::json entry = {{"estimate", rule.apply(pB, pC)}, {"path", "midpoint"}};
    if (rule.sigma2()) entry["sigma2"] = *rule.sigma2();
    out[std::string(rule_name(tag))] = entry;
  }
  return out;
}

}  // namespace

SessionService::SessionService(ServiceConfig config) : config_(std::move(config)) {
  if (config_.facilitator_token.empty()) config_.facilitator_token = random_hex(2);
  for (std::size_t i = 0; i < config_.questions.size(); ++i) {
    if (!question_index_.emplace(config_.questions[i].question_id(), i).second) {
      throw ValidationError("duplicate question " + config_.questions[i].question_id());
    }
    outcomes_.push_back(config_.questions[i].outcome());
  }
  fs::create_directories(config_.data_dir / "sessions");
  fs::create_directories(config_.data_dir / "exports");

  const auto outcome_path = config_.data_dir / "outcomes.jsonl";
  for (const auto& j : EventLog::read_all(outcome_path)) {
    const auto id = j.at("question_id").get<std::string>();
    auto it = question_index_.find(id);
    if (it == question_index_.end()) throw ValidationError("outcome log references unknown question " + id);
    outcomes_[it->second] = j.at("outcome").get<int>();
    outcome_seq_ = std::max(outcome_seq_, j.at("seq").get<std::uint64_t>());
  }
  outcome_log_ = std::make_unique<EventLog>(outcome_path, config_.fsync);

  std::vector<fs::path> logs;
  for (const auto& entry : fs::directory_iterator(config_.data_dir / "sessions")) {
    if (entry.path().extension() == ".jsonl") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::vector<EventRecord> events;
    for (const auto& j : EventLog::read_all(path)) events.push_back(EventRecord::from_json(j));
    if (events.empty()) continue;
    auto session = std::make_shared<Session>();
    session->state = replay(events);
    session->log = std::make_unique<EventLog>(path, config_.fsync);
    if (!session->state.finalized) {
      open_by_participant_[session->state.participant_id] = session->state.session_id;
    }
    sessions_[session->state.session_id] = std::move(session);
  }
}

SessionService::~SessionService() = default;

const Question& SessionService::question(const std::string& id) const {
  return config_.questions[question_index_.at(id)];
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + session_id);
  return it->second;
}

SessionService::Access SessionService::authorize(const SessionState& state, const std::string& token) const {
  if (token.empty()) throw AuthError("capability token required", true);
  if (token == config_.facilitator_token) return Access::Facilitator;
  const auto h = token_hash(token);
  if (h == state.facilitator_token_hash) return Access::Facilitator;
  if (h == state.participant_token_hash) return Access::Participant;
  throw AuthError("token does not grant access to session " + state.session_id, false);
}

void SessionService::require_facilitator(const std::string& token) const {
  if (token.empty()) throw AuthError("facilitator token required", true);
  if (token != config_.facilitator_token) throw AuthError("facilitator token required", false);
}

void SessionService::commit(Session& session, EventKind kind, nlohmann::json payload) {
  EventRecord event;
  event.seq = session.state.last_seq + 1;
  event.timestamp = utc_timestamp();
  event.session_id = session.state.session_id;
  event.kind = kind;
  event.payload = std::move(payload);
  SessionState next = session.state;
  apply_event(next, event);
  session.log->append(event.to_json());
  session.state = std::move(next);
}

CreatedSession SessionService::create_session(const std::string& participant_id,
                                              const std::vector<std::string>& question_ids) {
  if (participant_id.empty()) throw ValidationError("participant_id must not be empty");
  if (question_ids.empty()) throw ValidationError("a session needs at least one question");
  std::set<std::string> unique;
  for (const auto& q : question_ids) {
    if (!question_index_.count(q)) throw ValidationError("unknown question_id " + q);
    if (!unique.insert(q).second) throw ValidationError("question " + q + " listed twice");
  }

  std::unique_lock lock(mutex_);
  if (auto it = open_by_participant_.find(participant_id); it != open_by_participant_.end()) {
    throw ConflictError("participant " + participant_id + " already has open session " + it->second);
  }
  std::string session_id;
  do {
    session_id = "s-" + random_hex(1);
  } while (sessions_.count(session_id));

  CreatedSession created;
  created.session_id = session_id;
  created.participant_token = random_hex(2);
  created.facilitator_token = random_hex(2);

  auto session = std::make_shared<Session>();
  session->state.session_id = session_id;
  session->log = std::make_unique<EventLog>(config_.data_dir / "sessions" / (session_id + ".jsonl"), config_.fsync);
  commit(*session, EventKind::SessionCreated,
         {{"participant_id", participant_id},
          {"question_ids", question_ids},
          {"participant_token_hash", token_hash(created.participant_token)},
          {"facilitator_token_hash", token_hash(created.facilitator_token)}});
  created.state = session->state;
  sessions_[session_id] = session;
  open_by_participant_[participant_id] = session_id;
  return created;
}

nlohmann::json SessionService::question_view(const SessionState& state, std::size_t index, Access access) const {
  const auto& p = state.progress[index];
  const auto& q = question(state.question_order[index]);
  nlohmann::json responses = nlohmann::json::object();
  for (Task t : {Task::A, Task::B, Task::C, Task::D}) {
    if (const auto& r = p.responses.response(t)) responses["p" + std::string(task_name(t))] = *r;
  }
  nlohmann::json j = {{"question_id", q.question_id()},
                      {"text", q.text()},
                      {"domain_tag", std::string(domain_name(q.domain()))},
                      {"stage", std::string(stage_name(p.stage))},
                      {"responses", responses},
                      {"knowledge", p.responses.knowledge ? nlohmann::json(p.responses.knowledge->level())
                                                          : nlohmann::json(nullptr)}};
  if (access == Access::Facilitator && p.stage == Stage::Done) {
    j["verdict_initial"] = verdict_json(classify(p.responses, false));
    j["verdict_revised"] = verdict_json(classify(p.responses, true));
    j["recompositions"] = recompositions_json(p.responses, config_.sigma_map);
  }
  return j;
}

nlohmann::json SessionService::view(const std::string& session_id, const std::string& token) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  const auto& state = session->state;
  const auto access = authorize(state, token);
  nlohmann::json questions = nlohmann::json::array();
  for (std::size_t i = 0; i < state.progress.size(); ++i) questions.push_back(question_view(state, i, access));
  return {{"session_id", state.session_id},
          {"participant_id", state.participant_id},
          {"view", access == Access::Facilitator ? "facilitator" : "participant"},
          {"finalized", state.finalized},
          {"question_order", state.question_order},
          {"questions", questions},
          {"next", state.expected_next()},
          {"seq", state.last_seq}};
}

nlohmann::json SessionService::submit_response(const std::string& session_id, const std::string& token,
                                               const std::string& question_id, Task task, int selection) {
  const auto interval = IntervalResponse::from_selection(selection);
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  authorize(session->state, token);
  commit(*session, EventKind::TaskSubmitted,
         {{"question_id", question_id}, {"task", std::string(stage_name(stage_for(task)))}, {"selection", selection}});
  return {{"accepted",
           {{"question_id", question_id},
            {"task", std::string(stage_name(stage_for(task)))},
            {"selection", selection},
            {"interval_lo", interval.lo().value()},
            {"interval_hi", interval.hi().value()}}},
          {"next", session->state.expected_next()},
          {"seq", session->state.last_seq}};
}

nlohmann::json SessionService::submit_knowledge(const std::string& session_id, const std::string& token,
                                                const std::string& question_id, int level) {
  KnowledgeLevel{level};
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  authorize(session->state, token);
  commit(*session, EventKind::KnowledgeSubmitted, {{"question_id", question_id}, {"level", level}});
  return {{"accepted", {{"question_id", question_id}, {"level", level}}},
          {"next", session->state.expected_next()},
          {"seq", session->state.last_seq}};
}

nlohmann::json SessionService::finalize_summary(const SessionState& state) const {
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& js : state.judgment_sets()) {
    questions.push_back({{"question_id", js.question_id},
                         {"verdict_initial", verdict_json(classify(js, false))},
                         {"verdict_revised", verdict_json(classify(js, true))},
                         {"recompositions", recompositions_json(js, config_.sigma_map)}});
  }
  return {{"session_id", state.session_id},
          {"participant_id", state.participant_id},
          {"sealed", state.finalized},
          {"questions", questions},
          {"judgments_csv", export_judgments_csv(state.judgment_sets())}};
}

nlohmann::json SessionService::finalize(const std::string& session_id, const std::string& token) {
  auto session = find(session_id);
  nlohmann::json summary;
  std::string participant;
  {
    std::lock_guard lock(session->mutex);
    authorize(session->state, token);
    if (session->state.finalized) return finalize_summary(session->state);
    commit(*session, EventKind::SessionFinalized, nlohmann::json::object());
    summary = finalize_summary(session->state);
    participant = session->state.participant_id;
    write_file((config_.data_dir / "exports" / (session_id + ".csv")).string(),
               summary.at("judgments_csv").get<std::string>());
  }
  std::unique_lock lock(mutex_);
  if (auto it = open_by_participant_.find(participant); it != open_by_participant_.end() && it->second == session_id) {
    open_by_participant_.erase(it);
  }
  return summary;
}

nlohmann::json SessionService::record_outcome(const std::string& question_id, int outcome, const std::string& token) {
  require_facilitator(token);
  if (outcome != 0 && outcome != 1) throw ValidationError("outcome must be 0 or 1");
  std::unique_lock lock(mutex_);
  auto it = question_index_.find(question_id);
  if (it == question_index_.end()) throw NotFoundError("unknown question " + question_id);
  if (outcomes_[it->second]) throw ConflictError("outcome already recorded for question " + question_id);
  const auto seq = outcome_seq_ + 1;
  outcome_log_->append({{"seq", seq}, {"timestamp", utc_timestamp()}, {"question_id", question_id}, {"outcome", outcome}});
  outcome_seq_ = seq;
  outcomes_[it->second] = outcome;
  return {{"question_id", question_id}, {"outcome", outcome}, {"recorded", true}};
}

nlohmann::json SessionService::summary_report(const std::string& token) const {
  require_facilitator(token);
  std::vector<std::shared_ptr<Session>> sessions;
  std::map<std::string, int> outcomes;
  {
    std::shared_lock lock(mutex_);
    for (const auto& [id, s] : sessions_) sessions.push_back(s);
    for (const auto& [id, idx] : question_index_) {
      if (outcomes_[idx]) outcomes[id] = *outcomes_[idx];
    }
  }
  std::vector<JudgmentSet> done_sets;
  std::vector<JudgmentSet> finalized_sets;
  int finalized_sessions = 0;
  for (const auto& s : sessions) {
    std::lock_guard lock(s->mutex);
    auto sets = s->state.judgment_sets();
    if (s->state.finalized) {
      ++finalized_sessions;
      finalized_sets.insert(finalized_sets.end(), sets.begin(), sets.end());
    }
    done_sets.insert(done_sets.end(), sets.begin(), sets.end());
  }

  nlohmann::json report;
  report["sessions"] = sessions.size();
  report["finalized_sessions"] = finalized_sessions;
  report["completed_questions"] = done_sets.size();
  report["consistency"] = {{"initial", quadrant_table(done_sets, false).to_json()},
                           {"revised", quadrant_table(done_sets, true).to_json()},
                           {"revision", revision_analysis(done_sets).to_json()}};
  try {
    report["consistency"]["histogram"] = inconsistency_histogram(finalized_sets).to_json();
  } catch (const ValidationError& e) {
    report["consistency"]["histogram"] = {{"notice", e.what()}};
  }

  // Mean midpoint-path recomposition per question and rule.
  std::map<std::string, std::map<std::string, std::pair<double, int>>> means;
  for (const auto& js : done_sets) {
    const auto recomposed = recompositions_json(js, config_.sigma_map);
    for (const auto& [rule, entry] : recomposed.items()) {
      auto& acc = means[js.question_id][rule];
      acc.first += entry.at("estimate").get<double>();
      ++acc.second;
    }
  }
  nlohmann::json recomposition = nlohmann::json::array();
  for (const auto& [q, rules] : means) {
    nlohmann::json per_rule = nlohmann::json::object();
    for (const auto& [rule, acc] : rules) per_rule[rule] = acc.first / acc.second;
    recomposition.push_back({{"question_id", q}, {"n", rules.begin()->second.second}, {"mean_estimate", per_rule}});
  }
  report["recomposition"] = recomposition;

  nlohmann::json scores = nlohmann::json::array();
  if (outcomes.empty()) {
    report["scores"] = scores;
    report["scores_notice"] = "no outcomes recorded yet; scores unavailable";
    return report;
  }
  for (const auto& [qid, outcome] : outcomes) {
    std::map<std::string, std::pair<double, int>> per_kind;
    for (const auto& js : done_sets) {
      if (js.question_id != qid) continue;
      per_kind["direct-pA"].first += brier(midpoint(*js.pA).value(), outcome);
      per_kind["direct-pD"].first += brier(midpoint(*js.pD).value(), outcome);
      ++per_kind["direct-pA"].second;
      ++per_kind["direct-pD"].second;
      const auto recomposed = recompositions_json(js, config_.sigma_map);
      for (const auto& [rule, entry] : recomposed.items()) {
        per_kind[rule].first += brier(entry.at("estimate").get<double>(), outcome);
        ++per_kind[rule].second;
      }
    }
    nlohmann::json mean_brier = nlohmann::json::object();
    int n = 0;
    for (const auto& [kind, acc] : per_kind) {
      mean_brier[kind] = acc.first / acc.second;
      n = acc.second;
    }
    scores.push_back({{"question_id", qid}, {"outcome", outcome}, {"n", n}, {"mean_point_brier", mean_brier}});
  }
  report["scores"] = scores;
  return report;
}

SessionState SessionService::state(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return session->state;
}

std::vector<EventRecord> SessionService::events(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  std::vector<EventRecord> out;
  for (const auto& j : EventLog::read_all(session->log->path())) out.push_back(EventRecord::from_json(j));
  return out;
}

std::vector<std::string> SessionService::session_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace sej
