#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "sej/dataset.hpp"
#include "sej/error.hpp"
#include "sej/session.hpp"

using namespace sej;

namespace {

ServiceConfig config_for(const sej::testing::TempDir& dir, bool fsync = false) {
  ServiceConfig cfg;
  cfg.data_dir = dir.path();
  cfg.questions = {Question("Q1", "Politics question", Domain::Politics, 30),
                   Question("Q2", "Products question", Domain::Products, 30),
                   Question("Q3", "Sports question", Domain::Sports, 30)};
  cfg.facilitator_token = "facilitator-secret";
  cfg.fsync = fsync;
  return cfg;
}

const std::vector<std::string> kQuestions{"Q1", "Q2", "Q3"};

void complete_question(SessionService& s, const CreatedSession& c, const std::string& q, int a, int b, int cc, int d,
                       int k) {
  s.submit_response(c.session_id, c.participant_token, q, Task::A, a);
  s.submit_response(c.session_id, c.participant_token, q, Task::B, b);
  s.submit_response(c.session_id, c.participant_token, q, Task::C, cc);
  s.submit_response(c.session_id, c.participant_token, q, Task::D, d);
  s.submit_knowledge(c.session_id, c.participant_token, q, k);
}

void complete_all(SessionService& s, const CreatedSession& c) {
  complete_question(s, c, "Q1", 70, 30, 60, 80, 4);
  complete_question(s, c, "Q2", 30, 30, 60, 60, 2);
  complete_question(s, c, "Q3", 50, 50, 50, 50, 1);
}

bool contains_key(const nlohmann::json& j, const std::string& needle) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k.find(needle) != std::string::npos || contains_key(v, needle)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (contains_key(v, needle)) return true;
    }
  }
  return false;
}

}  // namespace

TEST(Session, CreateStartsAtTask1) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  EXPECT_EQ(c.state.progress.size(), 3u);
  EXPECT_EQ(c.state.progress[0].stage, Stage::Task1);
  EXPECT_EQ(c.state.expected_next().at("stage"), "Task1");
  EXPECT_EQ(c.state.expected_next().at("question_id"), "Q1");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "sessions" / (c.session_id + ".jsonl")));
  EXPECT_NE(c.participant_token, c.facilitator_token);
}

TEST(Session, CreateValidation) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  EXPECT_THROW(s.create_session("alice", {"Q1", "Q9"}), ValidationError);
  EXPECT_THROW(s.create_session("alice", {}), ValidationError);
  EXPECT_THROW(s.create_session("alice", {"Q1", "Q1"}), ValidationError);
  EXPECT_THROW(s.create_session("", {"Q1"}), ValidationError);
  s.create_session("alice", kQuestions);
  EXPECT_THROW(s.create_session("alice", kQuestions), ConflictError);
}

TEST(Session, ConcurrentDuplicateCreateExactlyOneWins) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  for (int round = 0; round < 25; ++round) {
    const std::string participant = "racer" + std::to_string(round);
    std::atomic<int> ok{0}, conflict{0};
    std::atomic<bool> go{false};
    auto attempt = [&] {
      while (!go) std::this_thread::yield();
      try {
        s.create_session(participant, kQuestions);
        ++ok;
      } catch (const ConflictError&) {
        ++conflict;
      }
    };
    std::jthread t1(attempt), t2(attempt);
    go = true;
    t1.join();
    t2.join();
    EXPECT_EQ(ok, 1);
    EXPECT_EQ(conflict, 1);
  }
}

TEST(Session, TransitionsAndEcho) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  const auto r = s.submit_response(c.session_id, c.participant_token, "Q1", Task::A, 30);
  EXPECT_EQ(r.at("next").at("stage"), "Task2");
  EXPECT_DOUBLE_EQ(r.at("accepted").at("interval_lo").get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(r.at("accepted").at("interval_hi").get<double>(), 0.35);
  EXPECT_EQ(s.state(c.session_id).progress[0].stage, Stage::Task2);
}

TEST(Session, OutOfOrderNamesExpectedTask) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  s.submit_response(c.session_id, c.participant_token, "Q1", Task::A, 30);
  try {
    s.submit_response(c.session_id, c.participant_token, "Q1", Task::C, 60);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.expected().at("stage"), "Task2");
    EXPECT_EQ(e.expected().at("question_id"), "Q1");
  }
  EXPECT_THROW(s.submit_response(c.session_id, c.participant_token, "Q2", Task::A, 30), ProtocolError);
  EXPECT_THROW(s.submit_knowledge(c.session_id, c.participant_token, "Q1", 3), ProtocolError);
  EXPECT_THROW(s.submit_response(c.session_id, c.participant_token, "Q1", Task::A, 40), ProtocolError);
  EXPECT_THROW(s.submit_response(c.session_id, c.participant_token, "Q1", Task::B, 45), ValidationError);
  EXPECT_THROW(s.submit_response(c.session_id, c.participant_token, "Q7", Task::B, 40), ValidationError);
  EXPECT_EQ(s.state(c.session_id).last_seq, 2u);
}

TEST(Session, Task4MayDifferFromTask1) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", {"Q1"});
  complete_question(s, c, "Q1", 30, 30, 60, 70, 3);
  const auto js = s.state(c.session_id).progress[0].responses;
  EXPECT_EQ(js.pA->selection(), 30);
  EXPECT_EQ(js.pD->selection(), 70);
}

TEST(Session, KnowledgeValidated) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", {"Q1"});
  for (Task t : {Task::A, Task::B, Task::C, Task::D}) s.submit_response(c.session_id, c.participant_token, "Q1", t, 50);
  EXPECT_THROW(s.submit_knowledge(c.session_id, c.participant_token, "Q1", 6), ValidationError);
  s.submit_knowledge(c.session_id, c.participant_token, "Q1", 5);
  EXPECT_THROW(s.submit_knowledge(c.session_id, c.participant_token, "Q1", 4), ProtocolError);
}

TEST(Session, FinalizeIncompleteListsPending) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  complete_question(s, c, "Q1", 70, 30, 60, 80, 4);
  try {
    s.finalize(c.session_id, c.participant_token);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("Q2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("Q3"), std::string::npos);
    EXPECT_EQ(e.expected().at("pending_questions").size(), 2u);
  }
}

TEST(Session, FinalizeSummaryAndIdempotence) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  complete_all(s, c);
  const auto summary = s.finalize(c.session_id, c.participant_token);
  ASSERT_EQ(summary.at("questions").size(), 3u);
  int verdicts = 0, recompositions = 0;
  for (const auto& q : summary.at("questions")) {
    verdicts += q.contains("verdict_initial");
    recompositions += static_cast<int>(q.at("recompositions").size());
  }
  EXPECT_EQ(verdicts, 3);
  EXPECT_EQ(recompositions, 12);
  EXPECT_EQ(s.finalize(c.session_id, c.participant_token), summary);
  EXPECT_EQ(s.state(c.session_id).last_seq, 1u + 15u + 1u);
  EXPECT_THROW(s.submit_response(c.session_id, c.participant_token, "Q1", Task::A, 30), ProtocolError);
  EXPECT_NO_THROW(s.create_session("alice", kQuestions));
}

TEST(Session, ExportIngestRoundTrip) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  complete_all(s, c);
  const auto summary = s.finalize(c.session_id, c.participant_token);
  const auto ds = ingest_text(summary.at("judgments_csv").get<std::string>());
  EXPECT_EQ(ds.sets, s.state(c.session_id).judgment_sets());
  const auto file = dir.path() / "exports" / (c.session_id + ".csv");
  EXPECT_EQ(ingest(file.string()).sets, ds.sets);
}

TEST(Session, ReplayReconstructsStateAndSurvivesRestart) {
  sej::testing::TempDir dir;
  std::vector<std::pair<std::string, SessionState>> expected;
  {
    SessionService s(config_for(dir, true));
    const auto a = s.create_session("alice", kQuestions);
    complete_all(s, a);
    s.finalize(a.session_id, a.participant_token);
    const auto b = s.create_session("bob", {"Q3", "Q1"});
    s.submit_response(b.session_id, b.participant_token, "Q3", Task::A, 20);
    s.submit_response(b.session_id, b.participant_token, "Q3", Task::B, 90);
    for (const auto& id : s.session_ids()) {
      expected.emplace_back(id, s.state(id));
      EXPECT_EQ(replay(s.events(id)), s.state(id));
    }
  }
  SessionService restarted(config_for(dir));
  for (const auto& [id, state] : expected) EXPECT_EQ(restarted.state(id), state);
  EXPECT_THROW(restarted.create_session("bob", kQuestions), ConflictError);
  EXPECT_NO_THROW(restarted.create_session("alice", kQuestions));
}

TEST(Session, TornFinalLineIsIgnoredOnRecovery) {
  sej::testing::TempDir dir;
  std::string id;
  SessionState before;
  {
    SessionService s(config_for(dir));
    const auto c = s.create_session("alice", kQuestions);
    s.submit_response(c.session_id, c.participant_token, "Q1", Task::A, 20);
    id = c.session_id;
    before = s.state(id);
  }
  std::ofstream(dir.path() / "sessions" / (id + ".jsonl"), std::ios::app) << "{\"seq\":3,\"kind";
  SessionService restarted(config_for(dir));
  EXPECT_EQ(restarted.state(id), before);
}

TEST(Session, ReplayRejectsGapsAndSkippedTasks) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  s.submit_response(c.session_id, c.participant_token, "Q1", Task::A, 20);
  auto events = s.events(c.session_id);
  auto gap = events;
  gap[1].seq = 5;
  EXPECT_THROW(replay(gap), ValidationError);
  auto skipped = events;
  skipped[1].payload["task"] = "Task2";
  EXPECT_THROW(replay(skipped), ProtocolError);
}

TEST(Session, ViewsAreTokenScoped) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  const auto other = s.create_session("bob", kQuestions);
  complete_question(s, c, "Q1", 70, 30, 60, 80, 4);
  s.submit_response(c.session_id, c.participant_token, "Q2", Task::A, 20);

  const auto pv = s.view(c.session_id, c.participant_token);
  EXPECT_EQ(pv.at("view"), "participant");
  EXPECT_FALSE(contains_key(pv, "recomposition"));
  EXPECT_FALSE(contains_key(pv, "verdict"));

  const auto fv = s.view(c.session_id, c.facilitator_token);
  EXPECT_EQ(fv.at("view"), "facilitator");
  EXPECT_TRUE(fv.at("questions")[0].contains("recompositions"));
  EXPECT_FALSE(fv.at("questions")[1].contains("recompositions"));
  EXPECT_TRUE(s.view(c.session_id, "facilitator-secret").at("questions")[0].contains("recompositions"));

  try {
    s.view(c.session_id, "");
    FAIL();
  } catch (const AuthError& e) {
    EXPECT_TRUE(e.missing_token());
  }
  try {
    s.view(c.session_id, other.participant_token);
    FAIL();
  } catch (const AuthError& e) {
    EXPECT_FALSE(e.missing_token());
  }
  EXPECT_THROW(s.submit_response(c.session_id, other.participant_token, "Q2", Task::B, 20), AuthError);
  EXPECT_THROW(s.view("nope", c.participant_token), NotFoundError);
}

TEST(Session, OutcomesAreImmutableAndPersisted) {
  sej::testing::TempDir dir;
  {
    SessionService s(config_for(dir));
    EXPECT_THROW(s.record_outcome("Q1", 1, "wrong"), AuthError);
    EXPECT_THROW(s.record_outcome("Q9", 1, "facilitator-secret"), NotFoundError);
    EXPECT_THROW(s.record_outcome("Q1", 3, "facilitator-secret"), ValidationError);
    EXPECT_EQ(s.record_outcome("Q1", 1, "facilitator-secret").at("recorded"), true);
    EXPECT_THROW(s.record_outcome("Q1", 1, "facilitator-secret"), ConflictError);
  }
  SessionService restarted(config_for(dir));
  EXPECT_THROW(restarted.record_outcome("Q1", 0, "facilitator-secret"), ConflictError);
  EXPECT_NO_THROW(restarted.record_outcome("Q2", 0, "facilitator-secret"));
}

TEST(Session, SummaryReportGatesScores) {
  sej::testing::TempDir dir;
  SessionService s(config_for(dir));
  const auto c = s.create_session("alice", kQuestions);
  complete_all(s, c);
  s.finalize(c.session_id, c.participant_token);
  EXPECT_THROW(s.summary_report(c.participant_token), AuthError);
  const auto before = s.summary_report("facilitator-secret");
  EXPECT_TRUE(before.at("scores").empty());
  EXPECT_TRUE(before.contains("scores_notice"));
  EXPECT_EQ(before.at("consistency").at("initial").at("total"), 3);
  EXPECT_EQ(before.at("recomposition").size(), 3u);
  s.record_outcome("Q1", 1, "facilitator-secret");
  const auto after = s.summary_report("facilitator-secret");
  ASSERT_EQ(after.at("scores").size(), 1u);
  EXPECT_NEAR(after.at("scores")[0].at("mean_point_brier").at("direct-pA").get<double>(), 0.09, 1e-12);
  EXPECT_FALSE(after.contains("scores_notice"));
}
