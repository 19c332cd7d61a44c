#pragma once

// Shared designed datasets and scratch-directory helpers for the unit and
// acceptance tests.

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sej/judgment.hpp"

namespace sej::testing {

inline JudgmentSet make_set(std::string participant, std::string question, int a, int b, int c, int d,
                            int knowledge) {
  JudgmentSet js;
  js.participant_id = std::move(participant);
  js.question_id = std::move(question);
  js.pA = IntervalResponse::from_selection(a);
  js.pB = IntervalResponse::from_selection(b);
  js.pC = IntervalResponse::from_selection(c);
  js.pD = IntervalResponse::from_selection(d);
  js.knowledge = KnowledgeLevel(knowledge);
  return js;
}

inline std::string pid(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%03d", i);
  return buf;
}

struct Fixture {
  std::vector<JudgmentSet> sets;
  std::map<std::string, int> outcomes;
};

// Four questions, outcomes 1,1,0,0. Every participant reports pB = 20% and
// pC = 80%, so EUM predicts "act" with certainty and is wrong on half the
// questions. Direct answers hover around 1/2.
inline Fixture eum_extremity_fixture(int participants = 25) {
  Fixture f;
  f.outcomes = {{"Q1", 1}, {"Q2", 1}, {"Q3", 0}, {"Q4", 0}};
  for (int i = 0; i < participants; ++i) {
    int q = 0;
    for (const auto& [question, outcome] : f.outcomes) {
      const int a = ((i + q) % 2 == 0) ? 40 : 60;
      f.sets.push_back(make_set(pid(i), question, a, 20, 80, a, 1 + (i % 5)));
      ++q;
    }
  }
  return f;
}

// Direct answers cycle through the whole 0..100 scale regardless of the
// outcome, while pB and pC are close, so that ARA (with a large sigma2) stays
// near 1/2. Direct scores average about 1/3, ARA's about 1/4.
inline Fixture noisy_direct_fixture(int participants = 22) {
  Fixture f;
  f.outcomes = {{"Q1", 1}, {"Q2", 0}, {"Q3", 1}, {"Q4", 0}, {"Q5", 1}};
  for (int i = 0; i < participants; ++i) {
    int q = 0;
    for (const auto& [question, outcome] : f.outcomes) {
      const int a = ((i * 3 + q * 7) % 11) * 10;
      const bool up = (i + q) % 2 == 0;
      f.sets.push_back(make_set(pid(i), question, a, up ? 40 : 50, up ? 50 : 40, a, 1));
      ++q;
    }
  }
  return f;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sej-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace sej::testing
