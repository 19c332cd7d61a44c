#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "sej/consistency.hpp"
#include "sej/csv.hpp"
#include "sej/error.hpp"

using namespace sej;
using sej::testing::make_set;
using sej::testing::pid;

namespace {

double round1(double pct) { return std::round(pct * 10.0) / 10.0; }

}  // namespace

TEST(Classify, Examples) {
  auto v = classify(make_set("p", "q", 70, 30, 60, 70, 3), false);
  EXPECT_EQ(v.quadrant, Quadrant::CHigh);
  EXPECT_EQ(v.consistent, true);
  v = classify(make_set("p", "q", 30, 30, 60, 30, 3), false);
  EXPECT_EQ(v.quadrant, Quadrant::ILow);
  EXPECT_EQ(v.consistent, false);
  for (auto [b, c] : {std::pair{20, 70}, {80, 10}}) {
    v = classify(make_set("p", "q", 50, b, c, 50, 3), false);
    EXPECT_EQ(v.quadrant, Quadrant::Borderline);
    EXPECT_FALSE(v.consistent.has_value());
  }
}

TEST(Classify, AllQuadrantsAndTies) {
  EXPECT_EQ(classify(make_set("p", "q", 20, 60, 30, 20, 1), false).quadrant, Quadrant::CLow);
  EXPECT_EQ(classify(make_set("p", "q", 80, 60, 30, 80, 1), false).quadrant, Quadrant::IHigh);
  EXPECT_EQ(classify(make_set("p", "q", 80, 40, 40, 80, 1), false).quadrant, Quadrant::Borderline);
  EXPECT_TRUE(classify(make_set("p", "q", 80, 40, 40, 80, 1), false).counts_as_consistent(TiePolicy::Consistent));
  EXPECT_FALSE(classify(make_set("p", "q", 80, 40, 40, 80, 1), false).counts_as_consistent(TiePolicy::Separate));
}

TEST(Classify, RevisedUsesPd) {
  const auto js = make_set("p", "q", 30, 30, 60, 70, 3);
  EXPECT_EQ(classify(js, false).quadrant, Quadrant::ILow);
  EXPECT_EQ(classify(js, true).quadrant, Quadrant::CHigh);
}

TEST(Classify, IncompleteSetRejected) {
  auto js = make_set("p", "q", 30, 30, 60, 70, 3);
  js.pC.reset();
  EXPECT_THROW(classify(js, false), ValidationError);
}

TEST(Classify, DependsOnlyOnSigns) {
  for (int a = 0; a <= 100; a += 10) {
    for (int b = 0; b <= 80; b += 10) {
      for (int c = 0; c <= 80; c += 10) {
        const auto base = classify(make_set("p", "q", a, b, c, a, 2), false);
        const auto shifted = classify(make_set("p", "q", a, b + 20, c + 20, a, 2), false);
        EXPECT_EQ(base.quadrant, shifted.quadrant);
      }
    }
  }
}

TEST(Classify, RevisedDiffersOnlyAcrossHalf) {
  for (int a = 0; a <= 100; a += 10) {
    for (int d = 0; d <= 100; d += 10) {
      const auto js = make_set("p", "q", a, 30, 60, d, 2);
      const bool same_side = (a < 50 && d < 50) || (a > 50 && d > 50);
      if (same_side) EXPECT_EQ(classify(js, false).quadrant, classify(js, true).quadrant);
    }
  }
}

TEST(QuadrantTable, ProportionsSumToOne) {
  std::vector<JudgmentSet> sets;
  for (int a = 0; a <= 100; a += 10) {
    for (int b = 0; b <= 100; b += 20) sets.push_back(make_set(pid(a), "Q" + std::to_string(b), a, b, 50, a, 1));
  }
  const auto t = quadrant_table(sets, false);
  double total = 0;
  int counted = 0;
  for (auto [q, n] : t.counts) {
    total += t.proportion(q);
    counted += n;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(counted, static_cast<int>(sets.size()));
  EXPECT_EQ(split_lines(t.to_csv()).front(), "quadrant,count,proportion");
  EXPECT_EQ(t.to_json().at("total"), sets.size());
}

TEST(Histogram, BucketExamples) {
  std::vector<JudgmentSet> sets = {
      make_set("A", "Q1", 70, 30, 60, 70, 3),  // C-high
      make_set("A", "Q2", 20, 60, 30, 20, 3),  // C-low
      make_set("A", "Q3", 70, 30, 60, 70, 3),  // C-high
      make_set("B", "Q1", 30, 30, 60, 30, 3),  // I-low
      make_set("B", "Q2", 70, 30, 60, 70, 3),  // C-high
      make_set("B", "Q3", 80, 60, 30, 80, 3),  // I-high
  };
  const auto h = inconsistency_histogram(sets);
  EXPECT_EQ(h.questions_per_participant, 3);
  ASSERT_EQ(h.participants_by_count.size(), 4u);
  EXPECT_EQ(h.participants_by_count[0], 1);
  EXPECT_EQ(h.participants_by_count[2], 1);
}

TEST(Histogram, BorderlineCountsAsConsistent) {
  const auto h = inconsistency_histogram({make_set("A", "Q1", 50, 30, 60, 50, 3)});
  EXPECT_EQ(h.participants_by_count[0], 1);
}

TEST(Histogram, RaggedGroupingRejected) {
  EXPECT_THROW(inconsistency_histogram({make_set("A", "Q1", 70, 30, 60, 70, 3), make_set("A", "Q2", 70, 30, 60, 70, 3),
                                        make_set("B", "Q1", 70, 30, 60, 70, 3)}),
               ValidationError);
}

// 96 participants with 35/41/15/5 of them inconsistent on 0/1/2/3 questions.
TEST(Histogram, ReproducesDesignedProportions) {
  std::vector<JudgmentSet> sets;
  const int buckets[] = {35, 41, 15, 5};
  int participant = 0;
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < buckets[k]; ++i, ++participant) {
      for (int q = 0; q < 3; ++q) {
        const int a = q < k ? 30 : 70;
        sets.push_back(make_set(pid(participant), "Q" + std::to_string(q + 1), a, 30, 60, a, 3));
      }
    }
  }
  const auto h = inconsistency_histogram(sets);
  EXPECT_EQ(h.participants, 96);
  EXPECT_EQ(round1(100 * h.proportion(0)), 36.5);
  EXPECT_EQ(round1(100 * h.proportion(1)), 42.7);
  EXPECT_EQ(round1(100 * h.proportion(2)), 15.6);
  EXPECT_EQ(round1(100 * h.proportion(3)), 5.2);
}

TEST(Revision, NoChangesGivesZero) {
  std::vector<JudgmentSet> sets;
  for (int a = 0; a <= 100; a += 10) sets.push_back(make_set(pid(a), "Q1", a, 30, 60, a, 2));
  EXPECT_EQ(revision_analysis(sets).fraction_changed(), 0.0);
}

TEST(Revision, SingleRepairedSet) {
  const auto s = revision_analysis({make_set("p", "q", 30, 30, 60, 70, 2)});
  EXPECT_EQ(s.fraction_repaired_among_inconsistent(), 1.0);
  EXPECT_FALSE(s.fraction_broken_among_consistent().has_value());
  EXPECT_TRUE(s.to_json().at("fraction_broken_among_consistent").is_null());
  EXPECT_EQ(revision_outcome(make_set("p", "q", 30, 30, 60, 70, 2)).transition, Transition::Repaired);
}

TEST(Revision, EmptyPopulationIsAbsent) {
  const auto s = revision_analysis({});
  EXPECT_FALSE(s.fraction_changed());
  EXPECT_FALSE(s.fraction_repaired_among_inconsistent());
}

TEST(Revision, Transitions) {
  EXPECT_EQ(revision_outcome(make_set("p", "q", 70, 30, 60, 20, 2)).transition, Transition::Broken);
  EXPECT_EQ(revision_outcome(make_set("p", "q", 70, 30, 60, 80, 2)).transition, Transition::StayedConsistent);
  EXPECT_EQ(revision_outcome(make_set("p", "q", 20, 30, 60, 10, 2)).transition, Transition::StayedInconsistent);
  EXPECT_EQ(revision_outcome(make_set("p", "q", 50, 30, 60, 80, 2)).transition, Transition::BorderlineInvolved);
  EXPECT_TRUE(revision_outcome(make_set("p", "q", 70, 30, 60, 80, 2)).changed);
}

// 288 sets: 86 initially inconsistent (11 repaired), 202 consistent (7
// broken), 86 changed in total.
TEST(Revision, ReproducesDesignedFractions) {
  std::vector<JudgmentSet> sets;
  int n = 0;
  auto add = [&](int a, int d) { sets.push_back(make_set(pid(n / 3), "Q" + std::to_string(n % 3), a, 30, 60, d, 3)), ++n; };
  for (int i = 0; i < 11; ++i) add(30, 70);   // repaired
  for (int i = 0; i < 75; ++i) add(30, i < 30 ? 20 : 30);
  for (int i = 0; i < 7; ++i) add(70, 30);    // broken
  for (int i = 0; i < 195; ++i) add(70, i < 38 ? 80 : 70);
  ASSERT_EQ(sets.size(), 288u);
  const auto s = revision_analysis(sets);
  EXPECT_EQ(s.initially_inconsistent, 86);
  EXPECT_EQ(s.initially_consistent, 202);
  EXPECT_EQ(std::round(100 * *s.fraction_changed()), 30);
  EXPECT_EQ(round1(100 * *s.fraction_repaired_among_inconsistent()), 12.8);
  EXPECT_EQ(round1(100 * *s.fraction_broken_among_consistent()), 3.5);
}

TEST(Scatter, GapAndDirectColumns) {
  const auto csv = scatter_csv({make_set("p", "q", 70, 30, 60, 80, 2)}, true);
  const auto lines = split_lines(csv);
  EXPECT_EQ(lines[0], "participant_id,question_id,gap,pD");
  EXPECT_EQ(lines[1], "p,q,0.300000,0.800000");
}

TEST(TiePolicy, Parse) {
  EXPECT_EQ(parse_tie_policy("consistent"), TiePolicy::Consistent);
  EXPECT_EQ(parse_tie_policy("separate"), TiePolicy::Separate);
  EXPECT_FALSE(parse_tie_policy("ignore"));
}
