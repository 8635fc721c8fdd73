#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "expect_code.hpp"
#include "support.hpp"

namespace xgr {
namespace {

using testing::expect_code;

GrProblem grid_problem(const GridSpec& spec, const std::vector<std::string>& moves) {
  auto c = compile_grid(spec, false);
  std::vector<ActionId> ids;
  for (const auto& m : moves) ids.push_back(*c.domain->find_action(m));
  return make_problem(c, ids);
}

TEST(Mirroring, SingleObservationOnThreeByThree) {
  const auto p = grid_problem(GridSpec{3, 3, {}, 7, {1, 3}}, {"move-right-7-8"});
  const auto t = mirror_posteriors(p);
  ASSERT_EQ(t.per_prefix.size(), 2u);
  EXPECT_NEAR(t.per_prefix[1][0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(t.per_prefix[1][1], 2.0 / 3.0, 1e-12);
  EXPECT_EQ(t.optimal_costs[0], 2);
  EXPECT_EQ(t.optimal_costs[1], 4);
  EXPECT_EQ(t.suffix_costs[1][0], 3);
  EXPECT_EQ(t.suffix_costs[1][1], 3);
  EXPECT_EQ(t.predicted, (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.counterfactual, (std::vector<std::size_t>{0}));
}

TEST(Mirroring, NoObservationsEquidistantGoalsIsUniform) {
  const auto p = grid_problem(GridSpec{3, 3, {}, 5, {1, 3, 7, 9}}, {});
  const auto t = mirror_posteriors(p);
  ASSERT_EQ(t.per_prefix.size(), 1u);
  for (double v : t.final_distribution()) EXPECT_NEAR(v, 0.25, 1e-12);
  EXPECT_EQ(t.predicted.size(), 4u);
  EXPECT_TRUE(t.counterfactual.empty());
}

TEST(Mirroring, ReconstructedNavigationExample) {
  const auto loaded = load_scenario(testing::fixture("fig7_nav.json"));
  const auto t = mirror_posteriors(loaded.problem);
  ASSERT_EQ(t.observation_count(), 7u);
  EXPECT_EQ(t.optimal_costs, (std::vector<std::optional<int>>{6, 8, 7}));
  // Uniform while the path is shared by all goals.
  for (std::size_t i = 0; i <= 3; ++i) {
    for (double v : t.per_prefix[i]) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
  }
  const double expected[][3] = {{3.0 / 11, 4.0 / 11, 4.0 / 11},
                                {3.0 / 13, 5.0 / 13, 5.0 / 13},
                                {0.2, 0.4, 0.4}};
  for (std::size_t i = 4; i <= 6; ++i) {
    for (std::size_t g = 0; g < 3; ++g) EXPECT_NEAR(t.per_prefix[i][g], expected[i - 4][g], 1e-12);
  }
  EXPECT_EQ(t.predicted, (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.counterfactual, (std::vector<std::size_t>{0, 2}));
}

TEST(Mirroring, DistributionsAreNormalised) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto c = compile_grid(testing::random_grid(rng, 10, 10, 0.2, 3), false);
    const auto p = make_problem(c, testing::random_walk(rng, c, 8));
    PosteriorTrace t;
    try {
      t = mirror_posteriors(p);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kAllGoalsUnsolvable);
      continue;
    }
    for (const auto& row : t.per_prefix) {
      EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
      for (double v : row) EXPECT_GE(v, 0.0);
    }
    std::vector<std::size_t> all = t.predicted;
    all.insert(all.end(), t.counterfactual.begin(), t.counterfactual.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2}));
  }
}

TEST(Mirroring, FollowingAnOptimalPlanKeepsItsGoalOnTop) {
  // Open 9x9 grid, start in the centre; goals straight right, up and left.
  const GridSpec spec{9, 9, {}, 41, {45, 5, 37}};
  auto c = compile_grid(spec, false);
  const auto plan = optimal_plan(PlanningTask{*c.domain, c.initial, c.goals[0]});
  const auto p = make_problem(c, plan.plan.actions);
  const auto t = mirror_posteriors(p);
  for (std::size_t i = 1; i <= p.observation_count(); ++i) {
    EXPECT_GT(t.per_prefix[i][0], t.per_prefix[i][1]);
    EXPECT_GT(t.per_prefix[i][0], t.per_prefix[i][2]);
  }
}

TEST(Mirroring, UnreachableGoalGetsZero) {
  // Goal 1 is walled off; goal 9 is reachable.
  const auto p = grid_problem(GridSpec{3, 3, {2, 4}, 5, {1, 9}}, {"move-right-5-6"});
  const auto t = mirror_posteriors(p);
  for (const auto& row : t.per_prefix) {
    EXPECT_EQ(row[0], 0.0);
    EXPECT_EQ(row[1], 1.0);
  }
  EXPECT_FALSE(t.optimal_costs[0]);
}

TEST(Mirroring, AllGoalsUnsolvable) {
  const auto p = grid_problem(GridSpec{3, 3, {2, 4}, 5, {1}}, {});
  expect_code(ErrorCode::kAllGoalsUnsolvable, [&] { mirror_posteriors(p); });
}

TEST(Mirroring, BrokenObservationChain) {
  auto c = compile_grid(GridSpec{3, 3, {}, 7, {1}}, false);
  const std::vector<ActionId> ids{*c.domain->find_action("move-right-7-8"),
                                  *c.domain->find_action("move-right-7-8")};
  try {
    make_problem(c, ids);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidObservationChain);
    EXPECT_NE(std::string(e.what()).find("observation 2"), std::string::npos);
  }
  auto p = grid_problem(GridSpec{3, 3, {}, 7, {1}}, {"move-right-7-8"});
  p.observations[0].resulting_state = p.initial;
  expect_code(ErrorCode::kInvalidObservationChain, [&] { mirror_posteriors(p); });
}

TEST(Mirroring, PriorsWeightScores) {
  const auto p = grid_problem(GridSpec{3, 3, {}, 7, {1, 3}}, {"move-right-7-8"});
  MirrorOptions o;
  o.priors = {0.75, 0.25};
  const auto t = mirror_posteriors(p, o);
  // Scores (1/3, 2/3) reweighted by (3, 1): (0.5*0.75, 1*0.25) normalised.
  EXPECT_NEAR(t.per_prefix[1][0], 0.6, 1e-12);
  EXPECT_NEAR(t.per_prefix[1][1], 0.4, 1e-12);
  o.priors = {1.0, 0.0};
  expect_code(ErrorCode::kZeroPrior, [&] { mirror_posteriors(p, o); });
  o.priors = {1.0};
  expect_code(ErrorCode::kValidationError, [&] { mirror_posteriors(p, o); });
}

TEST(Mirroring, ScoreIsScaleFree) {
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NEAR(mirror_score(6 * k, 4 * static_cast<std::size_t>(k), 4 * k), mirror_score(6, 4, 4), 1e-15);
  }
  EXPECT_EQ(mirror_score(std::nullopt, 1, 3), 0.0);
  EXPECT_EQ(mirror_score(3, 1, std::nullopt), 0.0);
  EXPECT_EQ(mirror_score(0, 0, 0), 1.0);
}

TEST(GoalSplit, CoMaximalGoalsArePredicted) {
  PosteriorTrace t;
  t.per_prefix = {{0.27, 0.365, 0.365}};
  auto s = split_goal_sets(t);
  EXPECT_EQ(s.predicted, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(s.counterfactual, (std::vector<std::size_t>{0}));

  t.per_prefix = {{1.0}};
  s = split_goal_sets(t);
  EXPECT_EQ(s.predicted, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(s.counterfactual.empty());

  t.per_prefix = {{0.2, 0.3, 0.5}};
  s = split_goal_sets(t);
  EXPECT_EQ(s.predicted, (std::vector<std::size_t>{2}));
  EXPECT_EQ(s.counterfactual, (std::vector<std::size_t>{0, 1}));

  t.per_prefix.clear();
  expect_code(ErrorCode::kValidationError, [&] { split_goal_sets(t); });
}

}  // namespace
}  // namespace xgr
