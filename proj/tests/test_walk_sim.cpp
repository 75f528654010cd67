#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "trapfk/walk_sim.hpp"

using namespace trapfk;

namespace {
Environment<3> pareto_env(std::uint64_t seed, std::optional<double> radius = std::nullopt) {
  return Environment<3>(TailSpec::pareto(0.5), seed, radius);
}
}  // namespace

TEST(Walk, ClockIsMarkWeightedDepthSum) {
  const auto env = pareto_env(4);
  auto rng = seed_stream(1, 0, StreamPurpose::walk);
  WalkOptions opt;
  opt.max_steps = 500;
  const auto t = run_walk<3>(env, opt, rng);
  ASSERT_EQ(t.Y.size(), 501u);
  ASSERT_EQ(t.S.size(), 501u);
  EXPECT_EQ(t.S[0], 0.0);
  double s = 0.0;
  for (std::size_t k = 0; k < t.steps(); ++k) {
    EXPECT_EQ(l1_dist<3>(t.Y[k], t.Y[k + 1]), 1);
    EXPECT_EQ(t.tau[k], env.tau(t.Y[k]));
    s += t.e[k] * t.tau[k];
    EXPECT_DOUBLE_EQ(t.S[k + 1], s);
  }
}

TEST(Walk, UnitMarksGiveDepthSum) {
  PlantedField<3> planted;
  const auto env = Environment<3>(TailSpec::constant(2.0), 1, std::nullopt, planted);
  auto rng = seed_stream(1, 0, StreamPurpose::walk);
  WalkOptions opt;
  opt.max_steps = 100;
  opt.marks = MarkMode::unit;
  const auto t = run_walk<3>(env, opt, rng);
  EXPECT_DOUBLE_EQ(t.S.back(), 200.0);
}

TEST(Walk, SameStreamSameTrajectory) {
  const auto env = pareto_env(4);
  auto r1 = seed_stream(8, 3, StreamPurpose::walk);
  auto r2 = seed_stream(8, 3, StreamPurpose::walk);
  WalkOptions opt;
  opt.max_steps = 1000;
  const auto a = run_walk<3>(env, opt, r1);
  const auto b = run_walk<3>(env, opt, r2);
  EXPECT_EQ(a.Y, b.Y);
  EXPECT_EQ(a.S, b.S);
  EXPECT_EQ(trajectory_csv<3>(a), trajectory_csv<3>(b));
}

TEST(Walk, ExitStopRecordsFirstExit) {
  const auto env = pareto_env(4, 5.0);
  auto rng = seed_stream(2, 0, StreamPurpose::walk);
  WalkOptions opt;
  opt.max_steps = 1'000'000;
  opt.stop = StopRule::exit_region();
  const auto t = run_walk<3>(env, opt, rng);
  ASSERT_TRUE(t.exit_step.has_value());
  EXPECT_EQ(*t.exit_step, t.steps());
  EXPECT_FALSE(env.in_region(t.Y.back()));
  for (std::size_t k = 0; k + 1 < t.Y.size(); ++k) EXPECT_TRUE(env.in_region(t.Y[k]));
}

TEST(Walk, ExitStopNeedsBoundedRegion) {
  const auto env = pareto_env(4);
  auto rng = seed_stream(2, 0, StreamPurpose::walk);
  WalkOptions opt;
  opt.stop = StopRule::exit_region();
  EXPECT_THROW(run_walk<3>(env, opt, rng), ParameterError);
}

TEST(Walk, ScriptedTrajectoryAndPositionAt) {
  PlantedField<2> planted;
  planted[Site<2>{0, 0}] = 1.0;
  planted[Site<2>{1, 0}] = 4.0;
  planted[Site<2>{1, 1}] = 2.0;
  const Environment<2> env(TailSpec::pareto(0.5), 1, std::nullopt, planted);
  const auto t = scripted_trajectory<2>(env, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {1.0, 0.5, 3.0});
  EXPECT_EQ(t.S, (std::vector<double>{0.0, 1.0, 3.0, 9.0}));
  EXPECT_EQ(position_at<2>(t, 0.0), (Site<2>{0, 0}));
  EXPECT_EQ(position_at<2>(t, 0.999), (Site<2>{0, 0}));
  EXPECT_EQ(position_at<2>(t, 1.0), (Site<2>{1, 0}));
  EXPECT_EQ(position_at<2>(t, 8.9), (Site<2>{1, 1}));
  EXPECT_THROW(position_at<2>(t, 9.0), HorizonExceeded);
  EXPECT_THROW(scripted_trajectory<2>(env, {{0, 0}, {2, 0}}, {1.0}), InputError);
  EXPECT_THROW(scripted_trajectory<2>(env, {{0, 0}, {1, 0}}, {1.0, 1.0}), InputError);
}

TEST(Rescale, GridIdentityHoldsWithLeftLimit) {
  const auto env = pareto_env(17);
  const auto k = model_constants(3, 0.5);
  const double N = 1e4;
  const double T = 1.0;
  const double f = k.f(N);
  auto rng = seed_stream(5, 0, StreamPurpose::walk);
  WalkOptions opt;
  opt.max_steps = static_cast<std::size_t>(50.0 * T * f * f) + 10;
  const auto t = run_walk<3>(env, opt, rng);
  ASSERT_GT(t.S.back(), T * N);
  const auto r = rescale<3>(t, N, k, T, 51);
  EXPECT_TRUE(grid_identity_holds<3>(r, t));
  EXPECT_EQ(r.t.front(), 0.0);
  EXPECT_EQ(r.S_N.front(), 0.0);
  for (std::size_t i = 1; i < r.S_N.size(); ++i) EXPECT_GE(r.S_N[i], r.S_N[i - 1]);
}

TEST(Ctrw, ConstantMatchesFormula) {
  EXPECT_NEAR(ctrw_constant(3, 0.5), std::sqrt(3.0 * std::sqrt(std::numbers::pi)), 1e-12);
}

TEST(Ctrw, TrajectoryHasUnitMarks) {
  auto rng = seed_stream(1, 0, StreamPurpose::ctrw);
  const auto t = ctrw_trajectory<3>(0.5, 1000, rng);
  for (double e : t.e) EXPECT_EQ(e, 1.0);
  for (double s : t.tau) EXPECT_GE(s, 1.0);
}

TEST(Aging, OutcomesAreConsistent) {
  const auto env = pareto_env(3);
  auto rng = seed_stream(1, 0, StreamPurpose::walk);
  for (int i = 0; i < 50; ++i) {
    const auto [same, nojump] = aging_two_time<3>(env, 100.0, 1.0, rng, 10'000'000);
    // No jump implies the same site.
    if (nojump) EXPECT_TRUE(same);
  }
}

TEST(Aging, ThetaZeroIsCertain) {
  const auto env = pareto_env(3);
  const auto a = aging_probability_estimate<3>(env, 50.0, 0.0, 200, 1);
  EXPECT_DOUBLE_EQ(a.same_site.estimate, 1.0);
  EXPECT_DOUBLE_EQ(a.no_jump.estimate, 1.0);
}

TEST(Aging, ThreadCountDoesNotChangeResult) {
  const auto env = pareto_env(3);
  const auto a = aging_probability_estimate<3>(env, 1000.0, 1.0, 300, 7, AgingMode::quenched, 1);
  const auto b = aging_probability_estimate<3>(env, 1000.0, 1.0, 300, 7, AgingMode::quenched, 4);
  EXPECT_EQ(a.same_site.estimate, b.same_site.estimate);
  EXPECT_EQ(a.no_jump.estimate, b.no_jump.estimate);
}
