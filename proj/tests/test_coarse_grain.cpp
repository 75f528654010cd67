#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "trapfk/coarse_grain.hpp"

using namespace trapfk;

namespace {

// Independent stopping times: j_{k+1} = first index after j_k farther than rho from Y(j_k).
std::vector<std::size_t> brute_stopping_times(const std::vector<Site<3>>& Y, double rho) {
  std::vector<std::size_t> j{0};
  while (true) {
    std::size_t next = 0;
    for (std::size_t k = j.back() + 1; k < Y.size(); ++k) {
      const auto d = Y[k] - Y[j.back()];
      if (std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])) > rho) {
        next = k;
        break;
      }
    }
    if (!next) break;
    j.push_back(next);
  }
  return j;
}

struct Setup {
  ScaleSet sc;
  TrapSets<3> sets;
};

Setup pareto_setup(int n, double eps, double M, std::uint64_t seed) {
  const auto sc = scales(n, 3, 0.5);
  Environment<3> env(TailSpec::pareto(0.5), seed, 4.0 * sc.r);
  return {sc, TrapSets<3>(env, sc, eps, M)};
}

}  // namespace

TEST(CoarseGrain, NoDeepTrapsMeansZeroScores) {
  const auto sc = scales(8, 3, 0.5);
  // tau == 1 everywhere is far below the window [eps g, M g).
  Environment<3> env(TailSpec::constant(1.0), 1, 16.0 * sc.r);
  const TrapSets<3> sets(env, sc, 0.5, 4.0);
  auto rng = seed_stream(1, 0, StreamPurpose::walk);
  WalkOptions opt;
  opt.max_steps = 5000;
  const auto t = run_walk<3>(env, opt, rng);
  const auto rep = coarse_grain<3>(t, sets);
  EXPECT_EQ(rep.j, brute_stopping_times(t.Y, sc.rho));
  for (const auto& p : rep.parts) {
    EXPECT_EQ(p.kind, PartKind::zero);
    EXPECT_EQ(p.score, 0.0);
    EXPECT_FALSE(p.lambda1.has_value());
  }
  EXPECT_FALSE(rep.J.has_value());
  const auto d = score_sum_discrepancy<3>(rep, t, sc.n, sc.alpha, rep.parts.size());
  double expect = 0.0;
  for (std::size_t k = 1; k <= rep.parts.size(); ++k) expect = std::max(expect, t.S[rep.j[k]] / std::exp2(16.0));
  EXPECT_DOUBLE_EQ(d.max_discrepancy, expect);
}

// Structural properties of every part on random walks in random environments.
TEST(CoarseGrain, PartPropertiesOnRandomWalks) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto s = pareto_setup(6, 0.01, 100.0, seed);
    auto rng = seed_stream(seed, 0, StreamPurpose::walk);
    WalkOptions opt;
    opt.max_steps = 1'000'000;
    opt.stop = StopRule::exit_region();
    const auto t = run_walk<3>(s.sets.environment(), opt, rng);
    const auto rep = coarse_grain<3>(t, s.sets);
    ASSERT_EQ(rep.j, brute_stopping_times(t.Y, s.sc.rho));
    for (const auto& p : rep.parts) {
      ASSERT_LT(p.j_start, p.j_end);
      const double part_time = t.S[p.j_end] - t.S[p.j_start];
      bool any_deep = false;
      for (std::size_t k = p.j_start; k < p.j_end; ++k) any_deep = any_deep || s.sets.is_deep(t.Y[k]);
      switch (p.kind) {
        case PartKind::zero:
          EXPECT_FALSE(any_deep);
          EXPECT_EQ(p.score, 0.0);
          break;
        case PartKind::scored: {
          ASSERT_TRUE(p.lambda1 && p.lambda2 && p.y);
          EXPECT_TRUE(s.sets.is_deep(*p.y));
          EXPECT_GT(p.score, 0.0);
          EXPECT_LE(p.score, part_time * (1 + 1e-12));
          double at_y = 0.0;
          for (std::size_t k = p.j_start; k < p.j_end; ++k) {
            if (t.Y[k] == *p.y) at_y += t.e[k] * t.tau[k];
          }
          // Every visit to y lies before lambda2 or the score would be infinite.
          EXPECT_NEAR(p.score, at_y, 1e-9 * at_y);
          break;
        }
        case PartKind::bad:
          EXPECT_TRUE(std::isinf(p.score));
          break;
      }
    }
    if (rep.J) {
      EXPECT_EQ(rep.parts[*rep.J].kind, PartKind::bad);
      for (std::size_t i = 0; i < *rep.J; ++i) EXPECT_NE(rep.parts[i].kind, PartKind::bad);
    }
  }
}

TEST(CoarseGrain, ScriptedPathOverload) {
  const auto sc = scales(4, 3, 0.5);
  Environment<3> env(TailSpec::constant(1.0), 1, 6.0 * sc.r);
  const TrapSets<3> sets(env, sc, 0.5, 4.0);
  std::vector<Site<3>> Y{{0, 0, 0}};
  for (int k = 1; k <= 20; ++k) Y.push_back({k, 0, 0});
  std::vector<double> e(20, 1.0);
  const auto rep = coarse_grain<3>(Y, e, sets);
  // Straight line: a part ends at the first step farther than rho.
  const auto R = static_cast<std::size_t>(std::floor(sc.rho)) + 1;
  EXPECT_EQ(rep.j[1], R);
  EXPECT_EQ(rep.parts[0].displacement, (Site<3>{static_cast<int>(R), 0, 0}));
}

TEST(ScoreSample, DeterministicAcrossThreads) {
  const auto s = pareto_setup(8, 0.5, 4.0, 3);
  Site<3> x{};
  for (int k = 0; k < 50 && !s.sets.is_safe_interior(x); ++k) x = Site<3>{k, 0, 0};
  ASSERT_TRUE(s.sets.is_safe_interior(x));
  const auto a = sample_score_at<3>(s.sets, x, 200, 9, 1);
  const auto b = sample_score_at<3>(s.sets, x, 200, 9, 3);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.displacements, b.displacements);
  EXPECT_EQ(a.zero + a.finite_nonzero() + a.infinite, 200u);
}

TEST(ScoreSample, RejectsUnsafeStart) {
  const auto sc = scales(6, 3, 0.5);
  PlantedField<3> planted;
  planted[Site<3>{0, 0, 0}] = sc.g;  // deep
  Environment<3> env(TailSpec::constant(1.0), 1, 4.0 * sc.r, planted);
  const TrapSets<3> sets(env, sc, 0.5, 4.0);
  EXPECT_THROW(sample_score_at<3>(sets, Site<3>{}, 10, 1), PreconditionError);
}

TEST(Displacement, LaplaceCheckClosedForm) {
  const auto sc = scales(10, 3, 0.5);
  const std::vector<Site<3>> disp{{1, 0, 0}, {-1, 0, 0}};
  const std::vector<double> xi{1.0, 0.0, 0.0};
  const auto s = displacement_laplace_check<3>(disp, xi, sc);
  EXPECT_NEAR(s.estimate, sc.h * sc.h * (1.0 - std::cosh(1.0 / sc.r)), 1e-12);
}

TEST(Discrepancy, ExceedanceCounts) {
  std::vector<DiscrepancyResult> r(4);
  r[0].max_discrepancy = 0.05;
  r[1].max_discrepancy = 0.2;
  r[2].max_discrepancy = 0.1;
  r[3].max_discrepancy = 0.0;
  r[3].J = 1;
  r[3].k_max = 5;
  EXPECT_DOUBLE_EQ(discrepancy_exceedance(r, 0.1).estimate, 0.5);
  EXPECT_DOUBLE_EQ(discrepancy_exceedance(r, 0.1, true).estimate, 0.75);
}
