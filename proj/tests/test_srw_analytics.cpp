#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "trapfk/srw_analytics.hpp"

using namespace trapfk;

namespace {
// Watson's closed form for the three-dimensional simple cubic lattice:
// G_3(0) = (sqrt(6) / (32 pi^3)) Gamma(1/24) Gamma(5/24) Gamma(7/24) Gamma(11/24).
double watson_g3() {
  return std::sqrt(6.0) / (32.0 * std::pow(std::numbers::pi, 3)) * std::tgamma(1.0 / 24) * std::tgamma(5.0 / 24) *
         std::tgamma(7.0 / 24) * std::tgamma(11.0 / 24);
}
}  // namespace

TEST(GreenFree, ThreeDimensionsBracketsWatson) {
  const auto b = green_free(3, 1e-4);
  EXPECT_LE(b.width(), 2e-4);
  EXPECT_TRUE(b.contains(watson_g3()));
  EXPECT_TRUE(b.contains(1.5163860));
  EXPECT_NEAR(green_constant(3), watson_g3(), 1e-9);
}

TEST(GreenFree, FourDimensionsKnownValue) {
  // Return probability 0.193206... for the 4-d walk, so G_4(0) = 1 / (1 - p).
  const auto b = green_free(4, 1e-6);
  EXPECT_TRUE(b.contains(1.2394671218)) << b.lower << " " << b.upper;
}

TEST(GreenFree, BracketsAreNested) {
  GreenBracket prev = green_free_at_cutoff(3, 50.0);
  for (double T : {200.0, 1000.0, 5000.0}) {
    const auto b = green_free_at_cutoff(3, T);
    EXPECT_LE(prev.lower, b.lower + 1e-15);
    EXPECT_GE(prev.upper, b.upper - 1e-15);
    prev = b;
  }
}

TEST(GreenFree, DivergesInTwoDimensions) { EXPECT_THROW(green_free(2), DivergenceError); }

TEST(BallGreen, HarmonicAndSymmetric) {
  BallGreenSolver<3> s(8.0);
  const Site<3> y{2, -1, 0};
  const Site<3> x{0, 3, 1};
  const auto cy = s.column(y);
  const auto cx = s.column(x);
  EXPECT_LT(s.harmonicity_residual(cy, y), 1e-10);
  EXPECT_NEAR(s.value(cy, x), s.value(cx, y), 1e-10);
  EXPECT_GT(s.value(cy, y), 1.0);
  EXPECT_LT(s.value(cy, y), green_constant(3));
}

TEST(BallGreen, ExactAgreesWithMonteCarlo) {
  const Site<3> o{};
  const Site<3> y{2, 0, 0};
  const double exact = green_ball_exact<3>(6.0, o, y);
  const auto mc = green_ball_mc<3>(6.0, o, y, 40000, 3);
  EXPECT_NEAR(mc.estimate, exact, 4 * mc.std_error);
}

TEST(BallGreen, OneDimensionalSanityInTwoD) {
  // In d = 2 the killed Green's function at the origin grows like (2/pi) log r.
  const double g20 = green_ball_exact<2>(20.0, Site<2>{}, Site<2>{});
  const double g40 = green_ball_exact<2>(40.0, Site<2>{}, Site<2>{});
  EXPECT_NEAR(g40 - g20, 2.0 / std::numbers::pi * std::log(2.0), 0.02);
}

TEST(BallGreen, CapacityErrorForHugeBall) { EXPECT_THROW(BallGreenSolver<3>(80.0), CapacityError); }

TEST(Hitting, GreenRatioMatchesHarmonicSolve) {
  BallGreenSolver<3> s(12.0);
  for (const Site<3>& x : {Site<3>{3, 0, 0}, Site<3>{2, 2, 2}, Site<3>{0, -7, 1}}) {
    const auto h = hitting_prob_exact<3>(s, x);
    const double harm = hitting_prob_harmonic<3>(12.0, x);
    EXPECT_NEAR(harm * h.green_diag, h.green_origin, 1e-12);
    EXPECT_GT(h.probability, 0.0);
    EXPECT_LT(h.probability, 1.0);
  }
}

TEST(Hitting, ExactAgreesWithMonteCarlo) {
  const Site<3> x{3, 1, 0};
  const double exact = hitting_prob_exact<3>(10.0, x).probability;
  const auto mc = hitting_prob_mc<3>(10.0, Site<3>{}, Site<3>{}, x, 40000, 5);
  EXPECT_NEAR(mc.estimate, exact, 4 * mc.std_error);
}

TEST(Hitting, DecreasesAlongAxis) {
  BallGreenSolver<3> s(15.0);
  double prev = 1.0;
  for (int k = 1; k <= 12; ++k) {
    const double p = hitting_prob_exact<3>(s, Site<3>{k, 0, 0}).probability;
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Hitting, FittedEnvelopeContainsItsFitPoints) {
  std::vector<EnvelopeFitPoint> pts;
  BallGreenSolver<3> s(16.0);
  for (int k = 2; k <= 10; ++k) {
    const Site<3> x{k, 0, 0};
    pts.push_back({16.0, norm<3>(x), hitting_prob_exact<3>(s, x).probability});
  }
  const auto env = fit_hitting_envelope(3, pts, 1.1);
  for (const auto& q : pts) {
    const auto b = hitting_bounds(3, q.r, q.abs_x, env);
    EXPECT_LE(b.lower, q.p);
    EXPECT_GE(b.upper, q.p);
    EXPECT_GE(b.refined_upper, q.p);
  }
}

TEST(Constants, NewtonConstant) {
  // a_3 = 3 / (2 pi) for the lattice normalisation G(x) ~ a_d |x|^{2-d}.
  EXPECT_NEAR(newton_constant(3), 3.0 / (2.0 * std::numbers::pi), 1e-14);
}
