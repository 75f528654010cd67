#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "trapfk/rng.hpp"
#include "trapfk/stats_kit.hpp"

using namespace trapfk;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  using P = Philox4x32;
  EXPECT_EQ(P::apply({0, 0, 0, 0}, {0, 0}), (P::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(P::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (P::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(P::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (P::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(SeedStream, SameInputsSamePrefix) {
  auto a = seed_stream(42, 7, StreamPurpose::walk);
  auto b = seed_stream(42, 7, StreamPurpose::walk);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(SeedStream, PurposesAreSeparated) {
  auto w = seed_stream(42, 0, StreamPurpose::walk);
  auto e = seed_stream(42, 0, StreamPurpose::environment);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += w() == e();
  EXPECT_EQ(equal, 0);
}

TEST(SeedStream, ReplicasAndSeedsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t r = 0; r < 1000; ++r) first.insert(seed_stream(1, r, StreamPurpose::walk)());
  for (std::uint64_t s = 2; s < 1002; ++s) first.insert(seed_stream(s, 0, StreamPurpose::walk)());
  EXPECT_EQ(first.size(), 2000u);
}

TEST(SeedStream, FirstDrawsOfManyStreamsAreUniform) {
  std::vector<double> u;
  for (std::uint64_t r = 0; r < 10000; ++r) u.push_back(seed_stream(9, r, StreamPurpose::walk).uniform());
  const double ks = ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  // 99.9% Kolmogorov quantile is 1.95 / sqrt(n).
  EXPECT_LT(ks, 1.95 / std::sqrt(10000.0));
}

TEST(SeedStream, UniformIsOpenInterval) {
  EXPECT_GT(to_unit_open(0), 0.0);
  EXPECT_LT(to_unit_open(~std::uint64_t{0}), 1.0);
}

TEST(SeedStream, BelowStaysInRangeAndCoversIt) {
  auto g = seed_stream(3, 0, StreamPurpose::sampling);
  std::vector<int> hist(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const auto k = g.below(6);
    ASSERT_LT(k, 6u);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(SeedStream, ExponentialAndNormalMoments) {
  auto g = seed_stream(5, 0, StreamPurpose::sampling);
  const int n = 200000;
  double se = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    se += g.exponential();
    const double z = g.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(se / n, 1.0, 0.01);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}
