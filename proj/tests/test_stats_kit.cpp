#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "trapfk/rng.hpp"
#include "trapfk/stats_kit.hpp"

using namespace trapfk;

namespace {
std::vector<double> exponentials(std::size_t n, std::uint64_t seed) {
  auto g = seed_stream(seed, 0, StreamPurpose::sampling);
  std::vector<double> v(n);
  for (auto& x : v) x = g.exponential();
  return v;
}
}  // namespace

TEST(SummarizeMean, KnownSample) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto s = summarize_mean(x);
  EXPECT_DOUBLE_EQ(s.estimate, 3.0);
  EXPECT_NEAR(s.std_error, std::sqrt(2.5 / 5.0), 1e-12);
  EXPECT_TRUE(s.valid());
  EXPECT_EQ(s.n_samples, 5u);
}

TEST(SummarizeMean, EmptyThrows) { EXPECT_THROW(summarize_mean(std::vector<double>{}), InputError); }

TEST(SummarizeProportion, ErrorMatchesBinomial) {
  const auto s = summarize_proportion(300, 1000);
  EXPECT_DOUBLE_EQ(s.estimate, 0.3);
  EXPECT_NEAR(s.std_error, std::sqrt(0.3 * 0.7 / 1000), 1e-12);
  EXPECT_TRUE(s.valid());
}

TEST(Ks, TwoSampleBasicProperties) {
  const auto a = exponentials(500, 1);
  const auto b = exponentials(700, 2);
  EXPECT_DOUBLE_EQ(ks_statistic(a, a), 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic(a, b), ks_statistic(b, a));
  std::vector<double> shifted(a);
  for (auto& x : shifted) x += 1000.0;
  EXPECT_DOUBLE_EQ(ks_statistic(a, shifted), 1.0);
}

TEST(Ks, TwoSampleMatchesBruteForce) {
  const auto a = exponentials(300, 3);
  const auto b = exponentials(200, 4);
  double brute = 0.0;
  auto F = [](const std::vector<double>& s, double x) {
    double c = 0;
    for (double v : s) c += v <= x;
    return c / static_cast<double>(s.size());
  };
  for (const auto* s : {&a, &b}) {
    for (double x : *s) brute = std::max(brute, std::abs(F(a, x) - F(b, x)));
  }
  EXPECT_NEAR(ks_statistic(a, b), brute, 1e-15);
}

TEST(Ks, OneSampleAgainstTrueLawIsSmall) {
  const auto a = exponentials(20000, 5);
  const double d = ks_statistic(a, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); });
  EXPECT_LT(d, 1.95 / std::sqrt(20000.0));
  const double wrong = ks_statistic(a, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-2.0 * x); });
  EXPECT_GT(wrong, 0.2);
}

TEST(Ks, KolmogorovSurvival) {
  EXPECT_NEAR(kolmogorov_sf(1.36), 0.05, 0.002);
  EXPECT_NEAR(kolmogorov_sf(1.63), 0.01, 0.001);
  EXPECT_DOUBLE_EQ(kolmogorov_sf(0.0), 1.0);
}

TEST(Laplace, ExponentialSample) {
  const auto a = exponentials(100000, 6);
  for (double lambda : {0.5, 1.0, 3.0}) {
    const auto s = empirical_laplace(a, lambda);
    EXPECT_NEAR(s.estimate, 1.0 / (1.0 + lambda), 4 * s.std_error + 1e-12) << lambda;
    EXPECT_TRUE(s.valid());
  }
}

TEST(Bootstrap, DeterministicInStream) {
  const auto a = exponentials(1000, 7);
  const auto s1 = bootstrap_ci(a, sample_mean, 0.95, 300, seed_stream(1, 0, StreamPurpose::bootstrap));
  const auto s2 = bootstrap_ci(a, sample_mean, 0.95, 300, seed_stream(1, 0, StreamPurpose::bootstrap));
  EXPECT_EQ(s1.ci_low, s2.ci_low);
  EXPECT_EQ(s1.ci_high, s2.ci_high);
  // The bootstrap SE of a mean approximates sigma / sqrt(n) = 1 / sqrt(1000).
  EXPECT_NEAR(s1.std_error, 1.0 / std::sqrt(1000.0), 0.006);
}

TEST(Charfn, StandardNormal) {
  auto g = seed_stream(8, 0, StreamPurpose::sampling);
  std::vector<double> flat(2 * 50000);
  for (auto& x : flat) x = g.normal();
  const std::vector<double> xi{1.0, 1.0};
  const auto c = empirical_charfn(flat, 2, xi);
  EXPECT_NEAR(c.real.estimate, std::exp(-1.0), 4 * c.real.std_error);
  EXPECT_NEAR(c.imag, 0.0, 0.02);
}

TEST(Misc, MedianAndSlope) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  EXPECT_NEAR(ols_slope(x, y), 2.0, 1e-14);
  EXPECT_THROW(ols_slope(std::vector<double>{1}, std::vector<double>{1}), InputError);
}
