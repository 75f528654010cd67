#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "trapfk/fk_limit.hpp"
#include "trapfk/stats_kit.hpp"

using namespace trapfk;

TEST(MittagLeffler, HalfOrderClosedForm) {
  // E_{1/2}(-x) = exp(x^2) erfc(x).
  for (double x : {0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0}) {
    const double oracle = std::exp(x * x) * std::erfc(x);
    EXPECT_NEAR(mittag_leffler(0.5, -x), oracle, 1e-10 * std::max(1.0, oracle)) << x;
  }
  EXPECT_NEAR(mittag_leffler(0.5, -1.0), 0.42758, 5e-6);
}

TEST(MittagLeffler, OrderOneIsExponential) {
  EXPECT_DOUBLE_EQ(mittag_leffler(1.0, -2.5), std::exp(-2.5));
}

TEST(MittagLeffler, SeriesAndIntegralAgree) {
  for (double a : {0.3, 0.5, 0.8}) {
    // Only where the series is used; beyond that it cancels catastrophically.
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
      if (x > std::pow(15.0, a)) continue;
      EXPECT_NEAR(mittag_leffler_series(a, x), mittag_leffler_integral(a, x), 1e-9) << a << " " << x;
    }
  }
}

TEST(MittagLeffler, CompletelyMonotoneOnNegativeAxis) {
  for (double a : {0.2, 0.6, 0.9}) {
    double prev = 1.0;
    for (double x = 0.25; x < 200.0; x *= 1.5) {
      const double v = mittag_leffler(a, -x);
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(Aging, MatchesIncompleteBetaOracleOnGrid) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.05 + 0.9 * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double theta = 0.05 + 9.95 * j / 19.0;
      const double oracle = boost::math::ibeta(a, 1.0 - a, 1.0 / (1.0 + theta));
      worst = std::max(worst, std::abs(aging_function(a, theta) - oracle));
    }
  }
  EXPECT_LE(worst, 1e-8);
  EXPECT_NEAR(aging_function(0.5, 1.0), 0.5, 1e-10);
  EXPECT_NEAR(aging_function(0.5, 3.0), 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(aging_function(0.5, 0.0), 1.0, 1e-10);
}

TEST(Stable, HalfOrderIsLevy) {
  // With E exp(-lambda V) = exp(-sqrt(lambda)), V is Levy with scale 1/2:
  // P[V <= x] = erfc(1 / (2 sqrt(x))).
  auto rng = seed_stream(1, 0, StreamPurpose::fk);
  std::vector<double> v(40000);
  for (auto& x : v) x = sample_stable_unit(0.5, rng);
  const double ks = ks_statistic(v, [](double x) { return x <= 0 ? 0.0 : std::erfc(0.5 / std::sqrt(x)); });
  EXPECT_LT(ks, 1.95 / std::sqrt(40000.0));
}

TEST(Stable, LaplaceTransform) {
  for (double a : {0.3, 0.7}) {
    auto rng = seed_stream(2, 0, StreamPurpose::fk);
    std::vector<double> v(50000);
    for (auto& x : v) x = sample_stable_unit(a, rng);
    for (double lambda : {0.5, 2.0}) {
      const auto s = empirical_laplace(v, lambda);
      EXPECT_NEAR(s.estimate, std::exp(-std::pow(lambda, a)), 4 * s.std_error) << a << " " << lambda;
    }
  }
}

TEST(Subordinator, IncrementsScaleAndInverse) {
  auto rng = seed_stream(3, 0, StreamPurpose::fk);
  const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  std::vector<double> at2;
  for (int i = 0; i < 30000; ++i) {
    const auto p = sample_stable_subordinator(0.5, grid, rng);
    ASSERT_EQ(p.V[0], 0.0);
    for (std::size_t k = 1; k < p.V.size(); ++k) ASSERT_GE(p.V[k], p.V[k - 1]);
    at2.push_back(p.V[3]);
  }
  // V(2) has Laplace transform exp(-2 lambda^alpha).
  const auto s = empirical_laplace(at2, 1.0);
  EXPECT_NEAR(s.estimate, std::exp(-2.0), 4 * s.std_error);

  SubordinatorPath p;
  p.t = {0.0, 1.0, 2.0};
  p.V = {0.0, 3.0, 5.0};
  EXPECT_EQ(invert_subordinator(p, 0.0), 1.0);
  EXPECT_EQ(invert_subordinator(p, 3.0), 2.0);
  EXPECT_THROW(invert_subordinator(p, 5.0), HorizonExceeded);
}

TEST(Brownian, RepeatedQueriesAreConsistent) {
  auto rng = seed_stream(4, 0, StreamPurpose::fk);
  BrownianPath b(2);
  const auto x1 = b.at(1.0, rng);
  const auto xh = b.at(0.5, rng);
  EXPECT_EQ(b.at(1.0, rng), x1);
  EXPECT_EQ(b.at(0.5, rng), xh);
  EXPECT_EQ(b.at(0.0, rng), (std::vector<double>{0.0, 0.0}));
}

TEST(FkPath, StartsAtZeroAndInverseIsMonotone) {
  auto rng = seed_stream(5, 0, StreamPurpose::fk);
  const std::vector<double> s{0.0, 0.25, 0.5, 1.0};
  const auto p = sample_fk_path(3, 0.5, s, rng);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(p.at(0)[c], 0.0);
  for (std::size_t i = 1; i < p.inverse.size(); ++i) EXPECT_GE(p.inverse[i], p.inverse[i - 1]);
}

TEST(FkMarginal, CharacteristicFunction) {
  auto rng = seed_stream(6, 0, StreamPurpose::fk);
  std::vector<double> flat;
  for (int i = 0; i < 60000; ++i) {
    const auto z = sample_fk_marginal(3, 0.5, 1.0, rng);
    flat.insert(flat.end(), z.begin(), z.end());
  }
  const std::vector<double> xi{1.0, 1.0, 0.0};
  const auto c = empirical_charfn(flat, 3, xi);
  EXPECT_NEAR(c.real.estimate, fk_charfn_target(0.5, 1.0, xi), 4 * c.real.std_error);
  EXPECT_NEAR(fk_charfn_target(0.5, 1.0, xi), 0.42758, 5e-6);
}

TEST(Constants, EscapeAndPrintedSets) {
  const double G = green_constant(3);
  const double gg = std::tgamma(0.5) * std::tgamma(1.5);
  const auto e = model_constants(3, 0.5, ConstantSet::escape);
  EXPECT_NEAR(e.K, 1.0 / G, 1e-14);
  EXPECT_NEAR(e.K_prime, G, 1e-14);
  EXPECT_NEAR(e.C, 1.0 / std::sqrt(std::pow(G, -0.5) * gg), 1e-12);
  EXPECT_NEAR(e.c2, 1.0 / e.C, 1e-14);
  const auto p = model_constants(3, 0.5, ConstantSet::printed);
  EXPECT_EQ(p.K, 1.0);
  EXPECT_NEAR(p.C, 1.0 / std::sqrt(std::pow(G, 0.5) * gg), 1e-12);
  const auto two = model_constants(2, 0.5);
  EXPECT_NEAR(two.K * two.K_prime, 1.0 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(two.c2, 1.0 / (two.C * two.c1), 1e-14);
}

// The limit of F_d satisfies the scaling identity exactly for both dimensions.
TEST(Fd, LimitIdentityIsExact) {
  for (int d : {2, 3}) {
    for (double a : {0.3, 0.5, 0.8}) {
      const auto k = model_constants(d, a);
      const double c2sq = k.c2 * k.c2;
      for (double lambda : {0.5, 1.0, 2.0}) {
        for (double t : {1.0, std::exp2(1.0 / a)}) {
          const double lhs = std::pow(t, a) / c2sq * f_d_limit(k, lambda / t);
          EXPECT_NEAR(lhs, std::pow(lambda, a), 1e-12) << d << " " << a;
        }
      }
    }
  }
}

// Independent evaluation of K {p - int alpha z^{-alpha-1} / (1 + K' lambda z) dz}
// by composite Simpson on a log grid.
TEST(Fd, QuadratureMatchesSimpsonOracle) {
  const auto p = make_fd_params(3, 0.5, 1e-4, 1e4);
  const double a = p.alpha;
  for (double lambda : {0.3, 1.0, 5.0}) {
    const double c = p.constants.K_prime * lambda;
    const double lo = std::log(p.epsilon);
    const double hi = std::log(p.M);
    const int n = 200000;
    const double h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = lo + i * h;
      const double z = std::exp(w);
      const double f = a * std::pow(z, -a) / (1.0 + c * z);
      sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    const double oracle = p.constants.K * (p.p_eps_M() - sum * h / 3.0);
    EXPECT_NEAR(f_d_lambda(p, lambda), oracle, 1e-8 * oracle) << lambda;
  }
}

TEST(Fd, ApproachesLimitAsWindowOpens) {
  const auto p = make_fd_params(3, 0.5, 1e-14, 1e14);
  for (double lambda : {0.5, 2.0}) {
    const double lim = f_d_limit(p.constants, lambda);
    EXPECT_NEAR(f_d_lambda(p, lambda), lim, 1e-4 * lim);
  }
  EXPECT_EQ(f_d_lambda(p, 0.0), 0.0);
  EXPECT_THROW(make_fd_params(3, 0.5, 2.0, 1.0), ParameterError);
}
