#ifndef TRAPFK_STATS_KIT_HPP
#define TRAPFK_STATS_KIT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "trapfk/errors.hpp"
#include "trapfk/rng.hpp"

namespace trapfk {

/// A Monte Carlo scalar with its uncertainty.
struct StatsSummary {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::size_t n_samples = 0;
  std::string method;

  bool valid() const noexcept { return ci_low <= estimate && estimate <= ci_high && std_error >= 0.0; }
};

namespace detail {

inline void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw InputError(std::string(what) + ": empty sample");
}

inline double normal_quantile_two_sided(double level) {
  const boost::math::normal_distribution<double> z;
  return boost::math::quantile(z, 0.5 + 0.5 * level);
}

/// Sort with ties broken by input position, so the order is total and reproducible.
inline std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<std::pair<double, std::size_t>> tagged(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) tagged[i] = {xs[i], i};
  std::sort(tagged.begin(), tagged.end());
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = tagged[i].first;
  return out;
}

}  // namespace detail

/// Sample mean with a normal-approximation interval.
inline StatsSummary summarize_mean(std::span<const double> xs, double level = 0.95) {
  detail::require_nonempty(xs.size(), "summarize_mean");
  const auto n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double se = sd / std::sqrt(n);
  const double z = detail::normal_quantile_two_sided(level);
  return {mean, se, mean - z * se, mean + z * se, level, xs.size(), "mean/normal"};
}

/// Binomial proportion with a Wilson interval.
inline StatsSummary summarize_proportion(std::size_t hits, std::size_t n, double level = 0.95) {
  detail::require_nonempty(n, "summarize_proportion");
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  const double z = detail::normal_quantile_two_sided(level);
  const double nn = static_cast<double>(n);
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {p, std::sqrt(p * (1.0 - p) / nn), std::min(p, centre - half), std::max(p, centre + half), level, n,
          "proportion/wilson"};
}

/// Empirical CDF of a sample (right-continuous step function).
class Ecdf {
 public:
  explicit Ecdf(std::span<const double> xs) : sorted_(detail::sorted_copy(xs)) {
    detail::require_nonempty(sorted_.size(), "Ecdf");
  }
  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }
  const std::vector<double>& sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  detail::require_nonempty(a.size(), "ks_statistic");
  detail::require_nonempty(b.size(), "ks_statistic");
  const auto sa = detail::sorted_copy(a);
  const auto sb = detail::sorted_copy(b);
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

/// One-sample Kolmogorov-Smirnov distance against a continuous reference CDF.
inline double ks_statistic(std::span<const double> a, const std::function<double(double)>& cdf) {
  detail::require_nonempty(a.size(), "ks_statistic");
  const auto s = detail::sorted_copy(a);
  const double n = static_cast<double>(s.size());
  double best = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    best = std::max({best, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return best;
}

/// Asymptotic Kolmogorov survival function P[sqrt(n) D_n > x].
inline double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

/// Percentile bootstrap for an arbitrary statistic. Deterministic in the stream.
inline StatsSummary bootstrap_ci(std::span<const double> xs,
                                 const std::function<double(std::span<const double>)>& statistic, double level,
                                 std::size_t resamples, CounterStream rng) {
  detail::require_nonempty(xs.size(), "bootstrap_ci");
  if (resamples < 100) throw ParameterError("bootstrap needs at least 100 resamples");
  const double est = statistic(xs);
  std::vector<double> stats(resamples);
  std::vector<double> buf(xs.size());
  const auto n = static_cast<std::uint32_t>(xs.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = xs[rng.below(n)];
    stats[b] = statistic(buf);
  }
  std::sort(stats.begin(), stats.end());
  const auto pick = [&](double q) {
    const double pos = q * static_cast<double>(resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, resamples - 1);
    return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  };
  const double mean = std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(resamples);
  double ss = 0.0;
  for (double s : stats) ss += (s - mean) * (s - mean);
  const double se = std::sqrt(ss / static_cast<double>(resamples - 1));
  // A percentile interval need not cover the plug-in estimate; widen so it does.
  return {est, se, std::min(est, pick(0.5 - 0.5 * level)), std::max(est, pick(0.5 + 0.5 * level)), level,
          xs.size(), "bootstrap/percentile"};
}

inline double sample_mean(std::span<const double> xs) {
  detail::require_nonempty(xs.size(), "sample_mean");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline constexpr std::size_t kDefaultResamples = 200;
inline constexpr std::uint64_t kDefaultBootstrapSeed = 0x5eed;

/// Mean of exp(-lambda x) with a bootstrap interval.
inline StatsSummary empirical_laplace(std::span<const double> xs, double lambda,
                                      CounterStream rng = seed_stream(kDefaultBootstrapSeed, 0,
                                                                      StreamPurpose::bootstrap),
                                      double level = 0.95, std::size_t resamples = kDefaultResamples) {
  detail::require_nonempty(xs.size(), "empirical_laplace");
  if (!(lambda >= 0.0)) throw ParameterError("Laplace argument must be nonnegative");
  std::vector<double> v(xs.size());
  std::transform(xs.begin(), xs.end(), v.begin(), [lambda](double x) { return std::exp(-lambda * x); });
  auto s = bootstrap_ci(v, sample_mean, level, resamples, rng);
  s.method = "laplace/bootstrap";
  return s;
}

struct CharfnEstimate {
  StatsSummary real;  ///< mean cos(xi . x)
  double imag = 0.0;  ///< mean sin(xi . x); near zero for the symmetric laws used here
  double modulus = 0.0;
};

/// Empirical characteristic function at xi for a sample of vectors (row-major,
/// dim entries per observation).
inline CharfnEstimate empirical_charfn(std::span<const double> flat, std::size_t dim, std::span<const double> xi,
                                       CounterStream rng = seed_stream(kDefaultBootstrapSeed, 0,
                                                                       StreamPurpose::bootstrap),
                                       double level = 0.95, std::size_t resamples = kDefaultResamples) {
  if (dim == 0 || xi.size() != dim) throw InputError("empirical_charfn: dimension mismatch");
  detail::require_nonempty(flat.size() / dim, "empirical_charfn");
  const std::size_t n = flat.size() / dim;
  std::vector<double> c(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t k = 0; k < dim; ++k) dot += xi[k] * flat[i * dim + k];
    c[i] = std::cos(dot);
    s += std::sin(dot);
  }
  CharfnEstimate out;
  out.real = bootstrap_ci(c, sample_mean, level, resamples, rng);
  out.real.method = "charfn/bootstrap";
  out.imag = s / static_cast<double>(n);
  out.modulus = std::hypot(out.real.estimate, out.imag);
  return out;
}

inline double median(std::vector<double> xs) {
  detail::require_nonempty(xs.size(), "median");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Least-squares slope of y on x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("ols_slope needs two or more paired points");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace trapfk

#endif  // TRAPFK_STATS_KIT_HPP
