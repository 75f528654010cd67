#ifndef TRAPFK_FK_LIMIT_HPP
#define TRAPFK_FK_LIMIT_HPP

// Limit objects: the one-sided stable subordinator and its inverse, the
// fractional-kinetics process B(V^{-1}(s)), the Mittag-Leffler function on
// the negative axis, the arcsine aging function, and F_d(lambda) with the
// normalising constants that tie the lattice to the limit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "trapfk/errors.hpp"
#include "trapfk/rng.hpp"
#include "trapfk/srw_analytics.hpp"

namespace trapfk {

namespace detail {
inline void require_alpha_open(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1)");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Stable subordinator.
// ---------------------------------------------------------------------------

/// One draw of V(1), E exp(-lambda V(1)) = exp(-lambda^alpha), by Kanter's
/// representation (A(U)/E)^{(1-alpha)/alpha}, U uniform on (0, pi), E ~ Exp(1).
inline double sample_stable_unit(double alpha, CounterStream& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double a = std::pow(std::sin(alpha * u) / std::sin(u), 1.0 / (1.0 - alpha)) * std::sin((1.0 - alpha) * u) /
                   std::sin(alpha * u);
  return std::pow(a / e, (1.0 - alpha) / alpha);
}

struct SubordinatorPath {
  double alpha = 0.5;
  std::vector<double> t;  ///< grid times, t[0] = 0 by convention of the samplers
  std::vector<double> V;  ///< V(t_i), nondecreasing
};

/// V on the given increasing grid. If the grid does not start at 0, the
/// first value is the increment over [0, t_0].
inline SubordinatorPath sample_stable_subordinator(double alpha, std::span<const double> t_grid, CounterStream& rng) {
  detail::require_alpha_open(alpha);
  SubordinatorPath p;
  p.alpha = alpha;
  p.t.assign(t_grid.begin(), t_grid.end());
  p.V.resize(p.t.size());
  double prev_t = 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    const double dt = p.t[i] - prev_t;
    if (dt < 0.0 || (i > 0 && dt == 0.0)) throw ParameterError("time grid must be increasing and start at t >= 0");
    if (dt > 0.0) v += std::pow(dt, 1.0 / alpha) * sample_stable_unit(alpha, rng);
    p.V[i] = v;
    prev_t = p.t[i];
  }
  return p;
}

/// inf{t_i : V(t_i) > s} over the grid.
inline double invert_subordinator(const SubordinatorPath& path, double s) {
  const auto it = std::upper_bound(path.V.begin(), path.V.end(), s);
  if (it == path.V.end()) {
    throw HorizonExceeded("s = " + std::to_string(s) + " is not below the subordinator's final value " +
                          std::to_string(path.V.empty() ? 0.0 : path.V.back()));
  }
  return path.t[static_cast<std::size_t>(it - path.V.begin())];
}

/// Extend V on the uniform grid {k dt} until it exceeds s_max.
inline SubordinatorPath sample_subordinator_until(double alpha, double s_max, double dt, CounterStream& rng,
                                                  std::size_t max_points = 200'000'000) {
  detail::require_alpha_open(alpha);
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  SubordinatorPath p;
  p.alpha = alpha;
  p.t.push_back(0.0);
  p.V.push_back(0.0);
  const double scale = std::pow(dt, 1.0 / alpha);
  double v = 0.0;
  while (v <= s_max) {
    if (p.t.size() >= max_points) throw HorizonExceeded("subordinator grid exceeded its point budget");
    v += scale * sample_stable_unit(alpha, rng);
    p.t.push_back(dt * static_cast<double>(p.t.size()));
    p.V.push_back(v);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Brownian motion with lazy bridge refinement.
// ---------------------------------------------------------------------------

/// Standard d-dimensional Brownian motion, sampled exactly at whatever times
/// are requested, in any order: a new time beyond the last known one gets an
/// independent Gaussian increment, a time between two known ones gets a
/// Brownian-bridge draw.
class BrownianPath {
 public:
  explicit BrownianPath(int d) : d_(d) { known_.emplace(0.0, std::vector<double>(static_cast<std::size_t>(d), 0.0)); }

  int dimension() const noexcept { return d_; }

  const std::vector<double>& at(double t, CounterStream& rng) {
    if (t < 0.0) throw ParameterError("Brownian time must be nonnegative");
    auto hi = known_.lower_bound(t);
    if (hi != known_.end() && hi->first == t) return hi->second;
    auto lo = std::prev(hi);
    std::vector<double> b(static_cast<std::size_t>(d_));
    if (hi == known_.end()) {
      const double sd = std::sqrt(t - lo->first);
      for (int i = 0; i < d_; ++i) b[i] = lo->second[i] + sd * rng.normal();
    } else {
      const double t0 = lo->first;
      const double t1 = hi->first;
      const double w = (t - t0) / (t1 - t0);
      const double sd = std::sqrt((t - t0) * (t1 - t) / (t1 - t0));
      for (int i = 0; i < d_; ++i) b[i] = lo->second[i] + w * (hi->second[i] - lo->second[i]) + sd * rng.normal();
    }
    return known_.emplace_hint(hi, t, std::move(b))->second;
  }

  const std::map<double, std::vector<double>>& samples() const noexcept { return known_; }

 private:
  int d_;
  std::map<double, std::vector<double>> known_;
};

// ---------------------------------------------------------------------------
// FK process.
// ---------------------------------------------------------------------------

struct FKPath {
  int d = 3;
  std::vector<double> s;          ///< requested s-grid
  std::vector<double> inverse;    ///< V^{-1}(s)
  std::vector<double> Z;          ///< row-major, d entries per s
  SubordinatorPath subordinator;
  std::map<double, std::vector<double>> brownian;  ///< Brownian samples actually drawn

  std::span<const double> at(std::size_t i) const {
    return {Z.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
};

/// Z(s) = B(V^{-1}(s)) for a given subordinator path (s must be within its horizon).
inline FKPath sample_fk_path(int d, const SubordinatorPath& sub, std::span<const double> s_grid, CounterStream& rng) {
  if (d < 1) throw UnsupportedDimension("FK dimension must be >= 1");
  FKPath p;
  p.d = d;
  p.s.assign(s_grid.begin(), s_grid.end());
  p.subordinator = sub;
  BrownianPath b(d);
  p.inverse.reserve(p.s.size());
  p.Z.reserve(p.s.size() * static_cast<std::size_t>(d));
  for (double s : p.s) {
    if (s < 0.0) throw ParameterError("s must be nonnegative");
    const double tau = s == 0.0 ? 0.0 : invert_subordinator(sub, s);
    p.inverse.push_back(tau);
    const auto& z = b.at(tau, rng);
    p.Z.insert(p.Z.end(), z.begin(), z.end());
  }
  p.brownian = b.samples();
  return p;
}

/// Same, with the subordinator sampled on a uniform grid of step dt and
/// extended until it passes max(s_grid). Z(0) = 0 by convention (B(0) = 0).
inline FKPath sample_fk_path(int d, double alpha, std::span<const double> s_grid, CounterStream& rng,
                             double dt = 1e-3) {
  const double s_max = s_grid.empty() ? 0.0 : *std::max_element(s_grid.begin(), s_grid.end());
  auto sub = sample_subordinator_until(alpha, s_max, dt, rng);
  return sample_fk_path(d, sub, s_grid, rng);
}

/// Exact one-time marginal: V^{-1}(s) has the law of (s / V(1))^alpha, so
/// Z(s) = sqrt((s/V(1))^alpha) N(0, I_d). Used as an oracle for the path sampler.
inline std::vector<double> sample_fk_marginal(int d, double alpha, double s, CounterStream& rng) {
  detail::require_alpha_open(alpha);
  const double tau = std::pow(s / sample_stable_unit(alpha, rng), alpha);
  std::vector<double> z(static_cast<std::size_t>(d));
  const double sd = std::sqrt(tau);
  for (auto& c : z) c = sd * rng.normal();
  return z;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler function on the negative real axis.
// ---------------------------------------------------------------------------

/// Power series sum (-x)^m / Gamma(1 + m alpha) in extended precision.
inline double mittag_leffler_series(double alpha, double x) {
  long double sum = 0.0L;
  const long double lx = std::log(static_cast<long double>(x));
  for (int m = 0; m < 100000; ++m) {
    long double term;
    if (m == 0) {
      term = 1.0L;
    } else {
      term = std::exp(m * lx - std::lgamma(1.0L + static_cast<long double>(m) * alpha));
      if (m % 2) term = -term;
    }
    sum += term;
    if (m > 2 && std::abs(term) < 1e-22L && m * alpha > x) break;
  }
  return static_cast<double>(sum);
}

/// E_alpha(-x) = (sin(alpha pi)/(alpha pi)) int_0^inf exp(-(u x)^{1/alpha}) / (u^2 + 2u cos(alpha pi) + 1) du,
/// the Laplace-transform representation of the relaxation function.
inline double mittag_leffler_integral(double alpha, double x) {
  if (x == 0.0) return 1.0;
  const double c = std::cos(alpha * std::numbers::pi);
  const double inv_a = 1.0 / alpha;
  auto f = [&](double u) {
    const double den = u * u + 2.0 * u * c + 1.0;
    return std::exp(-std::pow(u * x, inv_a)) / den;
  };
  // Breakpoints: where the exponential turns over (1/x) and around the
  // near-pole of the denominator at u = -cos(alpha pi) when alpha is close to 1.
  std::vector<double> cuts{0.0};
  const double peak = -c;
  const double width = std::sin(alpha * std::numbers::pi);
  for (double p : {1.0 / x, 0.5 / x, 2.0 / x, 8.0 / x, 1.0}) cuts.push_back(p);
  if (peak > 0.0) {
    for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) cuts.push_back(peak + k * width);
  }
  // The exponential is below 1e-300 beyond this point.
  const double far = std::pow(700.0, alpha) / x;
  cuts.push_back(far);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [far](double v) { return v < 0.0 || v > far; }), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-13);
  }
  return std::sin(alpha * std::numbers::pi) / (alpha * std::numbers::pi) * total;
}

/// E_alpha(z) for alpha in (0, 1] and z <= 0.
inline double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("Mittag-Leffler needs alpha in (0,1]");
  if (!(z <= 0.0)) throw ParameterError("Mittag-Leffler is provided on the negative real axis only");
  if (alpha == 1.0) return std::exp(z);
  const double x = -z;
  if (x == 0.0) return 1.0;
  // The alternating series loses about log10(E_alpha(x)) digits; keep it to
  // where E_alpha(x) ~ exp(x^{1/alpha}) stays below ~e^15.
  if (x <= std::pow(15.0, alpha)) return mittag_leffler_series(alpha, x);
  return mittag_leffler_integral(alpha, x);
}

/// E exp(i xi . Z(t)) = E_alpha(-|xi|^2 t^alpha / 2).
inline double fk_charfn_target(double alpha, double t, std::span<const double> xi) {
  if (!(t >= 0.0)) throw ParameterError("t must be nonnegative");
  double q = 0.0;
  for (double v : xi) q += v * v;
  return mittag_leffler(alpha, -q * std::pow(t, alpha) / 2.0);
}

// ---------------------------------------------------------------------------
// Aging function.
// ---------------------------------------------------------------------------

/// (sin(alpha pi)/pi) int_0^{1/(1+theta)} u^{alpha-1} (1-u)^{-alpha} du.
/// With v = u^alpha the integrand becomes (1/alpha)(1 - v^{1/alpha})^{-alpha},
/// which is bounded except at v = 1 (reached only for theta = 0).
inline double aging_function(double alpha, double theta) {
  detail::require_alpha_open(alpha);
  if (!(theta >= 0.0)) throw ParameterError("theta must be nonnegative");
  const double b = 1.0 / (1.0 + theta);
  const double vb = std::pow(b, alpha);
  const double inv_a = 1.0 / alpha;
  boost::math::quadrature::tanh_sinh<double> ts;
  // xc is the signed distance to the nearest endpoint, used near v = 1.
  auto f = [&](double v, double xc) {
    double one_minus = 1.0 - std::pow(v, inv_a);
    if (xc > 0.0 && theta == 0.0) {
      // 1 - (1 - xc)^{1/alpha} without cancellation.
      one_minus = -std::expm1(inv_a * std::log1p(-xc));
    }
    return std::pow(one_minus, -alpha) / alpha;
  };
  const double integral = ts.integrate(f, 0.0, vb, 1e-14);
  return std::sin(alpha * std::numbers::pi) / std::numbers::pi * integral;
}

// ---------------------------------------------------------------------------
// Normalising constants and F_d.
// ---------------------------------------------------------------------------

/// Which set of constants to use for d >= 3.
///
/// printed: K_d = 1, K'_d = G, C_d = [G^alpha Gamma(1-alpha)Gamma(1+alpha)]^{-1/2}.
/// escape:  K_d = 1/G, K'_d = G, C_d = [G^{alpha-1} Gamma(1-alpha)Gamma(1+alpha)]^{-1/2}.
///
/// A walk crossing a rho-ball meets a given trap with probability ~ G(0,y)/G
/// and then stays there for G geometric visits, which is what the escape set
/// encodes; the printed set omits the 1/G in the hitting probability. Both
/// satisfy K_d (K'_d)^alpha Gamma(1+alpha)Gamma(1-alpha) = c_2^2. For d = 2
/// the two sets coincide.
enum class ConstantSet { escape, printed };

inline std::string to_string(ConstantSet c) { return c == ConstantSet::escape ? "escape" : "printed"; }

inline ConstantSet constant_set_from_string(const std::string& s) {
  if (s == "escape") return ConstantSet::escape;
  if (s == "printed") return ConstantSet::printed;
  throw ParameterError("unknown constant set '" + s + "' (expected escape or printed)");
}

struct ModelConstants {
  int d = 3;
  double alpha = 0.5;
  ConstantSet set = ConstantSet::escape;
  double green = 0.0;    ///< G_d(0); 0 for d = 2
  double K = 0.0;        ///< K_d
  double K_prime = 0.0;  ///< K'_d
  double C = 0.0;        ///< C_d(alpha)
  double c1 = 0.0;
  double c2 = 0.0;

  /// f(N): C N^{alpha/2} (d >= 3), C N^{alpha/2} (log N)^{(1-alpha)/2} (d = 2).
  double f(double N) const {
    const double base = C * std::pow(N, alpha / 2.0);
    return d == 2 ? base * std::pow(std::log(N), (1.0 - alpha) / 2.0) : base;
  }
};

inline ModelConstants model_constants(int d, double alpha, ConstantSet set = ConstantSet::escape) {
  detail::require_alpha_open(alpha);
  if (d < 2) throw UnsupportedDimension("constants need d >= 2");
  const double gg = boost::math::tgamma(1.0 - alpha) * boost::math::tgamma(1.0 + alpha);
  ModelConstants k;
  k.d = d;
  k.alpha = alpha;
  k.set = set;
  if (d == 2) {
    k.K = 1.0 / std::log(2.0);
    k.K_prime = std::log(2.0) / std::numbers::pi;
    k.C = 1.0 / std::sqrt(std::pow(std::numbers::pi, 1.0 - alpha) * std::pow(alpha, alpha - 1.0) * gg);
    k.c1 = std::sqrt(std::numbers::pi) * std::pow(std::log(2.0) / alpha, (1.0 - alpha) / 2.0);
  } else {
    k.green = green_constant(d);
    k.K_prime = k.green;
    if (set == ConstantSet::printed) {
      k.K = 1.0;
      k.C = 1.0 / std::sqrt(std::pow(k.green, alpha) * gg);
    } else {
      k.K = 1.0 / k.green;
      k.C = 1.0 / std::sqrt(std::pow(k.green, alpha - 1.0) * gg);
    }
    k.c1 = 1.0;
  }
  k.c2 = 1.0 / (k.C * k.c1);
  return k;
}

struct FdParams {
  int d = 3;
  double alpha = 0.5;
  double epsilon = 1e-4;
  double M = 1e4;
  ModelConstants constants;

  double p_eps_M() const { return std::pow(epsilon, -alpha) - std::pow(M, -alpha); }
};

inline FdParams make_fd_params(int d, double alpha, double epsilon, double M, ConstantSet set = ConstantSet::escape) {
  if (!(epsilon > 0.0 && epsilon < M)) throw ParameterError("F_d needs 0 < epsilon < M");
  return {d, alpha, epsilon, M, model_constants(d, alpha, set)};
}

/// F_d(lambda) = K {p - int_eps^M alpha z^{-alpha-1} / (1 + K' lambda z) dz}, evaluated as
/// K alpha K' lambda int_eps^M z^{-alpha} / (1 + K' lambda z) dz (same integral, no
/// cancellation against p), with z = e^w.
inline double f_d_lambda(const FdParams& p, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be nonnegative");
  if (!(p.epsilon > 0.0 && p.epsilon < p.M)) throw ParameterError("F_d needs 0 < epsilon < M");
  if (lambda == 0.0) return 0.0;
  const double a = p.alpha;
  const double c = p.constants.K_prime * lambda;
  auto g = [&](double w) {
    const double z = std::exp(w);
    return std::pow(z, 1.0 - a) / (1.0 + c * z);
  };
  const double lo = std::log(p.epsilon);
  const double hi = std::log(p.M);
  // Split at the knee w = -log c where the integrand changes slope.
  std::vector<double> cuts{lo, hi};
  const double knee = -std::log(c);
  for (double k : {-2.0, 0.0, 2.0}) {
    if (knee + k > lo && knee + k < hi) cuts.push_back(knee + k);
  }
  std::sort(cuts.begin(), cuts.end());
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, cuts[i], cuts[i + 1], 12, 1e-13);
  }
  return p.constants.K * a * c * integral;
}

/// lim F_d(lambda) as eps -> 0, M -> infinity: K (K' lambda)^alpha Gamma(1+alpha) Gamma(1-alpha).
inline double f_d_limit(const ModelConstants& k, double lambda) {
  return k.K * std::pow(k.K_prime * lambda, k.alpha) * boost::math::tgamma(1.0 + k.alpha) *
         boost::math::tgamma(1.0 - k.alpha);
}

struct FdIdentityPoint {
  double lambda = 0.0;
  double t = 0.0;
  double lhs = 0.0;  ///< (t^alpha / c2^2) F_d(lambda / t)
  double rhs = 0.0;  ///< lambda^alpha
  double deviation() const { return std::abs(lhs - rhs); }
};

struct FdIdentityReport {
  int d = 3;
  double alpha = 0.5;
  double epsilon = 0.0;
  double M = 0.0;
  ModelConstants constants;
  std::vector<FdIdentityPoint> points;
  double max_deviation = 0.0;
  double max_relative_deviation = 0.0;  ///< over points with lambda > 0
};

inline FdIdentityReport fd_limit_identity_check(int d, double alpha, std::span<const double> lambdas,
                                                std::span<const double> ts, double epsilon, double M,
                                                ConstantSet set = ConstantSet::escape) {
  const auto p = make_fd_params(d, alpha, epsilon, M, set);
  FdIdentityReport r;
  r.d = d;
  r.alpha = alpha;
  r.epsilon = epsilon;
  r.M = M;
  r.constants = p.constants;
  const double c2sq = p.constants.c2 * p.constants.c2;
  for (double lambda : lambdas) {
    for (double t : ts) {
      if (!(t > 0.0)) throw ParameterError("t must be positive");
      FdIdentityPoint pt{lambda, t, std::pow(t, alpha) / c2sq * f_d_lambda(p, lambda / t), std::pow(lambda, alpha)};
      r.max_deviation = std::max(r.max_deviation, pt.deviation());
      if (lambda > 0.0) r.max_relative_deviation = std::max(r.max_relative_deviation, pt.deviation() / pt.rhs);
      r.points.push_back(pt);
    }
  }
  return r;
}

}  // namespace trapfk

#endif  // TRAPFK_FK_LIMIT_HPP
