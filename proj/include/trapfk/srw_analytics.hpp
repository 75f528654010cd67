#ifndef TRAPFK_SRW_ANALYTICS_HPP
#define TRAPFK_SRW_ANALYTICS_HPP

// Potential theory of the simple random walk: the free Green's function at
// the origin, Green's functions killed on leaving a Euclidean ball, hitting
// probabilities and the trap hitting sum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "trapfk/errors.hpp"
#include "trapfk/lattice.hpp"
#include "trapfk/lattice_env.hpp"
#include "trapfk/parallel.hpp"
#include "trapfk/rng.hpp"
#include "trapfk/stats_kit.hpp"

namespace trapfk {

// ---------------------------------------------------------------------------
// Free Green's function G_d(0).
//
// G_d(0) = sum_k P[Y(k) = 0] = int_0^inf e^{-t} I_0(t/d)^d dt, the sum
// rewritten through the continuous-time walk whose coordinates move
// independently, so the d-dimensional return probability is the d-th power
// of the one-dimensional one. The integral is cut at T; the tail is bracketed
// using
//   (2 pi x)^{-1/2} kL(X) <= e^{-x} I_0(x) <= (2 pi x)^{-1/2} kU(X),  x >= X,
// both from e^{-x} I_0(x) = (2/pi) int_0^1 e^{-2xu^2} (1-u^2)^{-1/2} du.
// ---------------------------------------------------------------------------

struct GreenBracket {
  double value = 0.0;  ///< midpoint
  double lower = 0.0;
  double upper = 0.0;
  double cutoff = 0.0;  ///< T
  double width() const noexcept { return upper - lower; }
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

namespace detail {

inline double scaled_bessel_i0(double x) {
  if (x < 600.0) return boost::math::cyl_bessel_i(0, x) * std::exp(-x);
  // Far beyond any cutoff used here; asymptotic series is accurate to ~1e-12.
  const double t = 1.0 / (8.0 * x);
  return (1.0 + t + 4.5 * t * t + 37.5 * t * t * t) / std::sqrt(2.0 * std::numbers::pi * x);
}

inline double tail_upper_factor(double X) {
  const double ca = 1.0 / (std::sqrt(0.5) * (1.0 + std::sqrt(0.5)));
  return 1.0 + ca / (4.0 * X) + std::exp(-X) * std::sqrt(2.0 * std::numbers::pi * X);
}

inline double tail_lower_factor(double X) {
  return 1.0 - (2.0 / std::numbers::pi) * std::exp(-2.0 * X) / (4.0 * X) * std::sqrt(2.0 * std::numbers::pi * X);
}

}  // namespace detail

/// Bracket for G_d(0) with the integral truncated at `cutoff`.
inline GreenBracket green_free_at_cutoff(int d, double cutoff) {
  if (d <= 2) throw DivergenceError("G_d(0) is infinite for d <= 2 (recurrent walk)");
  if (!(cutoff > 2.0 * d)) throw ParameterError("cutoff too small");
  const double dd = d;
  auto integrand = [dd](double t) { return std::pow(detail::scaled_bessel_i0(t / dd), dd); };
  // Split where the integrand changes character to keep the adaptive rule cheap.
  double q = 0.0;
  double qerr = 0.0;
  double a = 0.0;
  for (double b : {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0, 16384.0}) {
    const double hi = std::min(b, cutoff);
    if (hi <= a) break;
    double err = 0.0;
    q += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, hi, 15, 1e-14, &err);
    qerr += err;
    a = hi;
  }
  if (a < cutoff) {
    double err = 0.0;
    q += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, cutoff, 15, 1e-14, &err);
    qerr += err;
  }
  qerr += 1e-15 * q;
  const double X = cutoff / dd;
  const double tail_base =
      std::pow(dd / (2.0 * std::numbers::pi), dd / 2.0) * std::pow(cutoff, 1.0 - dd / 2.0) / (dd / 2.0 - 1.0);
  GreenBracket g;
  g.cutoff = cutoff;
  g.lower = q - qerr + std::pow(detail::tail_lower_factor(X), dd) * tail_base;
  g.upper = q + qerr + std::pow(detail::tail_upper_factor(X), dd) * tail_base;
  g.value = 0.5 * (g.lower + g.upper);
  return g;
}

/// G_d(0) bracketed to width <= precision.
inline GreenBracket green_free(int d, double precision = 1e-6) {
  if (d <= 2) throw DivergenceError("G_d(0) is infinite for d <= 2 (recurrent walk)");
  if (!(precision > 0.0)) throw ParameterError("precision must be positive");
  double cutoff = 16.0 * d;
  GreenBracket g = green_free_at_cutoff(d, cutoff);
  while (g.width() > precision) {
    cutoff *= 2.0;
    if (cutoff > 1e7) throw ParameterError("requested precision not reachable");
    g = green_free_at_cutoff(d, cutoff);
  }
  return g;
}

/// Cached G_d(0) at 1e-9 precision (the value every constant uses).
inline double green_constant(int d) {
  static const std::map<int, double> cache = [] {
    std::map<int, double> m;
    for (int dd = 3; dd <= kMaxDim; ++dd) m[dd] = green_free(dd, 1e-9).value;
    return m;
  }();
  if (auto it = cache.find(d); it != cache.end()) return it->second;
  return green_free(d, 1e-9).value;
}

/// a_d = (d/2) Gamma(d/2 - 1) pi^{-d/2}, the Newtonian-potential constant of the walk.
inline double newton_constant(int d) {
  if (d <= 2) throw DivergenceError("a_d is defined for d >= 3");
  return 0.5 * d * boost::math::tgamma(0.5 * d - 1.0) * std::pow(std::numbers::pi, -0.5 * d);
}

// ---------------------------------------------------------------------------
// Killed Green's functions on D(r) = {|x|_2 <= r}.
// ---------------------------------------------------------------------------

enum class GreenMethod { exact, monte_carlo };

inline std::string to_string(GreenMethod m) { return m == GreenMethod::exact ? "exact-linear-solve" : "monte-carlo"; }

inline constexpr std::size_t kExactCapacity = 1'000'000;

/// Sparse SPD system (I - P_D) G(., y) = e_y on the sites of D(r), indexed
/// in lexicographic order. One solve yields a whole column G(., y).
///
/// With `removed` set, that site is taken out of the domain as well (the walk
/// is killed there too), which is the system for harmonic measure of a point.
template <int D>
class BallGreenSolver {
 public:
  explicit BallGreenSolver(double radius, double tolerance = 1e-13, std::optional<Site<D>> removed = std::nullopt)
      : radius_(radius), tol_(tolerance), removed_(removed) {
    if (!(radius >= 1.0)) throw ParameterError("ball radius must be >= 1");
    sites_ = ball_offsets<D>(radius);
    if (removed_) {
      const auto it = std::find(sites_.begin(), sites_.end(), *removed_);
      if (it == sites_.end()) throw PreconditionError("removed site is not in the ball");
      sites_.erase(it);
    }
    if (sites_.size() > kExactCapacity) {
      throw CapacityError("ball of radius " + std::to_string(radius) + " has " + std::to_string(sites_.size()) +
                          " sites; exact solve is limited to " + std::to_string(kExactCapacity) +
                          " (use the Monte Carlo method)");
    }
    R_ = static_cast<std::int32_t>(std::floor(radius));
    side_ = 2 * R_ + 3;  // one layer of padding so neighbours never leave the table
    std::size_t cells = 1;
    for (int i = 0; i < D; ++i) cells *= static_cast<std::size_t>(side_);
    index_.assign(cells, -1);
    for (std::size_t k = 0; k < sites_.size(); ++k) index_[cell(sites_[k])] = static_cast<std::int64_t>(k);
    if (removed_) index_[cell(*removed_)] = -1;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(sites_.size() * (2 * D + 1));
    const double w = -1.0 / (2.0 * D);
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      triplets.emplace_back(static_cast<int>(k), static_cast<int>(k), 1.0);
      for (std::uint32_t s = 0; s < 2 * D; ++s) {
        const auto j = index_of(step<D>(sites_[k], s));
        if (j) triplets.emplace_back(static_cast<int>(k), static_cast<int>(*j), w);
      }
    }
    A_.resize(static_cast<Eigen::Index>(sites_.size()), static_cast<Eigen::Index>(sites_.size()));
    A_.setFromTriplets(triplets.begin(), triplets.end());
    cg_.setTolerance(tol_);
    cg_.setMaxIterations(100000);
    cg_.compute(A_);
  }

  double radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return sites_.size(); }
  const std::vector<Site<D>>& sites() const noexcept { return sites_; }

  std::optional<std::size_t> index_of(const Site<D>& x) const {
    for (int i = 0; i < D; ++i) {
      if (x[i] < -R_ || x[i] > R_) return std::nullopt;
    }
    const auto v = index_[cell(x)];
    if (v < 0) return std::nullopt;
    return static_cast<std::size_t>(v);
  }

  /// G_{D(r)}(., y) for every site of the ball.
  Eigen::VectorXd column(const Site<D>& y) const {
    const auto j = index_of(y);
    if (!j) throw PreconditionError("site " + to_string<D>(y) + " is not in the ball");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sites_.size()));
    b[static_cast<Eigen::Index>(*j)] = 1.0;
    Eigen::VectorXd x = cg_.solve(b);
    return x;
  }

  /// Solve (I - P_D) u = b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (b.size() != static_cast<Eigen::Index>(sites_.size())) throw InputError("right-hand side has the wrong size");
    return cg_.solve(b);
  }

  double value(const Eigen::VectorXd& col, const Site<D>& x) const {
    const auto i = index_of(x);
    if (!i) throw PreconditionError("site " + to_string<D>(x) + " is not in the ball");
    return col[static_cast<Eigen::Index>(*i)];
  }

  /// max over sites x of |G(x,y) - 1{x=y} - (2d)^-1 sum_{z~x, z in D} G(z,y)|.
  double harmonicity_residual(const Eigen::VectorXd& col, const Site<D>& y) const {
    const auto j = index_of(y);
    Eigen::VectorXd r = A_ * col;
    if (j) r[static_cast<Eigen::Index>(*j)] -= 1.0;
    return r.cwiseAbs().maxCoeff();
  }

 private:
  std::size_t cell(const Site<D>& x) const {
    std::size_t c = 0;
    for (int i = 0; i < D; ++i) c = c * static_cast<std::size_t>(side_) + static_cast<std::size_t>(x[i] + R_ + 1);
    return c;
  }

  double radius_;
  double tol_;
  std::optional<Site<D>> removed_;
  std::int32_t R_ = 0;
  std::int32_t side_ = 0;
  std::vector<Site<D>> sites_;
  std::vector<std::int64_t> index_;
  Eigen::SparseMatrix<double> A_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg_;
};

/// Expected visits to y before leaving D(r), walk started at x; exact solve.
template <int D>
double green_ball_exact(double r, const Site<D>& x, const Site<D>& y) {
  BallGreenSolver<D> solver(r);
  return solver.value(solver.column(y), x);
}

/// Monte Carlo estimate of the same quantity from `walks` independent walks.
template <int D>
StatsSummary green_ball_mc(double r, const Site<D>& x, const Site<D>& y, std::size_t walks, std::uint64_t seed,
                           unsigned threads = 1) {
  if (!within_radius(norm_sq<D>(x), r) || !within_radius(norm_sq<D>(y), r)) {
    throw PreconditionError("green_ball: both sites must lie in D(r)");
  }
  std::vector<double> visits(walks);
  parallel_for(walks, threads, [&](std::size_t w) {
    auto rng = seed_stream(seed, w, StreamPurpose::walk);
    Site<D> p = x;
    double count = 0.0;
    while (within_radius(norm_sq<D>(p), r)) {
      if (p == y) count += 1.0;
      p = step<D>(p, rng.below(2 * D));
    }
    visits[w] = count;
  });
  auto s = summarize_mean(visits);
  s.method = "green/monte-carlo";
  return s;
}

template <int D>
double green_ball(double r, const Site<D>& x, const Site<D>& y, GreenMethod method = GreenMethod::exact,
                  std::size_t walks = 100000, std::uint64_t seed = 1) {
  if (method == GreenMethod::exact) return green_ball_exact<D>(r, x, y);
  return green_ball_mc<D>(r, x, y, walks, seed).estimate;
}

/// Requested entries G_{D(r)}(x, y) with their provenance.
template <int D>
struct GreenTable {
  int d = D;
  double radius = 0.0;
  GreenMethod method = GreenMethod::exact;
  double tolerance = 0.0;
  std::vector<std::pair<std::pair<Site<D>, Site<D>>, double>> entries;

  std::string to_csv() const {
    std::string out = "x,y,value,method,tolerance\n";
    char buf[64];
    for (const auto& [xy, v] : entries) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += "\"" + to_string<D>(xy.first) + "\",\"" + to_string<D>(xy.second) + "\"," + buf + "," +
             trapfk::to_string(method) + ",";
      std::snprintf(buf, sizeof buf, "%.3g", tolerance);
      out += std::string(buf) + "\n";
    }
    return out;
  }
};

/// Exact table for a set of (x, y) pairs; one solve per distinct y.
template <int D>
GreenTable<D> green_table(double r, const std::vector<std::pair<Site<D>, Site<D>>>& pairs, double tolerance = 1e-13) {
  BallGreenSolver<D> solver(r, tolerance);
  GreenTable<D> t;
  t.radius = r;
  t.tolerance = tolerance;
  std::map<Site<D>, Eigen::VectorXd> cols;
  for (const auto& [x, y] : pairs) {
    auto it = cols.find(y);
    if (it == cols.end()) it = cols.emplace(y, solver.column(y)).first;
    t.entries.push_back({{x, y}, solver.value(it->second, x)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Hitting probabilities p_r(0, x) = P_0[hit x before leaving D(r)].
// ---------------------------------------------------------------------------

struct HittingExact {
  double probability = 0.0;  ///< G(0,x) / G(x,x)
  double green_origin = 0.0; ///< G_{D(r)}(0, x)
  double green_diag = 0.0;   ///< G_{D(r)}(x, x)
  double residual = 0.0;     ///< harmonicity residual of the solve
};

template <int D>
HittingExact hitting_prob_exact(const BallGreenSolver<D>& solver, const Site<D>& x) {
  const auto col = solver.column(x);
  HittingExact h;
  h.green_origin = solver.value(col, origin<D>());
  h.green_diag = solver.value(col, x);
  h.probability = h.green_origin / h.green_diag;
  h.residual = solver.harmonicity_residual(col, x);
  return h;
}

template <int D>
HittingExact hitting_prob_exact(double r, const Site<D>& x) {
  BallGreenSolver<D> solver(r);
  return hitting_prob_exact<D>(solver, x);
}

/// P_0[hit x before leaving D(r)] from its own boundary-value problem: h = 1
/// at x, 0 outside D(r), harmonic elsewhere. Shares no solve with the
/// Green's-function route, so h(0) G(x,x) = G(0,x) is a genuine cross-check.
template <int D>
double hitting_prob_harmonic(double r, const Site<D>& x, double tolerance = 1e-13) {
  if (x == origin<D>()) return 1.0;
  BallGreenSolver<D> solver(r, tolerance, x);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(solver.size()));
  for (std::uint32_t s = 0; s < 2 * D; ++s) {
    if (const auto i = solver.index_of(step<D>(x, s))) b[static_cast<Eigen::Index>(*i)] += 1.0 / (2.0 * D);
  }
  const auto h = solver.solve(b);
  return solver.value(h, origin<D>());
}

/// Fraction of walks from `start` that visit `target` before leaving the ball
/// of radius r around `center`.
template <int D>
StatsSummary hitting_prob_mc(double r, const Site<D>& center, const Site<D>& start, const Site<D>& target,
                             std::size_t walks, std::uint64_t seed, unsigned threads = 1) {
  std::vector<std::uint8_t> hit(walks, 0);
  parallel_for(walks, threads, [&](std::size_t w) {
    auto rng = seed_stream(seed, w, StreamPurpose::walk);
    Site<D> p = start;
    while (within_radius(dist_sq<D>(p, center), r)) {
      if (p == target) {
        hit[w] = 1;
        return;
      }
      p = step<D>(p, rng.below(2 * D));
    }
  });
  std::size_t hits = 0;
  for (auto h : hit) hits += h;
  auto s = summarize_proportion(hits, walks);
  s.method = "hitting/monte-carlo";
  return s;
}

template <int D>
double hitting_prob(double r, const Site<D>& x, GreenMethod method = GreenMethod::exact, std::size_t walks = 100000,
                    std::uint64_t seed = 1) {
  const double nx = norm<D>(x);
  if (!(nx > 0.0 && nx < r)) throw PreconditionError("hitting_prob needs 0 < |x| < r");
  if (method == GreenMethod::exact) return hitting_prob_exact<D>(r, x).probability;
  return hitting_prob_mc<D>(r, origin<D>(), origin<D>(), x, walks, seed).estimate;
}

/// The explicit-constant envelopes around the asymptotic hitting bounds:
///   lower:   (a/G)(|x|^{2-d} - r^{2-d}) - c_low |x|^{1-d}
///   upper:   a (|x|^{2-d} - r^{2-d}) + c_up |x|^{1-d}
///   refined: (a/G)(|x|^{2-d} - r^{2-d} + c_ref |x|^{1-d}) (1 + c_edge (r - |x|)^{2-d})
struct HittingEnvelope {
  double c_low = 0.0;
  double c_up = 0.0;
  double c_ref = 0.0;
  double c_edge = 0.0;
};

struct HittingBounds {
  double lower = 0.0;
  double upper = 0.0;
  double refined_upper = 0.0;
};

inline HittingBounds hitting_bounds(int d, double r, double abs_x, const HittingEnvelope& env) {
  const double a = newton_constant(d);
  const double G = green_constant(d);
  const double pot = std::pow(abs_x, 2.0 - d) - std::pow(r, 2.0 - d);
  const double corr = std::pow(abs_x, 1.0 - d);
  HittingBounds b;
  b.lower = a / G * pot - env.c_low * corr;
  b.upper = a * pot + env.c_up * corr;
  b.refined_upper = a / G * (pot + env.c_ref * corr) * (1.0 + env.c_edge * std::pow(r - abs_x, 2.0 - d));
  return b;
}

/// An exact hitting probability at radius r, used to fit envelope constants.
struct EnvelopeFitPoint {
  double r = 0.0;
  double abs_x = 0.0;
  double p = 0.0;
};

/// Smallest nonnegative constants (times `margin`) for which every fit point
/// satisfies the three envelopes. The refined bound has two constants; among
/// the admissible pairs the one minimising c_ref + c_edge is taken, scanning
/// c_ref on a grid of step 1e-4 and solving for c_edge, which enters linearly.
inline HittingEnvelope fit_hitting_envelope(int d, std::span<const EnvelopeFitPoint> pts, double margin = 1.1) {
  if (pts.empty()) throw InputError("envelope fit needs at least one point");
  const double a = newton_constant(d);
  const double G = green_constant(d);
  HittingEnvelope env;
  double c_ref_floor = 0.0;
  for (const auto& q : pts) {
    const double pot = std::pow(q.abs_x, 2.0 - d) - std::pow(q.r, 2.0 - d);
    const double corr = std::pow(q.abs_x, 1.0 - d);
    env.c_low = std::max(env.c_low, (a / G * pot - q.p) / corr);
    env.c_up = std::max(env.c_up, (q.p - a * pot) / corr);
    c_ref_floor = std::max(c_ref_floor, (q.p * G / a - pot) / corr);
  }
  double best = std::numeric_limits<double>::infinity();
  for (double c_ref = 0.0; c_ref <= c_ref_floor + 1e-12; c_ref += 1e-4) {
    double c_edge = 0.0;
    for (const auto& q : pts) {
      const double pot = std::pow(q.abs_x, 2.0 - d) - std::pow(q.r, 2.0 - d);
      const double base = a / G * (pot + c_ref * std::pow(q.abs_x, 1.0 - d));
      if (base <= 0.0) {
        c_edge = std::numeric_limits<double>::infinity();
        break;
      }
      c_edge = std::max(c_edge, (q.p / base - 1.0) / std::pow(q.r - q.abs_x, 2.0 - d));
    }
    if (c_ref + c_edge < best) {
      best = c_ref + c_edge;
      env.c_ref = c_ref;
      env.c_edge = c_edge;
    }
  }
  if (c_ref_floor < best) {
    env.c_ref = c_ref_floor;
    env.c_edge = 0.0;
  }
  env.c_low *= margin;
  env.c_up *= margin;
  env.c_ref *= margin;
  env.c_edge *= margin;
  return env;
}

// ---------------------------------------------------------------------------
// Hitting sum V_x(n) = sum_{y deep} P_x[hit y before leaving D_x(rho)].
// ---------------------------------------------------------------------------

/// Exact: one killed-Green solve per deep trap in D_x(rho).
template <int D>
double hitting_sum_exact(const TrapSets<D>& sets, const Site<D>& x) {
  const double rho = sets.scale_set().rho;
  const auto traps = sets.deep_within(x, rho);
  if (traps.empty()) return 0.0;
  BallGreenSolver<D> solver(rho);
  double v = 0.0;
  for (const auto& y : traps) v += hitting_prob_exact<D>(solver, y - x).probability;
  return v;
}

/// Monte Carlo: mean number of distinct deep traps visited before leaving
/// D_x(rho), an unbiased estimator of the same sum.
template <int D>
StatsSummary hitting_sum_mc(const TrapSets<D>& sets, const Site<D>& x, std::size_t walks, std::uint64_t seed,
                            unsigned threads = 1) {
  const double rho = sets.scale_set().rho;
  std::vector<double> counts(walks);
  parallel_for(walks, threads, [&](std::size_t w) {
    auto rng = seed_stream(seed, w, StreamPurpose::walk);
    std::vector<Site<D>> seen;
    Site<D> p = x;
    while (within_radius(dist_sq<D>(p, x), rho)) {
      if (sets.is_deep(p) && std::find(seen.begin(), seen.end(), p) == seen.end()) seen.push_back(p);
      p = step<D>(p, rng.below(2 * D));
    }
    counts[w] = static_cast<double>(seen.size());
  });
  auto s = summarize_mean(counts);
  s.method = "hitting-sum/monte-carlo";
  return s;
}

template <int D>
double hitting_sum_V(const TrapSets<D>& sets, const Site<D>& x, GreenMethod method = GreenMethod::monte_carlo,
                     std::size_t walks = 20000, std::uint64_t seed = 1) {
  if (!sets.is_safe_interior(x)) throw PreconditionError("hitting_sum_V needs x in E_0(n)");
  if (method == GreenMethod::exact) return hitting_sum_exact<D>(sets, x);
  return hitting_sum_mc<D>(sets, x, walks, seed).estimate;
}

}  // namespace trapfk

#endif  // TRAPFK_SRW_ANALYTICS_HPP
