#ifndef TRAPFK_WALK_SIM_HPP
#define TRAPFK_WALK_SIM_HPP

// The embedded walk Y with exponential marks, the clock S(k) = sum e_i tau_{Y(i)},
// the time-changed trajectory X, the rescaled triple (S_N, Y_N, X_N), the
// annealed CTRW, and the two-time aging estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "trapfk/errors.hpp"
#include "trapfk/fk_limit.hpp"
#include "trapfk/lattice.hpp"
#include "trapfk/lattice_env.hpp"
#include "trapfk/parallel.hpp"
#include "trapfk/rng.hpp"
#include "trapfk/stats_kit.hpp"

namespace trapfk {

enum class StopKind { step_budget, exit_region, clock_budget };

struct StopRule {
  StopKind kind = StopKind::step_budget;
  double clock_budget = 0.0;

  static StopRule steps() { return {}; }
  static StopRule exit_region() { return {StopKind::exit_region, 0.0}; }
  static StopRule clock(double budget) { return {StopKind::clock_budget, budget}; }
};

/// Unit marks (e == 1) are a testing hook.
enum class MarkMode { exponential, unit };

struct WalkOptions {
  std::size_t max_steps = 1000;
  StopRule stop{};
  MarkMode marks = MarkMode::exponential;
};

template <int D>
struct TrajectoryRecord {
  std::vector<Site<D>> Y;   ///< Y(0..K)
  std::vector<double> e;    ///< e_0..e_{K-1}
  std::vector<double> tau;  ///< tau_{Y(0)}..tau_{Y(K-1)}
  std::vector<double> S;    ///< S(0..K)
  std::optional<std::size_t> exit_step;
  bool truncated = false;

  std::size_t steps() const noexcept { return e.size(); }
};

/// What a streamed walk ended with.
template <int D>
struct WalkOutcome {
  std::size_t steps = 0;  ///< K
  Site<D> last{};         ///< Y(K)
  double clock = 0.0;     ///< S(K)
  std::optional<std::size_t> exit_step;
  bool truncated = false;
};

/// Neighbour index in [0, 2D) from the top 32 bits of a word.
template <int D>
inline std::uint32_t direction_from(std::uint64_t w) noexcept {
  return static_cast<std::uint32_t>(((w >> 32) * (2u * D)) >> 32);
}

/// Core loop. For k = 0, 1, ... the visitor sees (k, Y(k), e_k, tau_{Y(k)}, S(k+1))
/// and may return false to stop after step k. Stop rules are checked on Y(k)
/// and S(k) before step k is taken.
template <int D, typename Visitor>
WalkOutcome<D> walk_stream(const Environment<D>& env, const Site<D>& start, const WalkOptions& opt,
                           CounterStream& rng, Visitor&& visit) {
  if (opt.max_steps < 1) throw ParameterError("max_steps must be >= 1");
  if (opt.stop.kind == StopKind::exit_region && !env.bounded()) {
    throw ParameterError("exit stop rule needs a bounded environment region");
  }
  WalkOutcome<D> out;
  Site<D> y = start;
  double s = 0.0;
  std::size_t k = 0;
  while (true) {
    if (opt.stop.kind == StopKind::exit_region && !env.in_region(y)) {
      out.exit_step = k;
      break;
    }
    if (opt.stop.kind == StopKind::clock_budget && s > opt.stop.clock_budget) break;
    if (k == opt.max_steps) {
      out.truncated = opt.stop.kind != StopKind::step_budget;
      break;
    }
    // Two words per step: one for the direction, one for the mark.
    const std::uint64_t w_dir = rng();
    const std::uint64_t w_mark = rng();
    const double e = opt.marks == MarkMode::unit ? 1.0 : -std::log(to_unit_open(w_mark));
    const double t = env.tau(y);
    s += e * t;
    const bool go_on = visit(k, std::as_const(y), e, t, s);
    y = step<D>(y, direction_from<D>(w_dir));
    ++k;
    if (!go_on) break;
  }
  out.steps = k;
  out.last = y;
  out.clock = s;
  return out;
}

template <int D>
TrajectoryRecord<D> run_walk(const Environment<D>& env, const WalkOptions& opt, CounterStream& rng,
                             const Site<D>& start = origin<D>()) {
  TrajectoryRecord<D> r;
  r.S.push_back(0.0);
  const auto out = walk_stream<D>(env, start, opt, rng, [&](std::size_t, const Site<D>& y, double e, double t, double s) {
    r.Y.push_back(y);
    r.e.push_back(e);
    r.tau.push_back(t);
    r.S.push_back(s);
    return true;
  });
  r.Y.push_back(out.last);
  r.exit_step = out.exit_step;
  r.truncated = out.truncated;
  return r;
}

/// A trajectory from externally supplied (Y, e) (testing hook). tau is read
/// from the environment; Y must be a nearest-neighbour path.
template <int D>
TrajectoryRecord<D> scripted_trajectory(const Environment<D>& env, std::vector<Site<D>> Y, std::vector<double> e) {
  if (Y.empty() || e.size() + 1 != Y.size()) throw InputError("scripted trajectory needs |Y| = |e| + 1 >= 1");
  TrajectoryRecord<D> r;
  r.Y = std::move(Y);
  r.e = std::move(e);
  r.S.push_back(0.0);
  for (std::size_t k = 0; k < r.e.size(); ++k) {
    if (l1_dist<D>(r.Y[k], r.Y[k + 1]) != 1) throw InputError("scripted path is not nearest-neighbour at k = " + std::to_string(k));
    if (!(r.e[k] > 0.0)) throw InputError("marks must be positive");
    r.tau.push_back(env.tau(r.Y[k]));
    r.S.push_back(r.S.back() + r.e[k] * r.tau.back());
  }
  for (std::size_t k = 0; k < r.Y.size(); ++k) {
    if (!env.in_region(r.Y[k])) {
      r.exit_step = k;
      break;
    }
  }
  return r;
}

/// X(t) = Y(k) for S(k) <= t < S(k+1).
template <int D>
const Site<D>& position_at(const TrajectoryRecord<D>& traj, double t) {
  if (!(t >= 0.0)) throw ParameterError("time must be nonnegative");
  if (!(t < traj.S.back())) {
    throw HorizonExceeded("t = " + std::to_string(t) + " is beyond the trajectory's clock S(K) = " +
                          std::to_string(traj.S.back()));
  }
  const auto it = std::upper_bound(traj.S.begin(), traj.S.end(), t);
  return traj.Y[static_cast<std::size_t>(it - traj.S.begin()) - 1];
}

/// Index k with S(k) <= t < S(k+1).
template <int D>
std::size_t step_index_at(const TrajectoryRecord<D>& traj, double t) {
  (void)position_at<D>(traj, t);
  return static_cast<std::size_t>(std::upper_bound(traj.S.begin(), traj.S.end(), t) - traj.S.begin()) - 1;
}

/// Trajectory CSV: k, y1..yd, e_k, S(k) at the given stride (e_K is empty).
template <int D>
std::string trajectory_csv(const TrajectoryRecord<D>& traj, std::size_t stride = 1) {
  if (stride == 0) throw ParameterError("stride must be >= 1");
  std::string out = "k";
  for (int i = 1; i <= D; ++i) out += ",y" + std::to_string(i);
  out += ",e,S\n";
  char buf[64];
  for (std::size_t k = 0; k < traj.Y.size(); k += stride) {
    out += std::to_string(k);
    for (int i = 0; i < D; ++i) out += "," + std::to_string(traj.Y[k][i]);
    if (k < traj.e.size()) {
      std::snprintf(buf, sizeof buf, ",%.17g", traj.e[k]);
      out += buf;
    } else {
      out += ",";
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", traj.S[k]);
    out += buf;
  }
  return out;
}

/// Sparse record for long runs: (k, Y(k), S(k)) every `stride` steps, plus
/// the distinct deep traps visited.
template <int D>
struct CheckpointRecord {
  std::vector<std::size_t> k;
  std::vector<Site<D>> Y;
  std::vector<double> S;
  std::vector<Site<D>> deep_visited;
  WalkOutcome<D> outcome;
};

template <int D>
CheckpointRecord<D> run_walk_checkpointed(const TrapSets<D>& sets, const WalkOptions& opt, CounterStream& rng,
                                          std::size_t stride, const Site<D>& start = origin<D>()) {
  if (stride == 0) throw ParameterError("stride must be >= 1");
  CheckpointRecord<D> c;
  std::unordered_set<Site<D>, SiteHash<D>> seen;
  double s_prev = 0.0;
  c.outcome = walk_stream<D>(sets.environment(), start, opt, rng,
                             [&](std::size_t k, const Site<D>& y, double, double t, double s_next) {
                               if (k % stride == 0) {
                                 c.k.push_back(k);
                                 c.Y.push_back(y);
                                 c.S.push_back(s_prev);
                               }
                               if (sets.is_deep(y) && seen.insert(y).second) c.deep_visited.push_back(y);
                               s_prev = s_next;
                               return true;
                             });
  if (c.k.empty() || c.k.back() != c.outcome.steps) {
    c.k.push_back(c.outcome.steps);
    c.Y.push_back(c.outcome.last);
    c.S.push_back(c.outcome.clock);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Rescaling.
// ---------------------------------------------------------------------------

struct RescaledTriple {
  int d = 3;
  double N = 0.0;
  double f = 0.0;  ///< f(N)
  double C = 0.0;  ///< C_d(alpha)
  double T = 0.0;
  std::vector<double> t;         ///< uniform grid on [0, T]
  std::vector<double> S_N;       ///< S(floor(t f^2)) / N
  std::vector<double> Y_N;       ///< sqrt(d) Y(floor(t f^2)) / f, row-major
  std::vector<double> X_N;       ///< sqrt(d) X(t N) / f, row-major
  std::vector<std::size_t> S_N_inverse_steps;  ///< k* with S_N^{-1}(t) = k* / f^2

  std::span<const double> Y_at(std::size_t i) const { return {Y_N.data() + i * d, static_cast<std::size_t>(d)}; }
  std::span<const double> X_at(std::size_t i) const { return {X_N.data() + i * d, static_cast<std::size_t>(d)}; }
};

/// Right-continuous inverse of S_N at t, as a step index: S_N^{-1}(t) =
/// inf{u : S(floor(u f^2)) > t N} = k* / f^2 with k* = min{k : S(k) > t N}.
template <int D>
std::size_t S_N_inverse_step(const TrajectoryRecord<D>& traj, double N, double t) {
  const auto it = std::upper_bound(traj.S.begin(), traj.S.end(), t * N);
  if (it == traj.S.end()) throw HorizonExceeded("S_N^{-1}(t) lies beyond the trajectory");
  return static_cast<std::size_t>(it - traj.S.begin());
}

/// Y_N just before u = k / f^2, i.e. sqrt(d) Y(k - 1) / f. Y_N is a step
/// function jumping at multiples of 1/f^2, so evaluating the composition at
/// the inverse needs the left limit: X_N(t) = Y_N(S_N^{-1}(t)-).
template <int D>
std::vector<double> Y_N_left_limit(const TrajectoryRecord<D>& traj, double f, std::size_t k) {
  if (k == 0 || k > traj.Y.size()) throw PreconditionError("left limit needs 1 <= k <= K + 1");
  std::vector<double> v(D);
  for (int i = 0; i < D; ++i) v[i] = std::sqrt(static_cast<double>(D)) * traj.Y[k - 1][i] / f;
  return v;
}

template <int D>
RescaledTriple rescale(const TrajectoryRecord<D>& traj, double N, const ModelConstants& k, double T,
                       std::size_t grid_points) {
  if (k.d != D) throw UnsupportedDimension("constants dimension mismatch");
  if (grid_points < 2) throw ParameterError("need at least two grid points");
  if (!(N > 1.0 && T > 0.0)) throw ParameterError("need N > 1 and T > 0");
  RescaledTriple r;
  r.d = D;
  r.N = N;
  r.f = k.f(N);
  r.C = k.C;
  r.T = T;
  const double f2 = r.f * r.f;
  const auto last_step = static_cast<std::size_t>(std::floor(T * f2));
  if (last_step >= traj.Y.size()) {
    throw HorizonExceeded("trajectory has " + std::to_string(traj.steps()) + " steps, rescaling needs " +
                          std::to_string(last_step));
  }
  if (!(T * N < traj.S.back())) throw HorizonExceeded("trajectory clock does not reach T N");
  const double sd = std::sqrt(static_cast<double>(D));
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    r.t.push_back(t);
    const auto ks = static_cast<std::size_t>(std::floor(t * f2));
    r.S_N.push_back(traj.S[ks] / N);
    for (int c = 0; c < D; ++c) r.Y_N.push_back(sd * traj.Y[ks][c] / r.f);
    const auto& x = position_at<D>(traj, t * N);
    for (int c = 0; c < D; ++c) r.X_N.push_back(sd * x[c] / r.f);
    r.S_N_inverse_steps.push_back(S_N_inverse_step<D>(traj, N, t));
  }
  return r;
}

/// Checks X_N(t) == Y_N(S_N^{-1}(t)-) bitwise at every grid point.
template <int D>
bool grid_identity_holds(const RescaledTriple& r, const TrajectoryRecord<D>& traj) {
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    const auto y = Y_N_left_limit<D>(traj, r.f, r.S_N_inverse_steps[i]);
    const auto x = r.X_at(i);
    for (int c = 0; c < D; ++c) {
      if (x[c] != y[c]) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Annealed CTRW.
// ---------------------------------------------------------------------------

/// SRW with fresh i.i.d. Pareto(alpha) waiting times (e == 1, tau_k = s_k).
/// Time convention as for the trap model: U(t) = Y(k) on [S(k), S(k+1)).
template <int D>
TrajectoryRecord<D> ctrw_trajectory(double alpha, std::size_t steps, CounterStream& rng) {
  detail::require_alpha_open(alpha);
  if (steps < 1) throw ParameterError("steps must be >= 1");
  TrajectoryRecord<D> r;
  Site<D> y = origin<D>();
  r.Y.push_back(y);
  r.S.push_back(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double s = std::pow(rng.uniform(), -1.0 / alpha);
    r.e.push_back(1.0);
    r.tau.push_back(s);
    r.S.push_back(r.S.back() + s);
    y = step<D>(y, direction_from<D>(rng()));
    r.Y.push_back(y);
  }
  return r;
}

/// U(t) streamed without storing the path.
template <int D>
Site<D> ctrw_position_at(double alpha, double t, CounterStream& rng, std::size_t max_steps = 1'000'000'000) {
  detail::require_alpha_open(alpha);
  Site<D> y = origin<D>();
  double s = 0.0;
  for (std::size_t k = 0; k < max_steps; ++k) {
    s += std::pow(rng.uniform(), -1.0 / alpha);
    if (s > t) return y;
    y = step<D>(y, direction_from<D>(rng()));
  }
  throw HorizonExceeded("CTRW did not reach the requested time within the step budget");
}

/// The constant C with C N^{-alpha/2} U(N) -> Z(1): C = sqrt(d Gamma(1 - alpha)),
/// from S(k) / k^{1/alpha} -> V(Gamma(1 - alpha)) for Pareto waiting times.
inline double ctrw_constant(int d, double alpha) {
  detail::require_alpha_open(alpha);
  return std::sqrt(d * boost::math::tgamma(1.0 - alpha));
}

// ---------------------------------------------------------------------------
// Aging.
// ---------------------------------------------------------------------------

enum class AgingMode { quenched, annealed };

inline std::string to_string(AgingMode m) { return m == AgingMode::quenched ? "quenched" : "annealed"; }

struct AgingEstimate {
  AgingMode mode = AgingMode::quenched;
  double t_w = 0.0;
  double theta = 0.0;
  StatsSummary same_site;  ///< P[X(t_w + theta t_w) = X(t_w)]
  StatsSummary no_jump;    ///< P[no jump during [t_w, (1 + theta) t_w]]
};

/// Positions at t_w and (1 + theta) t_w for one walk; returns (same site, no jump).
template <int D>
std::pair<bool, bool> aging_two_time(const Environment<D>& env, double t_w, double theta, CounterStream& rng,
                                     std::size_t max_steps) {
  const double t2 = (1.0 + theta) * t_w;
  std::optional<std::size_t> k1;
  Site<D> x1{};
  std::size_t k2 = 0;
  Site<D> x2{};
  bool done = false;
  WalkOptions opt;
  opt.max_steps = max_steps;
  opt.stop = StopRule::steps();
  walk_stream<D>(env, origin<D>(), opt, rng, [&](std::size_t k, const Site<D>& y, double, double, double s_next) {
    if (!k1 && s_next > t_w) {
      k1 = k;
      x1 = y;
    }
    if (s_next > t2) {
      k2 = k;
      x2 = y;
      done = true;
      return false;
    }
    return true;
  });
  if (!done) throw HorizonExceeded("aging walk did not reach (1 + theta) t_w within the step budget");
  return {x1 == x2, *k1 == k2};
}

template <int D>
AgingEstimate aging_probability_estimate(const Environment<D>& env, double t_w, double theta, std::size_t replicas,
                                         std::uint64_t seed, AgingMode mode = AgingMode::quenched,
                                         unsigned threads = 1, std::size_t max_steps = 1'000'000'000) {
  if (!(t_w > 0.0 && theta >= 0.0)) throw ParameterError("aging needs t_w > 0 and theta >= 0");
  if (replicas == 0) throw ParameterError("replicas must be >= 1");
  std::vector<std::uint8_t> same(replicas, 0);
  std::vector<std::uint8_t> still(replicas, 0);
  parallel_for(replicas, threads, [&](std::size_t i) {
    auto rng = seed_stream(seed, i, StreamPurpose::walk);
    std::pair<bool, bool> r;
    if (mode == AgingMode::quenched) {
      r = aging_two_time<D>(env, t_w, theta, rng, max_steps);
    } else {
      const Environment<D> fresh(env.tail(), mix64(env.master_seed() + 0x9E3779B97F4A7C15ull * (i + 1)),
                                 env.region_radius());
      r = aging_two_time<D>(fresh, t_w, theta, rng, max_steps);
    }
    same[i] = r.first;
    still[i] = r.second;
  });
  AgingEstimate a;
  a.mode = mode;
  a.t_w = t_w;
  a.theta = theta;
  std::size_t ns = 0;
  std::size_t nj = 0;
  for (std::size_t i = 0; i < replicas; ++i) {
    ns += same[i];
    nj += still[i];
  }
  a.same_site = summarize_proportion(ns, replicas);
  a.same_site.method = "aging/" + to_string(mode) + "/same-site";
  a.no_jump = summarize_proportion(nj, replicas);
  a.no_jump.method = "aging/" + to_string(mode) + "/no-jump";
  return a;
}

}  // namespace trapfk

#endif  // TRAPFK_WALK_SIM_HPP
