#ifndef TRAPFK_COARSE_GRAIN_HPP
#define TRAPFK_COARSE_GRAIN_HPP

// Decomposition of a trajectory into parts between successive exits of
// rho-balls, the trap-visit stopping times of each part, and the part score.
//
// Times lambda_{i,1..3} are searched only inside [j_i, j_{i+1}); a time that
// would fall at or after j_{i+1} is reported as infinite. The classification
// only ever compares these times with j_{i+1}, so censoring changes no score.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trapfk/errors.hpp"
#include "trapfk/lattice.hpp"
#include "trapfk/lattice_env.hpp"
#include "trapfk/parallel.hpp"
#include "trapfk/rng.hpp"
#include "trapfk/stats_kit.hpp"
#include "trapfk/walk_sim.hpp"

namespace trapfk {

inline constexpr double kInfiniteScore = std::numeric_limits<double>::infinity();

enum class PartKind {
  scored,  ///< conditions (31) and (32) hold; score is the mark-weighted time at y
  zero,    ///< condition (31) holds and no deep trap is hit before the part ends
  bad,     ///< anything else; score is infinite
};

inline std::string to_string(PartKind k) {
  switch (k) {
    case PartKind::scored:
      return "scored";
    case PartKind::zero:
      return "zero";
    default:
      return "bad";
  }
}

template <int D>
struct PartRecord {
  std::size_t index = 0;
  std::size_t j_start = 0;  ///< j_i
  std::size_t j_end = 0;    ///< j_{i+1}
  std::optional<std::size_t> lambda1;
  std::optional<std::size_t> lambda2;
  std::optional<std::size_t> lambda3;
  std::optional<Site<D>> y;  ///< trap hit at lambda1
  double score = 0.0;
  PartKind kind = PartKind::zero;
  Site<D> start{};         ///< Y(j_i)
  Site<D> displacement{};  ///< Y(j_{i+1}) - Y(j_i)
  bool start_ok = false;   ///< condition (31)
};

template <int D>
struct CoarseGrainReport {
  std::vector<std::size_t> j;          ///< j_0 = 0 < j_1 < ... (complete parts only)
  std::vector<PartRecord<D>> parts;    ///< complete parts
  std::optional<std::size_t> J;        ///< first part with infinite score
  bool truncated_final_part = false;   ///< the trajectory ends inside a part

  std::size_t finite_prefix() const noexcept { return J.value_or(parts.size()); }

  std::string to_csv() const {
    std::string out = "i,j,lambda1,lambda2,lambda3,y,score,kind,abs_r\n";
    auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string("inf"); };
    char buf[64];
    for (const auto& p : parts) {
      out += std::to_string(p.index) + "," + std::to_string(p.j_start) + "," + opt(p.lambda1) + "," + opt(p.lambda2) +
             "," + opt(p.lambda3) + ",\"" + (p.y ? trapfk::to_string<D>(*p.y) : std::string()) + "\",";
      std::snprintf(buf, sizeof buf, "%.17g", p.score);
      out += std::string(buf) + "," + trapfk::to_string(p.kind) + ",";
      std::snprintf(buf, sizeof buf, "%.17g\n", norm<D>(p.displacement));
      out += buf;
    }
    return out;
  }
};

/// Classify the part [j0, j1] of a trajectory (both indices into Y).
template <int D>
PartRecord<D> classify_part(const TrajectoryRecord<D>& traj, std::size_t j0, std::size_t j1, const TrapSets<D>& sets) {
  const auto& sc = sets.scale_set();
  const auto& env = sets.environment();
  PartRecord<D> p;
  p.j_start = j0;
  p.j_end = j1;
  p.start = traj.Y[j0];
  p.displacement = traj.Y[j1] - traj.Y[j0];
  p.start_ok = env.boundary_distance(traj.Y[j0]) > sc.rho && sets.is_safe(traj.Y[j0]) && sets.is_safe(traj.Y[j1]);

  for (std::size_t k = j0; k < j1; ++k) {
    if (sets.is_deep(traj.Y[k])) {
      p.lambda1 = k;
      break;
    }
  }
  if (!p.lambda1) {
    p.kind = p.start_ok ? PartKind::zero : PartKind::bad;
    p.score = p.start_ok ? 0.0 : kInfiniteScore;
    return p;
  }
  const Site<D> y = traj.Y[*p.lambda1];
  p.y = y;
  const auto nu_sq = sc.nu * sc.nu;
  for (std::size_t k = *p.lambda1; k < j1; ++k) {
    if (static_cast<double>(dist_sq<D>(traj.Y[k], y)) > nu_sq) {
      p.lambda2 = k;
      break;
    }
  }
  // lambda3 = min({k >= lambda1 : Y(k) in T \ {y}} u {k >= lambda2 : Y(k) in T}).
  for (std::size_t k = *p.lambda1; k < j1; ++k) {
    const auto& yk = traj.Y[k];
    const bool after_exit = p.lambda2 && k >= *p.lambda2;
    if ((yk != y || after_exit) && sets.is_deep(yk)) {
      p.lambda3 = k;
      break;
    }
  }
  const bool times_ok = p.lambda2 && *p.lambda1 < *p.lambda2 && *p.lambda2 < j1 && !p.lambda3;
  const bool trap_ok = sc.rho - dist<D>(y, traj.Y[j0]) > sc.nu && !sets.is_bad(y);
  if (p.start_ok && times_ok && trap_ok) {
    double s = 0.0;
    for (std::size_t k = *p.lambda1; k <= *p.lambda2; ++k) {
      if (traj.Y[k] == y) s += traj.e[k] * traj.tau[k];
    }
    p.kind = PartKind::scored;
    p.score = s;
  } else {
    p.kind = PartKind::bad;
    p.score = kInfiniteScore;
  }
  return p;
}

/// Next stopping time after j: min{k > j : |Y(k) - Y(j)| > rho}, if the trajectory reaches it.
template <int D>
std::optional<std::size_t> next_stopping_time(const TrajectoryRecord<D>& traj, std::size_t j, double rho) {
  const double rho_sq = rho * rho;
  for (std::size_t k = j + 1; k < traj.Y.size(); ++k) {
    if (static_cast<double>(dist_sq<D>(traj.Y[k], traj.Y[j])) > rho_sq) return k;
  }
  return std::nullopt;
}

template <int D>
CoarseGrainReport<D> coarse_grain(const TrajectoryRecord<D>& traj, const TrapSets<D>& sets) {
  const double rho = sets.scale_set().rho;
  CoarseGrainReport<D> r;
  r.j.push_back(0);
  while (true) {
    const std::size_t j0 = r.j.back();
    const auto j1 = next_stopping_time<D>(traj, j0, rho);
    if (!j1) {
      r.truncated_final_part = j0 + 1 < traj.Y.size();
      break;
    }
    auto part = classify_part<D>(traj, j0, *j1, sets);
    part.index = r.parts.size();
    if (!r.J && part.kind == PartKind::bad) r.J = part.index;
    r.parts.push_back(std::move(part));
    r.j.push_back(*j1);
  }
  if (r.parts.empty()) throw PreconditionError("trajectory contains no complete part");
  return r;
}

/// Coarse-grain a scripted (Y, e) sequence directly.
template <int D>
CoarseGrainReport<D> coarse_grain(std::vector<Site<D>> Y, std::vector<double> e, const TrapSets<D>& sets) {
  return coarse_grain<D>(scripted_trajectory<D>(sets.environment(), std::move(Y), std::move(e)), sets);
}

// ---------------------------------------------------------------------------
// Score sums against the clock.
// ---------------------------------------------------------------------------

struct DiscrepancyResult {
  double max_discrepancy = 0.0;  ///< max_{k <= k_eval} |S(j_k) - sum_{j<k} s_j| / 2^{n/alpha}
  std::size_t k_max = 0;
  std::size_t k_evaluated = 0;   ///< min(k_max, J, complete parts)
  std::optional<std::size_t> J;
  bool truncated = false;        ///< k_evaluated < k_max
};

template <int D>
DiscrepancyResult score_sum_discrepancy(const CoarseGrainReport<D>& report, const TrajectoryRecord<D>& traj, int n,
                                        double alpha, std::size_t k_max) {
  DiscrepancyResult d;
  d.k_max = k_max;
  d.J = report.J;
  const double norm_scale = std::exp2(static_cast<double>(n) / alpha);
  d.k_evaluated = std::min({k_max, report.finite_prefix(), report.parts.size()});
  d.truncated = d.k_evaluated < k_max;
  double sum = 0.0;
  for (std::size_t k = 1; k <= d.k_evaluated; ++k) {
    sum += report.parts[k - 1].score;
    d.max_discrepancy = std::max(d.max_discrepancy, std::abs(traj.S[report.j[k]] - sum) / norm_scale);
  }
  return d;
}

/// Fraction of replicas whose discrepancy is >= delta. By default a replica
/// with a bad part before k_max contributes its discrepancy up to J; with
/// bad_counts_as_exceeding it counts as a failure outright.
inline StatsSummary discrepancy_exceedance(std::span<const DiscrepancyResult> results, double delta,
                                          bool bad_counts_as_exceeding = false) {
  std::size_t hits = 0;
  for (const auto& r : results) {
    if (r.max_discrepancy >= delta || (bad_counts_as_exceeding && r.J && *r.J < r.k_max)) ++hits;
  }
  auto s = summarize_proportion(hits, results.size());
  s.method = "discrepancy/exceedance";
  return s;
}

// ---------------------------------------------------------------------------
// One part started at a fixed x.
// ---------------------------------------------------------------------------

template <int D>
struct ScoreSample {
  Site<D> x{};
  std::vector<double> scores;           ///< may contain +inf
  std::vector<Site<D>> displacements;   ///< r^n(x)
  std::size_t zero = 0;
  std::size_t infinite = 0;
  std::size_t nonzero() const noexcept { return scores.size() - zero; }
  std::size_t finite_nonzero() const noexcept { return scores.size() - zero - infinite; }

  double p_zero() const { return static_cast<double>(zero) / static_cast<double>(scores.size()); }
  double p_infinite() const { return static_cast<double>(infinite) / static_cast<double>(scores.size()); }
  double p_nonzero() const { return static_cast<double>(nonzero()) / static_cast<double>(scores.size()); }

  /// mean of exp(-lambda s / 2^{n/alpha}) over finite scores, with a bootstrap interval.
  StatsSummary laplace(double lambda, int n, double alpha) const {
    std::vector<double> v;
    const double scale = std::exp2(static_cast<double>(n) / alpha);
    for (double s : scores) {
      if (std::isfinite(s)) v.push_back(s / scale);
    }
    return empirical_laplace(v, lambda);
  }
};

/// The walk started at x up to j_1 = first exit of D_x(rho). tau is read
/// unchecked: every site before j_1 lies in D_x(rho), inside the region when
/// x is in E_0, and no tau is needed at Y(j_1).
template <int D>
TrajectoryRecord<D> walk_one_part(const TrapSets<D>& sets, const Site<D>& x, CounterStream& rng,
                                  std::size_t max_steps = 1'000'000'000) {
  const double rho_sq = sets.scale_set().rho * sets.scale_set().rho;
  const auto& env = sets.environment();
  TrajectoryRecord<D> t;
  t.S.push_back(0.0);
  Site<D> y = x;
  while (static_cast<double>(dist_sq<D>(y, x)) <= rho_sq) {
    if (t.e.size() == max_steps) throw HorizonExceeded("part did not finish within the step budget");
    const std::uint64_t w_dir = rng();
    const std::uint64_t w_mark = rng();
    const double e = -std::log(to_unit_open(w_mark));
    const double tau = env.tau_unchecked(y);
    t.Y.push_back(y);
    t.e.push_back(e);
    t.tau.push_back(tau);
    t.S.push_back(t.S.back() + e * tau);
    y = step<D>(y, direction_from<D>(w_dir));
  }
  t.Y.push_back(y);
  return t;
}

template <int D>
ScoreSample<D> sample_score_at(const TrapSets<D>& sets, const Site<D>& x, std::size_t replicas, std::uint64_t seed,
                               unsigned threads = 1) {
  if (!sets.is_safe_interior(x)) throw PreconditionError("sample_score_at needs x in E_0(n), got " + to_string<D>(x));
  if (replicas == 0) throw ParameterError("replicas must be >= 1");
  ScoreSample<D> out;
  out.x = x;
  out.scores.resize(replicas);
  out.displacements.resize(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    auto rng = seed_stream(seed, i, StreamPurpose::sampling);
    const auto traj = walk_one_part<D>(sets, x, rng);
    const auto part = classify_part<D>(traj, 0, traj.Y.size() - 1, sets);
    out.scores[i] = part.score;
    out.displacements[i] = part.displacement;
  });
  for (double s : out.scores) {
    if (s == 0.0) ++out.zero;
    if (!std::isfinite(s)) ++out.infinite;
  }
  return out;
}

/// h^2 {1 - mean exp(-xi . r / r(n))} with a bootstrap interval.
template <int D>
StatsSummary displacement_laplace_check(std::span<const Site<D>> displacements, std::span<const double> xi,
                                        const ScaleSet& sc) {
  if (displacements.empty()) throw InputError("displacement_laplace_check: empty sample");
  if (xi.size() != static_cast<std::size_t>(D)) throw InputError("xi dimension mismatch");
  std::vector<double> v(displacements.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double dot = 0.0;
    for (int c = 0; c < D; ++c) dot += xi[c] * displacements[i][c];
    v[i] = std::exp(-dot / sc.r);
  }
  const double h2 = sc.h * sc.h;
  auto m = bootstrap_ci(v, sample_mean, 0.95, kDefaultResamples,
                        seed_stream(kDefaultBootstrapSeed, 0, StreamPurpose::bootstrap));
  StatsSummary s;
  s.estimate = h2 * (1.0 - m.estimate);
  s.std_error = h2 * m.std_error;
  s.ci_low = h2 * (1.0 - m.ci_high);
  s.ci_high = h2 * (1.0 - m.ci_low);
  s.level = m.level;
  s.n_samples = m.n_samples;
  s.method = "displacement-laplace/bootstrap";
  return s;
}

/// One replica for the score-sum comparison: the walk from the origin run
/// until k_max parts are complete (or it leaves the region), then coarse-grained.
template <int D>
DiscrepancyResult discrepancy_replica(const TrapSets<D>& sets, std::size_t k_max, CounterStream& rng,
                                      std::size_t max_steps = 1'000'000'000) {
  if (k_max == 0) throw ParameterError("k_max must be >= 1");
  const auto& sc = sets.scale_set();
  const double rho_sq = sc.rho * sc.rho;
  Site<D> anchor = origin<D>();
  std::size_t completed = 0;
  TrajectoryRecord<D> t;
  t.S.push_back(0.0);
  WalkOptions opt;
  opt.max_steps = max_steps;
  opt.stop = StopRule::exit_region();
  const auto out = walk_stream<D>(sets.environment(), origin<D>(), opt, rng,
                                  [&](std::size_t, const Site<D>& y, double e, double tau, double s) {
                                    t.Y.push_back(y);
                                    t.e.push_back(e);
                                    t.tau.push_back(tau);
                                    t.S.push_back(s);
                                    if (static_cast<double>(dist_sq<D>(y, anchor)) > rho_sq) {
                                      anchor = y;
                                      if (++completed == k_max) return false;
                                    }
                                    return true;
                                  });
  t.Y.push_back(out.last);
  const auto report = coarse_grain<D>(t, sets);
  return score_sum_discrepancy<D>(report, t, sc.n, sc.alpha, k_max);
}

}  // namespace trapfk

#endif  // TRAPFK_COARSE_GRAIN_HPP
