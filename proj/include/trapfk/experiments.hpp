#ifndef TRAPFK_EXPERIMENTS_HPP
#define TRAPFK_EXPERIMENTS_HPP

// The experiment catalogue behind the command-line tool: parameter schemas
// with defaults, validation before any work starts, the experiments
// themselves, and the run report with its files.
//
// Seeding: every sampled quantity comes from seed_stream(master_seed, id,
// purpose) with id fixed by the replica's position, and every reduction runs
// in id order after the parallel phase, so outputs depend on (params,
// master_seed) only. Each report lists which ids each purpose used.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "trapfk/coarse_grain.hpp"
#include "trapfk/errors.hpp"
#include "trapfk/fk_limit.hpp"
#include "trapfk/lattice.hpp"
#include "trapfk/lattice_env.hpp"
#include "trapfk/parallel.hpp"
#include "trapfk/plot.hpp"
#include "trapfk/report.hpp"
#include "trapfk/rng.hpp"
#include "trapfk/srw_analytics.hpp"
#include "trapfk/stats_kit.hpp"
#include "trapfk/walk_sim.hpp"

namespace trapfk {

using nlohmann::json;

/// Bad configuration: unknown experiment or parameter, wrong type, or a
/// violated precondition. The CLI maps it to exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct ParamSpec {
  std::string name;
  json default_value;
  std::string description;
};

/// Typed access to a resolved parameter object.
class Params {
 public:
  explicit Params(json j) : j_(std::move(j)) {}

  const json& raw() const noexcept { return j_; }

  double num(const std::string& k) const { return j_.at(k).get<double>(); }

  std::int64_t integer(const std::string& k) const {
    const double v = j_.at(k).get<double>();
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw UsageError("parameter '" + k + "' must be an integer");
    return static_cast<std::int64_t>(v);
  }

  std::size_t count(const std::string& k) const {
    const auto v = integer(k);
    if (v < 1) throw UsageError("parameter '" + k + "' must be >= 1");
    return static_cast<std::size_t>(v);
  }

  std::string str(const std::string& k) const { return j_.at(k).get<std::string>(); }
  bool flag(const std::string& k) const { return j_.at(k).get<bool>(); }
  std::vector<double> nums(const std::string& k) const { return j_.at(k).get<std::vector<double>>(); }

  std::vector<int> ints(const std::string& k) const {
    std::vector<int> out;
    for (double v : nums(k)) {
      if (v != std::floor(v)) throw UsageError("parameter '" + k + "' must hold integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  /// env_seed: null means "use the master seed".
  std::uint64_t env_seed(std::uint64_t master) const {
    if (!j_.contains("env_seed") || j_.at("env_seed").is_null()) return master;
    const auto v = integer("env_seed");
    if (v < 0) throw UsageError("env_seed must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }

 private:
  json j_;
};

struct RunContext {
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
};

struct ExperimentDef {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::function<void(const Params&)> validate;
  std::function<ExperimentOutput(const Params&, const RunContext&)> run;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

inline void require_alpha(const Params& p, const std::string& k = "alpha") {
  const double a = p.num(k);
  require(a > 0.0 && a < 1.0, "parameter '" + k + "' must lie in (0,1)");
}

inline void require_dim(int d, int lo = 2) {
  require(d >= lo && d <= kMaxDim, "d must lie in [" + std::to_string(lo) + ", " + std::to_string(kMaxDim) + "]");
}

/// Replica id for sub-experiment `block`, replica i: blocks never share ids.
constexpr std::uint64_t rid(std::uint64_t block, std::uint64_t i) noexcept { return (block << 40) | i; }

inline std::string fmt(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline json constants_json(int d, double alpha, ConstantSet set) {
  const auto k = model_constants(d, alpha, set);
  json j{{"d", d}, {"alpha", alpha}, {"constant_set", to_string(set)}, {"C_d", k.C},
         {"K_d", k.K}, {"K_prime_d", k.K_prime}, {"c1", k.c1}, {"c2", k.c2}};
  j["G_d0"] = d >= 3 ? json(k.green) : json(nullptr);
  return j;
}

inline json scales_json(const ScaleSet& s, double m) {
  return {{"n", s.n}, {"r", s.r}, {"g", s.g}, {"rho", s.rho}, {"nu", s.nu}, {"h", s.h},
          {"gamma", s.gamma}, {"kappa", s.kappa}, {"m", m}};
}

inline std::vector<double> first_coords(const std::vector<double>& flat, std::size_t d) {
  std::vector<double> out(flat.size() / d);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = flat[i * d];
  return out;
}

// ---------------------------------------------------------------------------

inline ExperimentOutput run_env_tail(const Params& p, const RunContext& ctx) {
  const int d = static_cast<int>(p.integer("d"));
  const double alpha = p.num("alpha");
  const auto R = static_cast<std::int32_t>(p.integer("box_radius"));
  EnvironmentDescriptor desc;
  desc.d = d;
  desc.alpha = alpha;
  desc.L_mode = p.str("L_mode");
  desc.L_coeff = p.num("L_coeff");
  desc.L_exponent = p.num("L_exponent");
  desc.master_seed = p.env_seed(ctx.master_seed);
  const TailSpec tail = desc.tail();
  ExperimentOutput out;
  out.constants = {{"environment", {{"d", d}, {"alpha", alpha}, {"L_mode", desc.L_mode}, {"master_seed", desc.master_seed}}}};
  out.streams["environment"] = "tau_x keyed on env_seed, counted by the coordinates of x";

  std::vector<double> taus = dispatch_dim(d, [&]<int D>() {
    const Environment<D> env(tail, desc.master_seed);
    std::vector<Site<D>> sites;
    Site<D> z;
    z.fill(-R);
    while (true) {
      sites.push_back(z);
      int i = D - 1;
      while (i >= 0 && z[i] == R) z[i--] = -R;
      if (i < 0) break;
      ++z[i];
    }
    std::vector<double> t(sites.size());
    parallel_for(sites.size(), ctx.threads, [&](std::size_t i) { t[i] = env.tau(sites[i]); }, 4096);
    return t;
  });

  const double n = static_cast<double>(taus.size());
  const double ks = ks_statistic(taus, [&](double u) { return 1.0 - tail.survival(u); });
  auto row = at_most_row("ks tau vs tail law", exact_value(ks, "ks/one-sample"), 1.63 / std::sqrt(n));
  row.summary.n_samples = taus.size();
  row.note = "bound is the 99% Kolmogorov quantile 1.63/sqrt(n)";
  row.stream = "environment";
  out.rows.push_back(row);

  // Hill estimator of alpha from the top k order statistics.
  auto sorted = taus;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t k = std::min<std::size_t>(p.count("hill_k"), sorted.size() - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(sorted[i] / sorted[k]);
  out.rows.push_back(info_row("hill estimate of alpha", exact_value(static_cast<double>(k) / s, "hill"),
                              "top " + std::to_string(k) + " depths"));

  Csv csv({"u", "empirical_survival", "target_survival"});
  std::vector<double> us, emp, tgt;
  const auto asc = detail::sorted_copy(taus);
  for (int j = 0; j <= 40; ++j) {
    const double u = std::pow(10.0, 0.15 * j);
    const auto ge = asc.end() - std::lower_bound(asc.begin(), asc.end(), u);
    const double e = static_cast<double>(ge) / n;
    csv.row(u, e, tail.survival(u));
    us.push_back(u);
    emp.push_back(e);
    tgt.push_back(tail.survival(u));
  }
  out.csv["survival.csv"] = csv.str();
  SvgPlot plot("Trap depth tail", "u", "P[tau >= u]");
  plot.log_x().log_y().add("empirical", us, emp, SeriesStyle::points).add("tail law", us, tgt);
  out.svg["survival.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_walk_basics(const Params& p, const RunContext& ctx) {
  const double alpha = p.num("alpha");
  const std::size_t steps = p.count("steps");
  const std::size_t reps = p.count("replicas");
  const double r_exit = p.num("exit_radius");
  const double N = p.num("N");
  const double T = p.num("T");
  const auto set = constant_set_from_string(p.str("constants"));
  const std::uint64_t env_seed = p.env_seed(ctx.master_seed);
  ExperimentOutput out;
  out.constants = constants_json(3, alpha, set);
  out.streams["walk"] = "ids 0..replicas-1: |Y(k)|^2; 2^40 + i: exit times; 2^41: the rescaled trajectory";

  const Environment<3> env(TailSpec::pareto(alpha), env_seed);
  std::vector<double> sq(reps);
  parallel_for(reps, ctx.threads, [&](std::size_t i) {
    auto rng = seed_stream(ctx.master_seed, rid(0, i), StreamPurpose::walk);
    WalkOptions opt;
    opt.max_steps = steps;
    const auto o = walk_stream<3>(env, origin<3>(), opt, rng, [](auto&&...) { return true; });
    sq[i] = static_cast<double>(norm_sq<3>(o.last));
  });
  auto msd = se_row("mean |Y(k)|^2 at k = " + std::to_string(steps), summarize_mean(sq), static_cast<double>(steps), 4);
  msd.stream = "walk";
  out.rows.push_back(msd);

  std::vector<double> exits(reps);
  parallel_for(reps, ctx.threads, [&](std::size_t i) {
    auto rng = seed_stream(ctx.master_seed, rid(1, i), StreamPurpose::walk);
    Site<3> y{};
    std::size_t k = 0;
    while (within_radius(norm_sq<3>(y), r_exit)) {
      y = step<3>(y, direction_from<3>(rng()));
      ++k;
    }
    exits[i] = static_cast<double>(k);
  });
  const BallGreenSolver<3> ball(r_exit);
  const auto mean_exit = ball.value(ball.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ball.size()))), origin<3>());
  auto ex = se_row("mean exit time of D(" + fmt(r_exit) + ")", summarize_mean(exits), mean_exit, 4);
  ex.note = "target sum_x G_D(0,x) from the killed Green's function";
  ex.stream = "walk";
  out.rows.push_back(ex);

  // One trajectory long enough for the rescaled triple on [0, T].
  const auto k = model_constants(3, alpha, set);
  const double f = k.f(N);
  const auto need = static_cast<std::size_t>(std::floor(T * f * f)) + 1;
  auto rng = seed_stream(ctx.master_seed, rid(2, 0), StreamPurpose::walk);
  TrajectoryRecord<3> traj;
  traj.S.push_back(0.0);
  WalkOptions opt;
  opt.max_steps = std::size_t{1} << 40;
  const auto o = walk_stream<3>(env, origin<3>(), opt, rng, [&](std::size_t kk, const Site<3>& y, double e, double t, double s) {
    traj.Y.push_back(y);
    traj.e.push_back(e);
    traj.tau.push_back(t);
    traj.S.push_back(s);
    return !(kk + 1 >= need && s > T * N);
  });
  traj.Y.push_back(o.last);
  const auto triple = rescale<3>(traj, N, k, T, p.count("grid_points"));
  const bool ok = grid_identity_holds<3>(triple, traj);
  ReportRow id = at_most_row("grid points violating X_N(t) = Y_N(S_N^-1(t)-)",
                             exact_value(ok ? 0.0 : 1.0, "exact"), 0.0);
  id.stream = "walk";
  out.rows.push_back(id);

  out.csv["trajectory.csv"] = trajectory_csv<3>(traj, std::max<std::size_t>(1, traj.Y.size() / 5000));
  Csv rc({"t", "S_N", "Y_N1", "Y_N2", "Y_N3", "X_N1", "X_N2", "X_N3"});
  for (std::size_t i = 0; i < triple.t.size(); ++i) {
    const auto y = triple.Y_at(i);
    const auto x = triple.X_at(i);
    rc.row(triple.t[i], triple.S_N[i], y[0], y[1], y[2], x[0], x[1], x[2]);
  }
  out.csv["rescaled.csv"] = rc.str();
  std::vector<double> xs1, ys1;
  for (std::size_t i = 0; i < triple.t.size(); ++i) {
    xs1.push_back(triple.X_at(i)[0]);
    ys1.push_back(triple.Y_at(i)[0]);
  }
  SvgPlot plot("Rescaled walk and clock", "t", "value");
  plot.add("S_N(t)", triple.t, triple.S_N, SeriesStyle::step)
      .add("Y_N(t) first coordinate", triple.t, ys1, SeriesStyle::step)
      .add("X_N(t) first coordinate", triple.t, xs1, SeriesStyle::step);
  out.svg["rescaled.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_clock_marginal(const Params& p, const RunContext& ctx) {
  const double alpha = p.num("alpha");
  const double N = p.num("N");
  const double T = p.num("T");
  const std::size_t reps = p.count("replicas");
  const std::size_t refs = p.count("reference_draws");
  const auto set = constant_set_from_string(p.str("constants"));
  const std::uint64_t env_seed = p.env_seed(ctx.master_seed);
  ExperimentOutput out;
  out.constants = constants_json(3, alpha, set);
  out.constants["env_seed"] = env_seed;
  out.streams["walk"] = "id i: replica i of S_N(T)";
  out.streams["reference"] = "id i: reference draw i of V(T)";

  const auto k = model_constants(3, alpha, set);
  const double f = k.f(N);
  const auto K = static_cast<std::size_t>(std::floor(T * f * f));
  if (K < 1) throw UsageError("T f(N)^2 < 1: no steps to take");
  const Environment<3> env(TailSpec::pareto(alpha), env_seed);
  std::vector<double> s(reps);
  parallel_for(reps, ctx.threads, [&](std::size_t i) {
    auto rng = seed_stream(ctx.master_seed, i, StreamPurpose::walk);
    WalkOptions opt;
    opt.max_steps = K;
    s[i] = walk_stream<3>(env, origin<3>(), opt, rng, [](auto&&...) { return true; }).clock / N;
  });
  std::vector<double> v(refs);
  parallel_for(refs, ctx.threads, [&](std::size_t i) {
    auto rng = seed_stream(ctx.master_seed, i, StreamPurpose::reference);
    v[i] = std::pow(T, 1.0 / alpha) * sample_stable_unit(alpha, rng);
  });
  auto row = at_most_row("ks S_N(T) vs V(T)", exact_value(ks_statistic(s, v), "ks/two-sample"), p.num("ks_tolerance"));
  row.summary.n_samples = reps;
  row.note = "steps per replica floor(T f(N)^2) = " + std::to_string(K) + ", reference ensemble of " +
             std::to_string(refs) + " draws";
  row.stream = "walk, reference";
  out.rows.push_back(row);
  std::vector<double> ls, lv;
  for (double x : s) ls.push_back(std::log10(x));
  for (double x : v) lv.push_back(std::log10(x));
  out.rows.push_back(info_row("median log10 S_N(T)", exact_value(median(ls), "median")));
  out.rows.push_back(info_row("median log10 V(T)", exact_value(median(lv), "median")));

  Csv csv({"replica", "S_N"});
  for (std::size_t i = 0; i < s.size(); ++i) csv.row(i, s[i]);
  out.csv["clock_samples.csv"] = csv.str();
  SvgPlot plot("Clock marginal", "log10 value", "ECDF");
  plot.add_ecdf("S_N(T)", ls).add_ecdf("V(T) reference", lv);
  out.svg["clock_ecdf.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_subordinator_laplace(const Params& p, const RunContext& ctx) {
  const auto alphas = p.nums("alphas");
  const auto lambdas = p.nums("lambdas");
  const std::size_t draws = p.count("draws");
  const double k = p.num("se_multiple");
  ExperimentOutput out;
  out.streams["fk"] = "id 2^40 a + i: draw i for the a-th alpha";
  Csv csv({"alpha", "lambda", "mean", "std_error", "target"});
  SvgPlot plot("Laplace transform of V(1)", "lambda", "E exp(-lambda V(1))");
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const double alpha = alphas[a];
    std::vector<double> v(draws);
    parallel_for(draws, ctx.threads, [&](std::size_t i) {
      auto rng = seed_stream(ctx.master_seed, rid(a, i), StreamPurpose::fk);
      v[i] = sample_stable_unit(alpha, rng);
    });
    std::vector<double> lx, my, ty;
    for (double lambda : lambdas) {
      std::vector<double> e(draws);
      for (std::size_t i = 0; i < draws; ++i) e[i] = std::exp(-lambda * v[i]);
      const auto s = summarize_mean(e);
      const double target = std::exp(-std::pow(lambda, alpha));
      auto row = se_row("laplace alpha=" + fmt(alpha) + " lambda=" + fmt(lambda), s, target, k);
      row.stream = "fk";
      out.rows.push_back(row);
      csv.row(alpha, lambda, s.estimate, s.std_error, target);
      lx.push_back(lambda);
      my.push_back(s.estimate);
      ty.push_back(target);
    }
    plot.add("MC alpha=" + fmt(alpha), lx, my, SeriesStyle::points).add("exp(-lambda^alpha) alpha=" + fmt(alpha), lx, ty);
  }
  out.csv["laplace.csv"] = csv.str();
  out.svg["laplace.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_fk_charfn(const Params& p, const RunContext& ctx) {
  const int d = static_cast<int>(p.integer("d"));
  const double alpha = p.num("alpha");
  const double t = p.num("t");
  const auto xi2 = p.nums("xi2");
  const std::size_t paths = p.count("paths");
  const double dt = p.num("dt");
  const double k = p.num("se_multiple");
  ExperimentOutput out;
  out.constants = {{"d", d}, {"alpha", alpha}, {"dt", dt}};
  out.streams["fk"] = "id i: path i";
  out.streams["reference"] = "id i: exact-marginal draw i";

  std::vector<double> z(paths * static_cast<std::size_t>(d));
  std::vector<double> inv(paths);
  std::vector<double> zm(paths * static_cast<std::size_t>(d));
  const double grid[1] = {t};
  parallel_for(paths, ctx.threads, [&](std::size_t i) {
    auto rng = seed_stream(ctx.master_seed, i, StreamPurpose::fk);
    const auto path = sample_fk_path(d, alpha, grid, rng, dt);
    inv[i] = path.inverse[0];
    for (int c = 0; c < d; ++c) z[i * d + c] = path.Z[c];
    auto r2 = seed_stream(ctx.master_seed, i, StreamPurpose::reference);
    const auto m = sample_fk_marginal(d, alpha, t, r2);
    for (int c = 0; c < d; ++c) zm[i * d + c] = m[c];
  });

  // The Mittag-Leffler oracle itself: series and integral forms must agree.
  const double ml2 = mittag_leffler(alpha, -1.0 * std::pow(t, alpha));
  const double ml2_int = mittag_leffler_integral(alpha, 1.0 * std::pow(t, alpha));
  out.rows.push_back(abs_row("E_alpha(-|xi|^2 t^alpha/2) at |xi|^2=2, series vs integral", exact_value(ml2, "mittag-leffler"),
                             ml2_int, 1e-10));

  Csv csv({"xi2", "estimate", "std_error", "target", "exact_marginal_estimate"});
  std::vector<double> gx, gy, mx, my;
  for (double q : xi2) {
    std::vector<double> xi(static_cast<std::size_t>(d), 0.0);
    xi[0] = std::sqrt(q);
    std::vector<double> c(paths), cm(paths);
    double imag = 0.0;
    for (std::size_t i = 0; i < paths; ++i) {
      c[i] = std::cos(xi[0] * z[i * d]);
      cm[i] = std::cos(xi[0] * zm[i * d]);
      imag += std::sin(xi[0] * z[i * d]);
    }
    auto s = summarize_mean(c);
    s.method = "charfn/mean";
    const double target = fk_charfn_target(alpha, t, xi);
    auto row = se_row("charfn |xi|^2=" + fmt(q), s, target, k);
    row.stream = "fk";
    row.note = "imaginary part " + fmt(imag / static_cast<double>(paths));
    out.rows.push_back(row);
    const auto sm = summarize_mean(cm);
    out.rows.push_back(info_row("charfn |xi|^2=" + fmt(q) + " exact-marginal sampler", sm));
    csv.row(q, s.estimate, s.std_error, target, sm.estimate);
    mx.push_back(q);
    my.push_back(s.estimate);
  }
  for (int j = 0; j <= 60; ++j) {
    const double q = 0.1 * j;
    gx.push_back(q);
    gy.push_back(mittag_leffler(alpha, -q * std::pow(t, alpha) / 2.0));
  }
  out.csv["charfn.csv"] = csv.str();
  Csv samples({"path", "inverse_time", "z1"});
  for (std::size_t i = 0; i < paths; ++i) samples.row(i, inv[i], z[i * d]);
  out.csv["fk_samples.csv"] = samples.str();
  SvgPlot plot("FK characteristic function", "|xi|^2", "E cos(xi . Z(t))");
  plot.add("Mittag-Leffler target", gx, gy).add("path sampler", mx, my, SeriesStyle::points);
  out.svg["charfn.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_fk_selfsim(const Params& p, const RunContext& ctx) {
  const int d = static_cast<int>(p.integer("d"));
  const double alpha = p.num("alpha");
  const double lambda = p.num("lambda");
  const std::size_t paths = p.count("paths");
  const double dt = p.num("dt");
  ExperimentOutput out;
  out.constants = {{"d", d}, {"alpha", alpha}, {"dt", dt}};
  out.streams["fk"] = "id i: path of Z(1) sample i; id paths + i: path of Z(lambda) sample i";

  const std::vector<double> grid_a{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
  std::vector<double> a(paths), b(paths);
  std::vector<double> abs_at(paths * grid_a.size());
  parallel_for(paths, ctx.threads, [&](std::size_t i) {
    auto r1 = seed_stream(ctx.master_seed, i, StreamPurpose::fk);
    const auto pa = sample_fk_path(d, alpha, grid_a, r1, dt);
    a[i] = pa.at(grid_a.size() - 1)[0];
    for (std::size_t g = 0; g < grid_a.size(); ++g) abs_at[i * grid_a.size() + g] = std::abs(pa.at(g)[0]);
    auto r2 = seed_stream(ctx.master_seed, paths + i, StreamPurpose::fk);
    const double gl[1] = {lambda};
    b[i] = std::pow(lambda, -alpha / 2.0) * sample_fk_path(d, alpha, gl, r2, dt).Z[0];
  });
  auto row = at_most_row("ks Z(1) vs lambda^(-alpha/2) Z(lambda)", exact_value(ks_statistic(a, b), "ks/two-sample"),
                         p.num("ks_tolerance"));
  row.summary.n_samples = paths;
  row.stream = "fk";
  out.rows.push_back(row);
  Csv holder({"delta", "mean_abs_Z1", "ratio_to_delta_pow"});
  std::vector<double> hx, hy;
  for (std::size_t g = 0; g < grid_a.size(); ++g) {
    std::vector<double> v(paths);
    for (std::size_t i = 0; i < paths; ++i) v[i] = abs_at[i * grid_a.size() + g] / std::pow(grid_a[g], alpha / 2.0);
    const auto s = summarize_mean(v);
    out.rows.push_back(info_row("E|Z_1(delta)|/delta^(alpha/2) at delta=" + fmt(grid_a[g]), s,
                                "constant in delta under self-similarity"));
    holder.row(grid_a[g], s.estimate * std::pow(grid_a[g], alpha / 2.0), s.estimate);
    hx.push_back(grid_a[g]);
    hy.push_back(s.estimate);
  }
  Csv csv({"sample", "Z1_at_1", "scaled_Z1_at_lambda"});
  for (std::size_t i = 0; i < paths; ++i) csv.row(i, a[i], b[i]);
  out.csv["selfsim_samples.csv"] = csv.str();
  out.csv["scaling.csv"] = holder.str();
  SvgPlot plot("FK self-similarity", "first coordinate", "ECDF");
  plot.add_ecdf("Z(1)", a).add_ecdf("lambda^(-alpha/2) Z(lambda)", b);
  out.svg["selfsim_ecdf.svg"] = plot.render();
  SvgPlot sp("Scaling of E|Z(delta)|", "delta", "E|Z_1(delta)| / delta^(alpha/2)");
  sp.log_x().add("estimate", hx, hy, SeriesStyle::points);
  out.svg["scaling.svg"] = sp.render();
  return out;
}

inline ExperimentOutput run_aging(const Params& p, const RunContext& ctx) {
  const double alpha = p.num("alpha");
  const double t_w = p.num("t_w");
  const auto thetas = p.nums("thetas");
  const std::size_t reps = p.count("replicas");
  const double tol = p.num("tolerance");
  const std::size_t grid = p.count("grid_size");
  const AgingMode mode = p.str("mode") == "annealed" ? AgingMode::annealed : AgingMode::quenched;
  const std::uint64_t env_seed = p.env_seed(ctx.master_seed);
  ExperimentOutput out;
  out.constants = {{"d", 3}, {"alpha", alpha}, {"env_seed", env_seed}, {"mode", to_string(mode)}};
  out.streams["walk"] = "id 2^40 j + i: replica i at the j-th theta";

  // Quadrature against the regularised incomplete beta I_{1/(1+theta)}(alpha, 1 - alpha).
  Csv gcsv({"alpha", "theta", "quadrature", "incomplete_beta", "abs_error"});
  double worst = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double a = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
    for (std::size_t j = 0; j < grid; ++j) {
      const double th = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(j) / static_cast<double>(grid - 1));
      const double q = aging_function(a, th);
      const double o = boost::math::ibeta(a, 1.0 - a, 1.0 / (1.0 + th));
      worst = std::max(worst, std::abs(q - o));
      gcsv.row(a, th, q, o, std::abs(q - o));
    }
  }
  out.csv["aging_function_grid.csv"] = gcsv.str();
  out.rows.push_back(at_most_row("max |aging_function - incomplete beta| on " + std::to_string(grid) + "x" +
                                     std::to_string(grid) + " grid",
                                 exact_value(worst, "quadrature"), p.num("oracle_tolerance")));

  const Environment<3> env(TailSpec::pareto(alpha), env_seed);
  Csv wcsv({"theta", "same_site", "same_site_se", "no_jump", "no_jump_se", "target"});
  std::vector<double> tx, ty, ex, ey;
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    const double th = thetas[j];
    // Seeds for the replicas of this theta: ids rid(j, i) under the walk purpose.
    std::vector<std::uint8_t> same(reps, 0), still(reps, 0);
    parallel_for(reps, ctx.threads, [&](std::size_t i) {
      auto rng = seed_stream(ctx.master_seed, rid(j, i), StreamPurpose::walk);
      std::pair<bool, bool> r;
      if (mode == AgingMode::quenched) {
        r = aging_two_time<3>(env, t_w, th, rng, std::size_t{1} << 40);
      } else {
        const Environment<3> fresh(env.tail(), mix64(env_seed + 0x9E3779B97F4A7C15ull * (i + 1)));
        r = aging_two_time<3>(fresh, t_w, th, rng, std::size_t{1} << 40);
      }
      same[i] = r.first;
      still[i] = r.second;
    });
    std::size_t ns = 0, nj = 0;
    for (std::size_t i = 0; i < reps; ++i) {
      ns += same[i];
      nj += still[i];
    }
    const double target = aging_function(alpha, th);
    auto s = summarize_proportion(ns, reps);
    s.method = "aging/" + to_string(mode) + "/same-site";
    auto row = abs_row("P[X(t_w(1+theta)) = X(t_w)] theta=" + fmt(th), s, target, tol);
    row.stream = "walk";
    out.rows.push_back(row);
    auto s2 = summarize_proportion(nj, reps);
    s2.method = "aging/" + to_string(mode) + "/no-jump";
    out.rows.push_back(info_row("P[no jump in [t_w, t_w(1+theta)]] theta=" + fmt(th), s2));
    wcsv.row(th, s.estimate, s.std_error, s2.estimate, s2.std_error, target);
    ex.push_back(th);
    ey.push_back(s.estimate);
  }
  for (int j = 0; j <= 50; ++j) {
    const double th = 0.1 * j;
    tx.push_back(th);
    ty.push_back(aging_function(alpha, th));
  }
  out.csv["aging_walk.csv"] = wcsv.str();
  SvgPlot plot("Two-time aging", "theta", "probability");
  plot.add("arcsine law", tx, ty).add("trap model", ex, ey, SeriesStyle::points);
  out.svg["aging.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_green_free(const Params& p, const RunContext&) {
  const auto dims = p.ints("dims");
  const double precision = p.num("precision");
  ExperimentOutput out;
  // Watson's closed form for the simple cubic lattice, an independent oracle.
  const double watson = std::sqrt(6.0) / (32.0 * std::pow(std::numbers::pi, 3)) * boost::math::tgamma(1.0 / 24) *
                        boost::math::tgamma(5.0 / 24) * boost::math::tgamma(7.0 / 24) * boost::math::tgamma(11.0 / 24);
  out.constants = {{"watson_G3", watson}};
  Csv csv({"d", "cutoff", "lower", "upper", "width"});
  for (int d : dims) {
    const auto g = green_free(d, precision);
    csv.row(d, g.cutoff, g.lower, g.upper, g.width());
    StatsSummary s = exact_value(g.value, "bessel-integral/bracket");
    s.ci_low = g.lower;
    s.ci_high = g.upper;
    out.rows.push_back(at_most_row("G_" + std::to_string(d) + "(0) bracket width", exact_value(g.width(), "bracket"),
                                   2.0 * precision));
    if (d == 3) {
      auto row = range_row("Watson constant inside G_3(0) bracket", exact_value(watson, "closed-form"), g.lower, g.upper);
      out.rows.push_back(row);
    } else {
      out.rows.push_back(info_row("G_" + std::to_string(d) + "(0)", s));
    }
  }
  out.csv["green_free.csv"] = csv.str();
  return out;
}

inline ExperimentOutput run_green_ball(const Params& p, const RunContext&) {
  const auto radii = p.nums("radii");
  ExperimentOutput out;
  const double G = green_constant(3);
  out.constants = {{"G_30", G}};
  Csv csv({"r", "G_ball_00", "G_free_minus_G_ball", "residual"});
  std::vector<double> lr, ld, rs, ds;
  double worst_res = 0.0;
  for (double r : radii) {
    const BallGreenSolver<3> solver(r);
    const auto col = solver.column(origin<3>());
    const double g = solver.value(col, origin<3>());
    const double res = solver.harmonicity_residual(col, origin<3>());
    worst_res = std::max(worst_res, res);
    csv.row(r, g, G - g, res);
    lr.push_back(std::log(r));
    ld.push_back(std::log(std::abs(G - g)));
    rs.push_back(r);
    ds.push_back(std::abs(G - g));
    out.rows.push_back(info_row("G_D(" + fmt(r) + ")(0,0)", exact_value(g, "exact-linear-solve")));
  }
  out.rows.push_back(range_row("log-log slope of G_3(0) - G_D(r)(0,0)", exact_value(ols_slope(lr, ld), "ols"),
                               p.num("slope_low"), p.num("slope_high")));
  out.rows.push_back(at_most_row("max harmonicity residual", exact_value(worst_res, "exact-linear-solve"), 1e-10));
  out.csv["green_ball.csv"] = csv.str();
  SvgPlot plot("Killed Green's function at the origin", "r", "G_3(0) - G_D(r)(0,0)");
  plot.log_x().log_y().add("exact solve", rs, ds, SeriesStyle::points);
  std::vector<double> ref;
  for (double r : rs) ref.push_back(ds.front() * rs.front() / r);
  plot.add("slope -1", rs, ref);
  out.svg["green_ball.svg"] = plot.render();
  return out;
}

inline std::vector<Site<3>> hitting_points(double lo, double hi) {
  std::vector<Site<3>> pts;
  for (int k = 1; k <= static_cast<int>(hi); ++k) {
    if (k >= lo && k <= hi) pts.push_back({k, 0, 0});
  }
  for (int k = 1; k * std::sqrt(3.0) <= hi; ++k) {
    if (k * std::sqrt(3.0) >= lo) pts.push_back({k, k, k});
  }
  return pts;
}

inline ExperimentOutput run_hitting_bounds(const Params& p, const RunContext&) {
  const double r = p.num("r");
  const auto pts = hitting_points(p.num("min_abs_x"), p.num("max_abs_x"));
  HittingEnvelope env{p.num("c_low"), p.num("c_up"), p.num("c_ref"), p.num("c_edge")};
  ExperimentOutput out;
  std::string provenance = "recorded";
  if (p.flag("refit")) {
    std::vector<EnvelopeFitPoint> fit;
    for (double fr : p.nums("fit_radii")) {
      const BallGreenSolver<3> solver(fr);
      for (const auto& x : pts) fit.push_back({fr, norm<3>(x), hitting_prob_exact<3>(solver, x).probability});
    }
    env = fit_hitting_envelope(3, fit, p.num("fit_margin"));
    provenance = "refitted";
  }
  out.constants = {{"a_3", newton_constant(3)}, {"G_30", green_constant(3)},
                   {"envelope", {{"c_low", env.c_low}, {"c_up", env.c_up}, {"c_ref", env.c_ref}, {"c_edge", env.c_edge},
                                 {"provenance", provenance}}}};
  const BallGreenSolver<3> solver(r);
  Csv csv({"x", "abs_x", "p", "lower", "upper", "refined_upper", "G_0x", "G_xx", "p_harmonic", "identity_residual"});
  std::size_t violations = 0;
  double worst_id = 0.0;
  std::vector<double> ax, ap, al, au, ar;
  for (const auto& x : pts) {
    const auto h = hitting_prob_exact<3>(solver, x);
    const double ph = hitting_prob_harmonic<3>(r, x);
    const double nx = norm<3>(x);
    const auto b = hitting_bounds(3, r, nx, env);
    const double id = std::abs(ph * h.green_diag - h.green_origin);
    worst_id = std::max(worst_id, id);
    if (!(b.lower <= h.probability && h.probability <= b.upper && h.probability <= b.refined_upper)) ++violations;
    csv.row(to_string<3>(x), nx, h.probability, b.lower, b.upper, b.refined_upper, h.green_origin, h.green_diag, ph, id);
    ax.push_back(nx);
    ap.push_back(h.probability);
    al.push_back(b.lower);
    au.push_back(b.upper);
    ar.push_back(b.refined_upper);
  }
  auto v = at_most_row("points outside the hitting sandwich", exact_value(static_cast<double>(violations), "count"), 0.0);
  v.summary.n_samples = pts.size();
  v.note = "envelope constants " + provenance;
  out.rows.push_back(v);
  out.rows.push_back(at_most_row("max |p G(x,x) - G(0,x)| (independent solves)", exact_value(worst_id, "exact-linear-solve"),
                                 p.num("identity_tolerance")));
  out.csv["hitting.csv"] = csv.str();
  SvgPlot plot("Hitting probability sandwich, r = " + fmt(r), "|x|", "p_r(0,x)");
  plot.log_x().log_y().add("exact", ax, ap, SeriesStyle::points).add("lower", ax, al, SeriesStyle::points)
      .add("upper", ax, au, SeriesStyle::points).add("refined upper", ax, ar, SeriesStyle::points);
  out.svg["hitting.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_fd_limit(const Params& p, const RunContext&) {
  const auto dims = p.ints("dims");
  const auto alphas = p.nums("alphas");
  const auto lambdas = p.nums("lambdas");
  const auto t_pows = p.nums("t_log2_times_alpha");
  const double eps = p.num("epsilon");
  const double M = p.num("M");
  const double tol = p.num("relative_tolerance");
  const auto set = constant_set_from_string(p.str("constants"));
  ExperimentOutput out;
  out.constants["sets"] = json::array();
  Csv csv({"d", "alpha", "lambda", "t", "lhs", "rhs", "relative_deviation", "limit_lhs"});
  for (int d : dims) {
    for (double alpha : alphas) {
      out.constants["sets"].push_back(constants_json(d, alpha, set));
      std::vector<double> ts;
      for (double k : t_pows) ts.push_back(std::exp2(k / alpha));
      const auto rep = fd_limit_identity_check(d, alpha, lambdas, ts, eps, M, set);
      const double c2sq = rep.constants.c2 * rep.constants.c2;
      double worst_limit = 0.0;
      for (const auto& pt : rep.points) {
        const double lim = std::pow(pt.t, alpha) / c2sq * f_d_limit(rep.constants, pt.lambda / pt.t);
        worst_limit = std::max(worst_limit, std::abs(lim - pt.rhs) / pt.rhs);
        csv.row(d, alpha, pt.lambda, pt.t, pt.lhs, pt.rhs, pt.deviation() / pt.rhs, lim);
      }
      const std::string tag = "d=" + std::to_string(d) + " alpha=" + fmt(alpha);
      auto row = at_most_row("max relative |(t^a/c2^2) F_d(l/t) - l^a| " + tag,
                             exact_value(rep.max_relative_deviation, "quadrature"), tol);
      row.note = "eps=" + fmt(eps) + " M=" + fmt(M) + "; absolute max " + fmt(rep.max_deviation);
      out.rows.push_back(row);
      out.rows.push_back(info_row("same with eps -> 0, M -> inf " + tag, exact_value(worst_limit, "closed-form"),
                                  "isolates the constants from the truncation"));
    }
  }
  out.csv["fd_limit.csv"] = csv.str();
  // Curve for the first (d, alpha) pair as a picture of the truncation effect.
  if (!dims.empty() && !alphas.empty()) {
    const auto fp = make_fd_params(dims[0], alphas[0], eps, M, set);
    const double c2sq = fp.constants.c2 * fp.constants.c2;
    std::vector<double> lx, ly, lt;
    for (int j = 0; j <= 40; ++j) {
      const double l = std::pow(10.0, -2.0 + 0.1 * j);
      lx.push_back(l);
      ly.push_back(f_d_lambda(fp, l) / c2sq);
      lt.push_back(std::pow(l, alphas[0]));
    }
    SvgPlot plot("F_d(lambda)/c2^2, d=" + std::to_string(dims[0]) + " alpha=" + fmt(alphas[0]), "lambda", "value");
    plot.log_x().log_y().add("truncated F_d", lx, ly).add("lambda^alpha", lx, lt);
    out.svg["fd_curve.svg"] = plot.render();
  }
  return out;
}

/// Sample `count` points of E_0(n) by rejection from the cube around the
/// origin, using one sequential stream.
template <int D>
std::vector<Site<D>> sample_safe_points(const TrapSets<D>& sets, std::size_t count, std::uint64_t seed) {
  auto rng = seed_stream(seed, rid(1023, 0), StreamPurpose::sampling);
  const double R = *sets.environment().region_radius() - sets.scale_set().rho - 1.0;
  if (!(R > 0.0)) throw UsageError("region too small: m r(n) must exceed rho(n) + 1");
  std::vector<Site<D>> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count + 100000) throw PreconditionError("could not find enough points of E_0(n)");
    Site<D> x;
    for (auto& c : x) c = static_cast<std::int32_t>(std::floor((2.0 * rng.uniform() - 1.0) * R));
    if (norm<D>(x) > R || !sets.is_safe_interior(x)) continue;
    out.push_back(x);
  }
  return out;
}

struct LemmaSample {
  std::vector<Site<3>> xs;
  std::vector<double> ratio;     ///< h^2 P[s != 0] / (K p)
  std::vector<double> p_inf;
  std::vector<Site<3>> displacements;
};

inline LemmaSample lemma_sample(int n, double alpha, double eps, double M, double m, std::size_t nx, std::size_t parts,
                                ConstantSet set, std::uint64_t env_seed, std::uint64_t seed, unsigned threads) {
  const auto sc = scales(n, 3, alpha);
  const Environment<3> env(TailSpec::pareto(alpha), env_seed, m * sc.r);
  const TrapSets<3> sets(env, sc, eps, M);
  const double Kp = model_constants(3, alpha, set).K * sets.window_mass();
  LemmaSample ls;
  ls.xs = sample_safe_points<3>(sets, nx, seed);
  for (std::size_t j = 0; j < ls.xs.size(); ++j) {
    const auto s = sample_score_at<3>(sets, ls.xs[j], parts, mix64(seed + 0x100 + j), threads);
    ls.ratio.push_back(sc.h * sc.h * s.p_nonzero() / Kp);
    ls.p_inf.push_back(s.p_infinite());
    ls.displacements.insert(ls.displacements.end(), s.displacements.begin(), s.displacements.end());
  }
  return ls;
}

inline ExperimentOutput run_coarse_lemma21(const Params& p, const RunContext& ctx) {
  const int n = static_cast<int>(p.integer("n"));
  const double alpha = p.num("alpha");
  const double eps = p.num("epsilon");
  const double M = p.num("M");
  const double m = p.num("m");
  const auto set = constant_set_from_string(p.str("constants"));
  const std::uint64_t env_seed = p.env_seed(ctx.master_seed);
  ExperimentOutput out;
  out.constants = constants_json(3, alpha, set);
  out.constants["scales"] = scales_json(scales(n, 3, alpha), m);
  out.constants["env_seed"] = env_seed;
  out.streams["sampling"] = "start points: one sequential stream, id 2^40*1023; parts at the j-th point: master seed "
                            "mix64(seed + 256 + j), ids 0..parts-1";

  Csv trend({"n", "points", "parts", "median_ratio", "mean_p_inf_h2"});
  std::vector<double> tn, tr, tp;
  auto one = [&](int level, std::size_t nx, std::size_t parts, std::uint64_t seed) {
    const auto ls = lemma_sample(level, alpha, eps, M, m, nx, parts, set, env_seed, seed, ctx.threads);
    const auto sc = scales(level, 3, alpha);
    const double med = median(ls.ratio);
    const double pinf = sample_mean(ls.p_inf) * sc.h * sc.h;
    trend.row(level, nx, parts, med, pinf);
    tn.push_back(level);
    tr.push_back(med);
    tp.push_back(pinf);
    return std::make_pair(ls, med);
  };
  std::vector<int> trend_n = p.ints("trend_n");
  for (std::size_t q = 0; q < trend_n.size(); ++q) {
    const auto [ls, med] = one(trend_n[q], p.count("trend_points"), p.count("parts"), mix64(ctx.master_seed + 1 + q));
    out.rows.push_back(info_row("median h^2 P[s != 0]/(K p) at n=" + std::to_string(trend_n[q]),
                                exact_value(med, "median")));
  }
  const auto [ls, med] = one(n, p.count("points"), p.count("parts"), ctx.master_seed);
  auto row = range_row("median h^2 P[s != 0]/(K p) at n=" + std::to_string(n), exact_value(med, "median"),
                       p.num("ratio_low"), p.num("ratio_high"));
  row.summary.n_samples = ls.ratio.size();
  row.stream = "sampling";
  out.rows.push_back(row);
  const auto sc = scales(n, 3, alpha);
  out.rows.push_back(info_row("mean h^2 P[s = inf] at n=" + std::to_string(n),
                              exact_value(sample_mean(ls.p_inf) * sc.h * sc.h, "mean"), "shrinks with n"));
  Csv per({"x", "ratio", "p_inf"});
  for (std::size_t j = 0; j < ls.xs.size(); ++j) per.row(to_string<3>(ls.xs[j]), ls.ratio[j], ls.p_inf[j]);
  out.csv["per_point.csv"] = per.str();
  out.csv["trend.csv"] = trend.str();
  SvgPlot plot("Nonzero-score probability versus level", "n", "value");
  plot.add("median h^2 P[s != 0]/(K p)", tn, tr, SeriesStyle::points).add("h^2 P[s = inf]", tn, tp, SeriesStyle::points);
  plot.add("target 1", {tn.empty() ? 0.0 : *std::min_element(tn.begin(), tn.end()), tn.empty() ? 1.0 : *std::max_element(tn.begin(), tn.end())}, {1.0, 1.0});
  out.svg["trend.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_displacement(const Params& p, const RunContext& ctx) {
  const int n = static_cast<int>(p.integer("n"));
  const double alpha = p.num("alpha");
  const double m = p.num("m");
  const auto set = constant_set_from_string(p.str("constants"));
  const std::uint64_t env_seed = p.env_seed(ctx.master_seed);
  const auto xi = p.nums("xi");
  if (xi.size() != 3) throw UsageError("xi must have 3 components");
  ExperimentOutput out;
  const auto sc = scales(n, 3, alpha);
  out.constants = constants_json(3, alpha, set);
  out.constants["scales"] = scales_json(sc, m);
  out.constants["env_seed"] = env_seed;
  out.streams["sampling"] = "as coarse-lemma21";
  const auto ls = lemma_sample(n, alpha, p.num("epsilon"), p.num("M"), m, p.count("points"), p.count("parts"), set,
                               env_seed, ctx.master_seed, ctx.threads);
  const auto s = displacement_laplace_check<3>(ls.displacements, xi, sc);
  double q = 0.0;
  for (double v : xi) q += v * v;
  auto row = abs_row("h^2 {1 - mean exp(-xi . r / r(n))}", s, -q / 6.0, p.num("tolerance"));
  row.stream = "sampling";
  out.rows.push_back(row);
  double m2 = 0.0;
  for (const auto& d : ls.displacements) m2 += static_cast<double>(norm_sq<3>(d));
  m2 /= static_cast<double>(ls.displacements.size());
  out.rows.push_back(info_row("mean |r|^2 / rho^2", exact_value(m2 / (sc.rho * sc.rho), "mean")));
  Csv csv({"sample", "r1", "r2", "r3"});
  for (std::size_t i = 0; i < ls.displacements.size(); ++i) {
    const auto& d = ls.displacements[i];
    csv.row(i, d[0], d[1], d[2]);
  }
  out.csv["displacements.csv"] = csv.str();
  std::vector<double> r1;
  for (const auto& d : ls.displacements) r1.push_back(d[0] / sc.rho);
  SvgPlot plot("Part displacement, first coordinate / rho", "r_1 / rho", "ECDF");
  plot.add_ecdf("displacement", r1);
  out.svg["displacement_ecdf.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_coarse_lemma24(const Params& p, const RunContext& ctx) {
  const int n = static_cast<int>(p.integer("n"));
  const double alpha = p.num("alpha");
  const double eps = p.num("epsilon");
  const double M = p.num("M");
  const double m = p.num("m");
  const double T = p.num("T");
  const double delta = p.num("delta");
  const std::size_t reps = p.count("replicas");
  const std::uint64_t env_seed = p.env_seed(ctx.master_seed);
  const auto sc = scales(n, 3, alpha);
  const auto k_max = static_cast<std::size_t>(std::floor(sc.h * sc.h * T));
  if (k_max < 1) throw UsageError("h(n)^2 T < 1: no parts to compare");
  ExperimentOutput out;
  out.constants = constants_json(3, alpha, ConstantSet::escape);
  out.constants["scales"] = scales_json(sc, m);
  out.constants["k_max"] = k_max;
  out.constants["env_seed"] = env_seed;
  out.streams["walk"] = "id i: replica i";
  const Environment<3> env(TailSpec::pareto(alpha), env_seed, m * sc.r);
  const TrapSets<3> sets(env, sc, eps, M);
  std::vector<DiscrepancyResult> res(reps);
  parallel_for(reps, ctx.threads, [&](std::size_t i) {
    auto rng = seed_stream(ctx.master_seed, i, StreamPurpose::walk);
    res[i] = discrepancy_replica<3>(sets, k_max, rng);
  });
  auto row = less_than_row("fraction with discrepancy >= " + fmt(delta), discrepancy_exceedance(res, delta),
                           p.num("fraction_threshold"));
  row.stream = "walk";
  row.note = "replicas with a bad part before k_max contribute their discrepancy up to J";
  out.rows.push_back(row);
  out.rows.push_back(info_row("same, bad part before k_max counted as exceeding",
                              discrepancy_exceedance(res, delta, true)));
  std::size_t trunc = 0, j0 = 0;
  for (const auto& r : res) {
    trunc += r.truncated;
    j0 += r.J && *r.J == 0;
  }
  out.rows.push_back(info_row("fraction with J < k_max", summarize_proportion(trunc, reps)));
  out.rows.push_back(info_row("fraction with J = 0", summarize_proportion(j0, reps)));
  out.rows.push_back(info_row("origin in E_0(n)", exact_value(sets.is_safe_interior(origin<3>()) ? 1.0 : 0.0, "exact")));
  Csv csv({"replica", "max_discrepancy", "k_evaluated", "J"});
  std::vector<double> md;
  for (std::size_t i = 0; i < reps; ++i) {
    csv.row(i, res[i].max_discrepancy, res[i].k_evaluated, res[i].J ? static_cast<std::int64_t>(*res[i].J) : -1);
    md.push_back(res[i].max_discrepancy);
  }
  out.csv["discrepancy.csv"] = csv.str();
  SvgPlot plot("Normalised score-sum discrepancy", "discrepancy", "ECDF");
  plot.add_ecdf("replicas", md).add("delta", {delta, delta}, {0.0, 1.0});
  out.svg["discrepancy_ecdf.svg"] = plot.render();
  return out;
}

inline ExperimentOutput run_ctrw_compare(const Params& p, const RunContext& ctx) {
  const int d = static_cast<int>(p.integer("d"));
  const double alpha = p.num("alpha");
  const double N = p.num("N");
  const std::size_t samples = p.count("samples");
  const bool use_path = p.str("fk_sampler") == "path";
  ExperimentOutput out;
  const double C = ctrw_constant(d, alpha);
  out.constants = {{"d", d}, {"alpha", alpha}, {"ctrw_C", C}};
  out.streams["ctrw"] = "id i: CTRW sample i";
  out.streams["fk"] = "id i: FK sample i";
  std::vector<double> u(samples), z(samples);
  parallel_for(samples, ctx.threads, [&](std::size_t i) {
    auto r1 = seed_stream(ctx.master_seed, i, StreamPurpose::ctrw);
    const auto y = dispatch_dim(d, [&]<int D>() { return static_cast<double>(ctrw_position_at<D>(alpha, N, r1)[0]); });
    u[i] = C * std::pow(N, -alpha / 2.0) * y;
    auto r2 = seed_stream(ctx.master_seed, i, StreamPurpose::fk);
    if (use_path) {
      const double g[1] = {1.0};
      z[i] = sample_fk_path(d, alpha, g, r2).Z[0];
    } else {
      z[i] = sample_fk_marginal(d, alpha, 1.0, r2)[0];
    }
  });
  auto row = at_most_row("ks rescaled CTRW vs Z(1)", exact_value(ks_statistic(u, z), "ks/two-sample"),
                         p.num("ks_tolerance"));
  row.summary.n_samples = samples;
  row.stream = "ctrw, fk";
  out.rows.push_back(row);
  Csv csv({"sample", "ctrw_rescaled", "fk"});
  for (std::size_t i = 0; i < samples; ++i) csv.row(i, u[i], z[i]);
  out.csv["ctrw_samples.csv"] = csv.str();
  SvgPlot plot("CTRW versus FK, first coordinate", "value", "ECDF");
  plot.add_ecdf("C N^(-alpha/2) U(N)", u).add_ecdf("Z(1)", z);
  out.svg["ctrw_ecdf.svg"] = plot.render();
  return out;
}

}  // namespace detail

/// Every experiment with its parameter schema. Defaults reproduce the
/// acceptance configuration of each.
inline const std::vector<ExperimentDef>& experiment_catalog() {
  using namespace detail;
  static const std::vector<ExperimentDef> cat = [] {
    std::vector<ExperimentDef> v;
    v.push_back({"env-tail",
                 "Empirical law of the trap depths in a box against the tail law.",
                 {{"d", 3, "lattice dimension (2..4)"},
                  {"alpha", 0.5, "tail index in (0,1)"},
                  {"L_mode", "zero", "slowly varying correction: zero, power or constant"},
                  {"L_coeff", 0.0, "power mode: L(u) = L_coeff u^-L_exponent"},
                  {"L_exponent", 1.0, "power mode exponent"},
                  {"box_radius", 30, "sites of the cube [-R, R]^d are sampled"},
                  {"hill_k", 1000, "order statistics for the Hill estimate"},
                  {"env_seed", nullptr, "environment seed; null uses the master seed"}},
                 [](const Params& p) {
                   require_dim(static_cast<int>(p.integer("d")));
                   require_alpha(p);
                   const auto m = p.str("L_mode");
                   require(m == "zero" || m == "power", "L_mode must be zero or power for a tail check");
                   require(std::abs(p.num("L_coeff")) < 1.0, "|L_coeff| must be < 1");
                   require(p.integer("box_radius") >= 1 && p.integer("box_radius") <= 200, "box_radius must lie in [1, 200]");
                   (void)p.count("hill_k");
                 },
                 run_env_tail});
    v.push_back({"walk-basics",
                 "SRW sanity: mean square displacement, mean exit time against the killed Green's function, and "
                 "the grid identity of the rescaled triple.",
                 {{"alpha", 0.5, "tail index"},
                  {"steps", 100, "k for E|Y(k)|^2 = k"},
                  {"replicas", 10000, "walks per statistic"},
                  {"exit_radius", 10.0, "radius of the exit-time ball"},
                  {"N", 1e6, "rescaling parameter"},
                  {"T", 1.0, "time horizon of the rescaled triple"},
                  {"grid_points", 101, "grid points on [0, T]"},
                  {"constants", "escape", "constant set: escape or printed"},
                  {"env_seed", nullptr, "environment seed; null uses the master seed"}},
                 [](const Params& p) {
                   require_alpha(p);
                   (void)p.count("steps");
                   (void)p.count("replicas");
                   require(p.num("exit_radius") >= 1.0 && p.num("exit_radius") <= 60.0, "exit_radius must lie in [1, 60]");
                   require(p.num("N") > 1.0, "N must exceed 1");
                   require(p.num("T") > 0.0, "T must be positive");
                   require(p.count("grid_points") >= 2, "grid_points must be >= 2");
                   (void)constant_set_from_string(p.str("constants"));
                 },
                 run_walk_basics});
    v.push_back({"clock-marginal",
                 "One-sample KS of the rescaled clock S_N(T) against a V_alpha(T) reference ensemble in one "
                 "quenched environment, d = 3.",
                 {{"alpha", 0.5, "tail index"},
                  {"N", 1e6, "rescaling parameter"},
                  {"T", 1.0, "time"},
                  {"replicas", 5000, "walks"},
                  {"reference_draws", 100000, "size of the V(T) reference ensemble"},
                  {"ks_tolerance", 0.08, "pass if KS <= this"},
                  {"constants", "escape", "constant set: escape or printed"},
                  {"env_seed", nullptr, "environment seed; null uses the master seed"}},
                 [](const Params& p) {
                   require_alpha(p);
                   require(p.num("N") > 1.0, "N must exceed 1");
                   require(p.num("T") > 0.0, "T must be positive");
                   (void)p.count("replicas");
                   (void)p.count("reference_draws");
                   (void)constant_set_from_string(p.str("constants"));
                 },
                 run_clock_marginal});
    v.push_back({"subordinator-laplace",
                 "Laplace transform of the stable subordinator at time 1 against exp(-lambda^alpha).",
                 {{"alphas", json::array({0.3, 0.5, 0.8}), "tail indices"},
                  {"lambdas", json::array({0.5, 1.0, 2.0}), "Laplace arguments"},
                  {"draws", 100000, "draws per alpha"},
                  {"se_multiple", 4.0, "pass if within this many standard errors"}},
                 [](const Params& p) {
                   for (double a : p.nums("alphas")) require(a > 0.0 && a < 1.0, "every alpha must lie in (0,1)");
                   for (double l : p.nums("lambdas")) require(l >= 0.0, "lambdas must be nonnegative");
                   require(p.count("draws") >= 2, "draws must be >= 2");
                 },
                 run_subordinator_laplace});
    v.push_back({"fk-charfn",
                 "Characteristic function of the FK process at a fixed time against the Mittag-Leffler law.",
                 {{"d", 3, "dimension"},
                  {"alpha", 0.5, "index"},
                  {"t", 1.0, "time"},
                  {"xi2", json::array({1.0, 2.0, 4.0}), "values of |xi|^2"},
                  {"paths", 100000, "FK paths"},
                  {"dt", 1e-3, "subordinator grid step"},
                  {"se_multiple", 4.0, "pass if within this many standard errors"}},
                 [](const Params& p) {
                   require_dim(static_cast<int>(p.integer("d")), 1);
                   require_alpha(p);
                   require(p.num("t") > 0.0, "t must be positive");
                   require(p.num("dt") > 0.0 && p.num("dt") <= 0.1, "dt must lie in (0, 0.1]");
                   for (double q : p.nums("xi2")) require(q >= 0.0, "xi2 entries must be nonnegative");
                   require(p.count("paths") >= 2, "paths must be >= 2");
                 },
                 run_fk_charfn});
    v.push_back({"fk-selfsim",
                 "Self-similarity of the FK process: two-sample KS of Z(1) against lambda^(-alpha/2) Z(lambda).",
                 {{"d", 3, "dimension"},
                  {"alpha", 0.5, "index"},
                  {"lambda", 4.0, "time scale factor"},
                  {"paths", 20000, "paths per sample"},
                  {"dt", 1e-3, "subordinator grid step"},
                  {"ks_tolerance", 0.02, "pass if KS <= this"}},
                 [](const Params& p) {
                   require_dim(static_cast<int>(p.integer("d")), 1);
                   require_alpha(p);
                   require(p.num("lambda") > 0.0, "lambda must be positive");
                   require(p.num("dt") > 0.0 && p.num("dt") <= 0.1, "dt must lie in (0, 0.1]");
                   (void)p.count("paths");
                 },
                 run_fk_selfsim});
    v.push_back({"aging",
                 "Arcsine aging law: quadrature against the incomplete beta function on a grid, and the two-time "
                 "same-site probability of the d = 3 trap model.",
                 {{"alpha", 0.5, "tail index"},
                  {"t_w", 1e5, "waiting time"},
                  {"thetas", json::array({1.0, 3.0}), "theta values"},
                  {"replicas", 10000, "walks per theta"},
                  {"tolerance", 0.03, "absolute tolerance of the walk estimate"},
                  {"grid_size", 20, "side of the (alpha, theta) grid"},
                  {"oracle_tolerance", 1e-8, "tolerance of the quadrature against the oracle"},
                  {"mode", "quenched", "quenched (one environment) or annealed (fresh per replica)"},
                  {"env_seed", nullptr, "environment seed; null uses the master seed"}},
                 [](const Params& p) {
                   require_alpha(p);
                   require(p.num("t_w") > 0.0, "t_w must be positive");
                   for (double t : p.nums("thetas")) require(t >= 0.0, "thetas must be nonnegative");
                   (void)p.count("replicas");
                   require(p.count("grid_size") >= 2, "grid_size must be >= 2");
                   const auto m = p.str("mode");
                   require(m == "quenched" || m == "annealed", "mode must be quenched or annealed");
                 },
                 run_aging});
    v.push_back({"coarse-lemma21",
                 "Probability of a nonzero part score from points of E_0(n), normalised by h^2 and K_d p, with "
                 "the trend over n.",
                 {{"n", 14, "level"},
                  {"alpha", 0.5, "tail index"},
                  {"epsilon", 0.5, "lower edge of the depth window"},
                  {"M", 4.0, "upper edge of the depth window"},
                  {"m", 4.0, "region radius in units of r(n)"},
                  {"points", 200, "start points sampled from E_0(n)"},
                  {"parts", 500, "parts per start point"},
                  {"trend_n", json::array({10, 12}), "extra levels for the trend plot"},
                  {"trend_points", 40, "start points per trend level"},
                  {"ratio_low", 0.75, "lower acceptance bound of the median"},
                  {"ratio_high", 1.25, "upper acceptance bound of the median"},
                  {"constants", "escape", "constant set for K_d"},
                  {"env_seed", nullptr, "environment seed; null uses the master seed"}},
                 [](const Params& p) {
                   require(p.integer("n") >= 2 && p.integer("n") <= 20, "n must lie in [2, 20]");
                   for (int q : p.ints("trend_n")) require(q >= 2 && q <= 20, "trend_n entries must lie in [2, 20]");
                   require_alpha(p);
                   require(p.num("epsilon") > 0.0 && p.num("epsilon") < 1.0 && p.num("M") > 1.0, "need 0 < epsilon < 1 < M");
                   require(p.num("m") > 1.0, "m must exceed 1");
                   (void)p.count("points");
                   (void)p.count("parts");
                   (void)constant_set_from_string(p.str("constants"));
                 },
                 run_coarse_lemma21});
    v.push_back({"coarse-lemma24",
                 "Fraction of walks whose normalised score-sum discrepancy over the first floor(h^2 T) parts "
                 "reaches delta.",
                 {{"n", 14, "level"},
                  {"alpha", 0.5, "tail index"},
                  {"epsilon", 0.02, "lower edge of the depth window (tuned)"},
                  {"M", 1e4, "upper edge of the depth window (tuned)"},
                  {"m", 4.0, "region radius in units of r(n) (tuned)"},
                  {"T", 1.0, "parts compared: floor(h(n)^2 T)"},
                  {"delta", 0.1, "discrepancy threshold"},
                  {"replicas", 1000, "walks"},
                  {"fraction_threshold", 0.1, "pass if the fraction is below this"},
                  {"env_seed", 1, "environment seed; null uses the master seed"}},
                 [](const Params& p) {
                   require(p.integer("n") >= 2 && p.integer("n") <= 20, "n must lie in [2, 20]");
                   require_alpha(p);
                   require(p.num("epsilon") > 0.0 && p.num("epsilon") < 1.0 && p.num("M") > 1.0, "need 0 < epsilon < 1 < M");
                   require(p.num("m") > 1.0, "m must exceed 1");
                   require(p.num("T") > 0.0, "T must be positive");
                   require(p.num("delta") > 0.0, "delta must be positive");
                   (void)p.count("replicas");
                 },
                 run_coarse_lemma24});
    v.push_back({"displacement",
                 "h^2 {1 - E exp(-xi . r/r(n))} for the part displacement r from points of E_0(n), against "
                 "-|xi|^2/6.",
                 {{"n", 14, "level"},
                  {"alpha", 0.5, "tail index"},
                  {"epsilon", 0.5, "lower edge of the depth window"},
                  {"M", 4.0, "upper edge of the depth window"},
                  {"m", 4.0, "region radius in units of r(n)"},
                  {"points", 200, "start points"},
                  {"parts", 500, "parts per point"},
                  {"xi", json::array({1.0, 0.0, 0.0}), "xi"},
                  {"tolerance", 0.05, "absolute tolerance"},
                  {"constants", "escape", "constant set (reported only)"},
                  {"env_seed", nullptr, "environment seed; null uses the master seed"}},
                 [](const Params& p) {
                   require(p.integer("n") >= 2 && p.integer("n") <= 20, "n must lie in [2, 20]");
                   require_alpha(p);
                   require(p.num("epsilon") > 0.0 && p.num("epsilon") < 1.0 && p.num("M") > 1.0, "need 0 < epsilon < 1 < M");
                   require(p.num("m") > 1.0, "m must exceed 1");
                   require(p.nums("xi").size() == 3, "xi must have 3 components");
                   (void)p.count("points");
                   (void)p.count("parts");
                 },
                 run_displacement});
    v.push_back({"green-free",
                 "Rigorous bracket for G_d(0); for d = 3 it must contain Watson's closed form.",
                 {{"dims", json::array({3, 4}), "dimensions (>= 3)"}, {"precision", 1e-4, "half the allowed width"}},
                 [](const Params& p) {
                   for (int d : p.ints("dims")) require(d >= 3 && d <= 8, "dims must lie in [3, 8]; G_d(0) is infinite for d <= 2");
                   require(p.num("precision") >= 1e-12, "precision must be >= 1e-12");
                 },
                 run_green_free});
    v.push_back({"green-ball",
                 "Decay of G_3(0) - G_D(r)(0,0) in r from exact killed solves.",
                 {{"radii", json::array({10.0, 20.0, 40.0}), "ball radii"},
                  {"slope_low", -1.3, "lower acceptance bound of the log-log slope"},
                  {"slope_high", -0.7, "upper acceptance bound"}},
                 [](const Params& p) {
                   const auto r = p.nums("radii");
                   require(r.size() >= 2, "need at least two radii");
                   for (double x : r) require(x >= 2.0, "radii must be >= 2");
                 },
                 run_green_ball});
    v.push_back({"hitting-bounds",
                 "Exact hitting probabilities of axis and diagonal points inside the explicit-constant "
                 "envelopes, and the ratio identity through an independent boundary-value solve.",
                 {{"r", 30.0, "ball radius"},
                  {"min_abs_x", 3.0, "smallest |x|"},
                  {"max_abs_x", 15.0, "largest |x|"},
                  {"c_low", 0.0074262191552333526, "lower envelope constant (fitted on r = 20, 40)"},
                  {"c_up", 0.0, "upper envelope constant (fitted on r = 20, 40)"},
                  {"c_ref", 0.34490842685463285, "refined-bound constant (fitted on r = 20, 40)"},
                  {"c_edge", 0.0, "refined-bound boundary constant (fitted on r = 20, 40)"},
                  {"refit", false, "refit the constants on fit_radii instead of using the recorded ones"},
                  {"fit_radii", json::array({20.0, 40.0}), "radii for refitting"},
                  {"fit_margin", 1.1, "safety factor applied to refitted constants"},
                  {"identity_tolerance", 1e-12, "tolerance of the ratio identity"}},
                 [](const Params& p) {
                   require(p.num("r") >= 4.0, "r must be >= 4");
                   require(p.num("min_abs_x") >= 1.0 && p.num("max_abs_x") < p.num("r"), "need 1 <= min_abs_x and max_abs_x < r");
                   require(p.num("min_abs_x") <= p.num("max_abs_x"), "min_abs_x must not exceed max_abs_x");
                   for (double x : p.nums("fit_radii")) require(x > p.num("max_abs_x"), "fit radii must exceed max_abs_x");
                   require(!hitting_points(p.num("min_abs_x"), p.num("max_abs_x")).empty(), "no lattice points in the |x| range");
                 },
                 run_hitting_bounds});
    v.push_back({"fd-limit",
                 "(t^alpha/c2^2) F_d(lambda/t) against lambda^alpha at finite (epsilon, M).",
                 {{"dims", json::array({2, 3}), "dimensions"},
                  {"alphas", json::array({0.3, 0.5, 0.8}), "tail indices"},
                  {"lambdas", json::array({0.5, 1.0, 2.0}), "lambda values"},
                  {"t_log2_times_alpha", json::array({0.0, 1.0}), "t = 2^(k/alpha) for each k"},
                  {"epsilon", 1e-4, "lower cut of the depth window"},
                  {"M", 1e4, "upper cut"},
                  {"relative_tolerance", 0.02, "pass if the max relative deviation is at most this"},
                  {"constants", "escape", "constant set"}},
                 [](const Params& p) {
                   for (int d : p.ints("dims")) require_dim(d);
                   for (double a : p.nums("alphas")) require(a > 0.0 && a < 1.0, "every alpha must lie in (0,1)");
                   for (double l : p.nums("lambdas")) require(l > 0.0, "lambdas must be positive");
                   require(p.num("epsilon") > 0.0 && p.num("epsilon") < p.num("M"), "need 0 < epsilon < M");
                   (void)constant_set_from_string(p.str("constants"));
                 },
                 run_fd_limit});
    v.push_back({"ctrw-compare",
                 "Two-sample KS of the rescaled annealed CTRW against the FK process at time 1.",
                 {{"d", 3, "dimension"},
                  {"alpha", 0.5, "tail index"},
                  {"N", 1e6, "time of the CTRW"},
                  {"samples", 20000, "samples of each"},
                  {"fk_sampler", "marginal", "marginal (exact one-time law) or path"},
                  {"ks_tolerance", 0.05, "pass if KS <= this"}},
                 [](const Params& p) {
                   require_dim(static_cast<int>(p.integer("d")));
                   require_alpha(p);
                   require(p.num("N") >= 1.0, "N must be >= 1");
                   (void)p.count("samples");
                   const auto s = p.str("fk_sampler");
                   require(s == "marginal" || s == "path", "fk_sampler must be marginal or path");
                 },
                 run_ctrw_compare});
    return v;
  }();
  return cat;
}

inline const ExperimentDef& find_experiment(const std::string& name) {
  for (const auto& e : experiment_catalog()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : experiment_catalog()) known += (known.empty() ? "" : ", ") + e.name;
  throw UsageError("unknown experiment '" + name + "' (known: " + known + ")");
}

/// Defaults overlaid with the user's values. Unknown keys and type mismatches
/// are usage errors, as is anything the experiment's validator rejects.
inline json resolve_params(const ExperimentDef& def, const json& user) {
  if (!user.is_null() && !user.is_object()) throw UsageError("params must be a JSON object");
  json out = json::object();
  for (const auto& s : def.params) out[s.name] = s.default_value;
  if (user.is_object()) {
    for (const auto& [k, v] : user.items()) {
      const auto it = std::find_if(def.params.begin(), def.params.end(), [&](const ParamSpec& s) { return s.name == k; });
      if (it == def.params.end()) throw UsageError("experiment '" + def.name + "' has no parameter '" + k + "'");
      const auto& dv = it->default_value;
      const bool ok = (dv.is_number() && v.is_number()) || (dv.is_string() && v.is_string()) ||
                      (dv.is_boolean() && v.is_boolean()) || (dv.is_array() && v.is_array()) ||
                      (dv.is_null() && (v.is_null() || v.is_number_integer())) ||
                      (k == "env_seed" && (v.is_null() || v.is_number_integer()));
      if (!ok) throw UsageError("parameter '" + k + "' has the wrong type (expected " + std::string(dv.type_name()) + ")");
      out[k] = v;
    }
  }
  try {
    def.validate(Params(out));
  } catch (const UsageError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad parameter value: ") + e.what());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return out;
}

struct RunReport {
  std::string experiment;
  json params;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  ExperimentOutput output;
  double wall_seconds = 0.0;

  bool passed() const { return output.passed(); }

  json to_json() const {
    json rows = json::array();
    for (const auto& r : output.rows) rows.push_back(trapfk::to_json(r));
    json files = json::array();
    for (const auto& [k, _] : output.csv) files.push_back(k);
    for (const auto& [k, _] : output.svg) files.push_back(k);
    return {{"experiment", experiment},
            {"params", params},
            {"master_seed", master_seed},
            {"threads", threads},
            {"constants", output.constants},
            {"seed_provenance",
             {{"master_seed", master_seed},
              {"generator", "Philox4x32-10, key from (master_seed, purpose), counter (replica id, block)"},
              {"streams", output.streams}}},
            {"rows", rows},
            {"passed", passed()},
            {"wall_clock_seconds", wall_seconds},
            {"files", files}};
  }
};

/// Resolve, validate and run. Throws UsageError for configuration problems.
inline RunReport run_experiment(const std::string& name, const json& user_params, std::uint64_t master_seed,
                                unsigned threads) {
  const auto& def = find_experiment(name);
  RunReport rep;
  rep.experiment = name;
  rep.params = resolve_params(def, user_params);
  rep.master_seed = master_seed;
  rep.threads = std::max(1u, threads);
  const auto t0 = std::chrono::steady_clock::now();
  rep.output = def.run(Params(rep.params), RunContext{master_seed, rep.threads});
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Write report.json, the CSVs and the SVGs into dir (created if needed).
inline std::vector<std::filesystem::path> write_run(const RunReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    f << text;
    written.push_back(path);
  };
  for (const auto& [k, v] : rep.output.csv) put(k, v);
  for (const auto& [k, v] : rep.output.svg) put(k, v);
  put("report.json", rep.to_json().dump(2) + "\n");
  return written;
}

}  // namespace trapfk

#endif  // TRAPFK_EXPERIMENTS_HPP
