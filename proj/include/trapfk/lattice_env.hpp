#ifndef TRAPFK_LATTICE_ENV_HPP
#define TRAPFK_LATTICE_ENV_HPP

// The quenched trap-depth field, the level-n scales and the trap
// classification used by the coarse-graining construction.
//
// tau is never stored: each value is a Philox output keyed on the master seed
// and counted by the site coordinates, so the field is a pure function of
// (seed, x) and any number of replicas or threads see the same environment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "trapfk/errors.hpp"
#include "trapfk/lattice.hpp"
#include "trapfk/rng.hpp"

namespace trapfk {

enum class TailMode {
  pareto,     ///< L == 0: P[tau >= u] = u^-alpha exactly for u >= 1.
  perturbed,  ///< P[tau >= u] = min(1, u^-alpha (1 + L(u))) with user L, |L| <= bound.
  constant,   ///< tau == constant_value everywhere. Testing hook, not a trap model.
};

/// Tail law of the trap depths. tau >= 1 always (the normalisation of the
/// law for small u is a free choice; only the u -> infinity tail matters).
struct TailSpec {
  double alpha = 0.5;
  TailMode mode = TailMode::pareto;
  /// Perturbed mode: the function L and a bound sup |L| < 1.
  std::function<double(double)> perturbation;
  double perturbation_bound = 0.0;
  /// Perturbed mode built from JSON uses L(u) = coeff * u^-exponent.
  double power_coeff = 0.0;
  double power_exponent = 1.0;
  double constant_value = 1.0;

  static TailSpec pareto(double alpha) {
    TailSpec t;
    t.alpha = alpha;
    return t;
  }

  static TailSpec constant(double value, double alpha = 0.5) {
    TailSpec t;
    t.alpha = alpha;
    t.mode = TailMode::constant;
    t.constant_value = value;
    return t;
  }

  /// L(u) = coeff * u^-exponent, which tends to 0 as required.
  static TailSpec power_perturbation(double alpha, double coeff, double exponent) {
    TailSpec t;
    t.alpha = alpha;
    t.mode = TailMode::perturbed;
    t.power_coeff = coeff;
    t.power_exponent = exponent;
    t.perturbation = [coeff, exponent](double u) { return coeff * std::pow(u, -exponent); };
    t.perturbation_bound = std::abs(coeff);
    return t;
  }

  static TailSpec custom(double alpha, std::function<double(double)> L, double bound) {
    TailSpec t;
    t.alpha = alpha;
    t.mode = TailMode::perturbed;
    t.perturbation = std::move(L);
    t.perturbation_bound = bound;
    return t;
  }

  bool is_testing_hook() const noexcept { return mode == TailMode::constant; }

  /// P[tau >= u].
  double survival(double u) const {
    switch (mode) {
      case TailMode::constant:
        return u <= constant_value ? 1.0 : 0.0;
      case TailMode::pareto:
        return u <= 1.0 ? 1.0 : std::pow(u, -alpha);
      case TailMode::perturbed:
        return u <= 1.0 ? 1.0 : std::min(1.0, std::pow(u, -alpha) * (1.0 + perturbation(u)));
    }
    return 0.0;
  }

  /// Generalised inverse of the survival function at a uniform draw in (0,1).
  double quantile(double uniform) const {
    switch (mode) {
      case TailMode::constant:
        return constant_value;
      case TailMode::pareto:
        return std::pow(uniform, -1.0 / alpha);
      case TailMode::perturbed:
        break;
    }
    // inf{u >= 1 : survival(u) <= U}; bracketed because survival(u) <= u^-a (1 + bound).
    double lo = 0.0;
    double hi = std::log((1.0 + perturbation_bound) / uniform) / alpha;
    if (survival(1.0) <= uniform) return 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (survival(std::exp(mid)) <= uniform) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return std::exp(hi);
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1), got " + std::to_string(alpha));
    if (mode == TailMode::constant && !(constant_value > 0.0)) throw ParameterError("constant tau must be positive");
    if (mode == TailMode::perturbed) {
      if (!perturbation) throw ParameterError("perturbed tail needs a function L");
      if (!(perturbation_bound >= 0.0 && perturbation_bound < 1.0)) {
        throw ParameterError("perturbation bound must lie in [0,1)");
      }
      // The survival function must be nonincreasing; probe on a log grid.
      double prev = 1.0;
      for (double lu = 0.0; lu <= 60.0; lu += 0.05) {
        const double s = survival(std::exp(lu));
        if (s > prev * (1.0 + 1e-12)) throw ParameterError("perturbed tail is not a survival function (increases)");
        prev = s;
      }
    }
  }

  std::string mode_name() const {
    switch (mode) {
      case TailMode::pareto:
        return "zero";
      case TailMode::perturbed:
        return "power";
      case TailMode::constant:
        return "constant";
    }
    return "?";
  }
};

/// Level-n length and depth scales.
struct ScaleSet {
  int n = 0;
  int d = 0;
  double alpha = 0.0;
  double r = 0.0;      ///< spatial scale
  double g = 0.0;      ///< depth scale of the traps that dominate the clock
  double rho = 0.0;    ///< coarse-graining radius
  double nu = 0.0;     ///< proximity radius
  double h = 0.0;      ///< r / rho
  double gamma = 0.0;  ///< exponent of rho
  double kappa = 0.0;  ///< exponent of nu

  /// nu < rho < r. Holds for every n >= 1 (d >= 3) and n >= 2 (d = 2).
  bool separated() const noexcept { return nu < rho && rho < r; }
};

/// Default gamma in d = 2; any value below 1 - alpha is admissible.
inline double default_gamma_d2(double alpha) { return 0.5 * (1.0 - alpha); }

inline ScaleSet scales(int n, int d, double alpha, std::optional<double> gamma_d2 = std::nullopt) {
  if (d < 2) throw UnsupportedDimension("scales need d >= 2, got d = " + std::to_string(d));
  if (n < 1) throw ParameterError("level n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1)");
  ScaleSet s;
  s.n = n;
  s.d = d;
  s.alpha = alpha;
  const double nd = n;
  const double two_half = std::exp2(nd / 2.0);
  if (d == 2) {
    s.gamma = gamma_d2.value_or(default_gamma_d2(alpha));
    if (!(s.gamma < 1.0 - alpha)) throw ParameterError("d = 2 requires gamma < 1 - alpha");
    s.kappa = 5.0 / (1.0 - alpha);
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    s.r = inv_sqrt_pi * two_half * std::pow(nd, (1.0 - alpha) / 2.0);
    s.g = std::exp2(nd / alpha) / nd;
    s.rho = inv_sqrt_pi * two_half * std::pow(nd, s.gamma / 2.0);
    s.nu = inv_sqrt_pi * two_half * std::pow(nd, -s.kappa / 2.0);
  } else {
    s.gamma = 1.0 - 1.0 / (3.0 * d);
    s.kappa = 1.0 / d;
    s.r = two_half;
    s.g = std::exp2(nd / alpha);
    s.rho = std::exp2(s.gamma * nd / 2.0);
    s.nu = std::exp2(s.kappa * nd / 2.0);
  }
  s.h = s.r / s.rho;
  return s;
}

/// Explicitly planted depths that override the hashed field (testing hook).
template <int D>
using PlantedField = std::unordered_map<Site<D>, double, SiteHash<D>>;

/// The quenched environment. Immutable; tau() is safe to call from any thread.
template <int D>
class Environment {
 public:
  static_assert(D >= kMinDim && D <= kMaxDim);

  Environment(TailSpec tail, std::uint64_t master_seed, std::optional<double> region_radius = std::nullopt,
              PlantedField<D> planted = {})
      : tail_(std::move(tail)),
        seed_(master_seed),
        key_(derive_key(master_seed, static_cast<std::uint32_t>(StreamPurpose::environment))),
        radius_(region_radius) {
    tail_.validate();
    if (radius_ && !(*radius_ > 0.0)) throw ParameterError("region radius must be positive");
    if (!planted.empty()) planted_ = std::make_shared<const PlantedField<D>>(std::move(planted));
  }

  const TailSpec& tail() const noexcept { return tail_; }
  double alpha() const noexcept { return tail_.alpha; }
  std::uint64_t master_seed() const noexcept { return seed_; }
  std::optional<double> region_radius() const noexcept { return radius_; }
  bool bounded() const noexcept { return radius_.has_value(); }

  bool in_region(const Site<D>& x) const noexcept { return !radius_ || within_radius(norm_sq<D>(x), *radius_); }

  /// Distance from x to the sphere bounding the region (infinite if unbounded).
  double boundary_distance(const Site<D>& x) const noexcept {
    return radius_ ? *radius_ - norm<D>(x) : std::numeric_limits<double>::infinity();
  }

  /// tau_x. Throws RegionViolation outside a bounded region.
  double tau(const Site<D>& x) const {
    if (!in_region(x)) throw RegionViolation("site " + to_string<D>(x) + " lies outside the environment region");
    return tau_unchecked(x);
  }

  double tau_unchecked(const Site<D>& x) const {
    if (planted_) {
      if (auto it = planted_->find(x); it != planted_->end()) return it->second;
    }
    if (tail_.mode == TailMode::constant) return tail_.constant_value;
    return tail_.quantile(site_uniform(x));
  }

  /// The uniform variate behind tau_x.
  double site_uniform(const Site<D>& x) const noexcept {
    Philox4x32::Counter ctr{0u, 0u, 0u, static_cast<std::uint32_t>(D)};
    for (int i = 0; i < D; ++i) ctr[i] = static_cast<std::uint32_t>(x[i]);
    const auto out = Philox4x32::apply(ctr, key_);
    return to_unit_open((std::uint64_t{out[1]} << 32) | out[0]);
  }

 private:
  TailSpec tail_;
  std::uint64_t seed_;
  Philox4x32::Key key_;
  std::optional<double> radius_;
  std::shared_ptr<const PlantedField<D>> planted_;
};

/// Serializable description {d, alpha, L_mode, master_seed, n, m}. The
/// region is the ball of radius m * r(n); no field values are ever written.
struct EnvironmentDescriptor {
  int d = 3;
  double alpha = 0.5;
  std::string L_mode = "zero";
  std::uint64_t master_seed = 1;
  int n = 10;
  double m = 4.0;
  // Only meaningful for the corresponding L_mode.
  double L_coeff = 0.0;
  double L_exponent = 1.0;
  double constant_tau = 1.0;
  std::optional<double> gamma_d2;

  TailSpec tail() const {
    if (L_mode == "zero") return TailSpec::pareto(alpha);
    if (L_mode == "power") return TailSpec::power_perturbation(alpha, L_coeff, L_exponent);
    if (L_mode == "constant") return TailSpec::constant(constant_tau, alpha);
    throw ParameterError("unknown L_mode '" + L_mode + "' (expected zero, power or constant)");
  }

  ScaleSet level_scales() const { return scales(n, d, alpha, gamma_d2); }
  double region_radius() const { return m * level_scales().r; }

  template <int D>
  Environment<D> build() const {
    if (D != d) throw UnsupportedDimension("descriptor dimension mismatch");
    return Environment<D>(tail(), master_seed, region_radius());
  }
};

inline void to_json(nlohmann::json& j, const EnvironmentDescriptor& e) {
  j = nlohmann::json{{"d", e.d}, {"alpha", e.alpha}, {"L_mode", e.L_mode}, {"master_seed", e.master_seed},
                     {"n", e.n},  {"m", e.m}};
  if (e.L_mode == "power") {
    j["L_coeff"] = e.L_coeff;
    j["L_exponent"] = e.L_exponent;
  }
  if (e.L_mode == "constant") {
    j["constant_tau"] = e.constant_tau;
    j["testing_hook"] = true;
  }
  if (e.gamma_d2) j["gamma_d2"] = *e.gamma_d2;
}

inline void from_json(const nlohmann::json& j, EnvironmentDescriptor& e) {
  j.at("d").get_to(e.d);
  j.at("alpha").get_to(e.alpha);
  e.L_mode = j.value("L_mode", std::string("zero"));
  j.at("master_seed").get_to(e.master_seed);
  j.at("n").get_to(e.n);
  j.at("m").get_to(e.m);
  e.L_coeff = j.value("L_coeff", 0.0);
  e.L_exponent = j.value("L_exponent", 1.0);
  e.constant_tau = j.value("constant_tau", 1.0);
  if (j.contains("gamma_d2")) e.gamma_d2 = j.at("gamma_d2").get<double>();
}

/// Trap classification at level n. Membership is evaluated lazily from
/// tau() by scanning nu-balls, so nothing proportional to the region volume
/// is stored; deep_sites() enumerates the whole region on request.
template <int D>
class TrapSets {
 public:
  TrapSets(Environment<D> env, ScaleSet sc, double epsilon, double M)
      : env_(std::move(env)), sc_(sc), epsilon_(epsilon), M_(M) {
    if (!(epsilon < 1.0 && 1.0 < M)) throw ParameterError("trap window needs epsilon < 1 < M");
    if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be nonnegative");
    if (!env_.bounded()) throw ParameterError("trap classification needs a bounded region D(n)");
    if (sc_.d != D) throw UnsupportedDimension("scale set dimension mismatch");
    lo_ = epsilon_ * sc_.g;
    hi_ = M_ * sc_.g;
    nu_offsets_ = ball_offsets<D>(sc_.nu);
  }

  const Environment<D>& environment() const noexcept { return env_; }
  const ScaleSet& scale_set() const noexcept { return sc_; }
  double epsilon() const noexcept { return epsilon_; }
  double M() const noexcept { return M_; }
  double depth_low() const noexcept { return lo_; }
  double depth_high() const noexcept { return hi_; }
  /// p_eps^M = eps^-alpha - M^-alpha.
  double window_mass() const { return std::pow(epsilon_, -sc_.alpha) - std::pow(M_, -sc_.alpha); }

  bool in_region(const Site<D>& x) const noexcept { return env_.in_region(x); }

  bool depth_in_window(double tau) const noexcept { return lo_ <= tau && tau < hi_; }

  /// x in T_eps^M.
  bool is_deep(const Site<D>& x) const { return env_.in_region(x) && depth_in_window(env_.tau_unchecked(x)); }

  /// x in E(n): inside D(n) with no deep trap within distance nu.
  bool is_safe(const Site<D>& x) const {
    if (!env_.in_region(x)) return false;
    for (const auto& z : nu_offsets_) {
      if (is_deep(x + z)) return false;
    }
    return true;
  }

  /// x in E_0(n): safe and farther than rho from the boundary of D(n).
  bool is_safe_interior(const Site<D>& x) const { return env_.boundary_distance(x) > sc_.rho && is_safe(x); }

  /// x in B(n): a deep trap with another deep trap within nu. Empty for d = 2.
  bool is_bad(const Site<D>& x) const {
    if constexpr (D == 2) {
      return false;
    } else {
      if (!is_deep(x)) return false;
      for (const auto& z : nu_offsets_) {
        if (z == origin<D>()) continue;
        if (is_deep(x + z)) return true;
      }
      return false;
    }
  }

  /// Deep traps y with |y - center| <= radius.
  std::vector<Site<D>> deep_within(const Site<D>& center, double radius) const {
    std::vector<Site<D>> out;
    for (const auto& z : ball_offsets<D>(radius)) {
      const Site<D> y = center + z;
      if (is_deep(y)) out.push_back(y);
    }
    return out;
  }

  /// Every deep trap of D(n), lexicographic order. Cost ~ |D(n)|.
  std::vector<Site<D>> deep_sites() const { return deep_within(origin<D>(), *env_.region_radius()); }

  /// Every bad trap of D(n).
  std::vector<Site<D>> bad_sites() const {
    std::vector<Site<D>> out;
    for (const auto& y : deep_sites()) {
      if (is_bad(y)) out.push_back(y);
    }
    return out;
  }

 private:
  Environment<D> env_;
  ScaleSet sc_;
  double epsilon_;
  double M_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<Site<D>> nu_offsets_;
};

template <int D>
TrapSets<D> classify_traps(const Environment<D>& env, const ScaleSet& sc, double epsilon, double M) {
  return TrapSets<D>(env, sc, epsilon, M);
}

}  // namespace trapfk

#endif  // TRAPFK_LATTICE_ENV_HPP
