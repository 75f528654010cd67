#ifndef TRAPFK_LATTICE_HPP
#define TRAPFK_LATTICE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trapfk/errors.hpp"

namespace trapfk {

/// A point of Z^D.
template <int D>
using Site = std::array<std::int32_t, D>;

template <int D>
constexpr Site<D> origin() noexcept {
  return Site<D>{};
}

template <int D>
constexpr std::int64_t norm_sq(const Site<D>& x) noexcept {
  std::int64_t s = 0;
  for (int i = 0; i < D; ++i) s += std::int64_t{x[i]} * x[i];
  return s;
}

template <int D>
constexpr std::int64_t dist_sq(const Site<D>& x, const Site<D>& y) noexcept {
  std::int64_t s = 0;
  for (int i = 0; i < D; ++i) {
    const std::int64_t c = std::int64_t{x[i]} - y[i];
    s += c * c;
  }
  return s;
}

template <int D>
inline double norm(const Site<D>& x) noexcept {
  return std::sqrt(static_cast<double>(norm_sq<D>(x)));
}

/// Euclidean distance; all "dist" in the coarse-graining construction means this.
template <int D>
inline double dist(const Site<D>& x, const Site<D>& y) noexcept {
  return std::sqrt(static_cast<double>(dist_sq<D>(x, y)));
}

template <int D>
constexpr std::int64_t l1_dist(const Site<D>& x, const Site<D>& y) noexcept {
  std::int64_t s = 0;
  for (int i = 0; i < D; ++i) s += x[i] > y[i] ? std::int64_t{x[i]} - y[i] : std::int64_t{y[i]} - x[i];
  return s;
}

// Templated on the array extent so the dimension is deducible from the operands.
template <std::size_t N>
constexpr std::array<std::int32_t, N> operator+(std::array<std::int32_t, N> a,
                                                const std::array<std::int32_t, N>& b) noexcept {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}

template <std::size_t N>
constexpr std::array<std::int32_t, N> operator-(std::array<std::int32_t, N> a,
                                                const std::array<std::int32_t, N>& b) noexcept {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}

/// Neighbor number k in [0, 2D): coordinate k/2, sign by parity.
template <int D>
constexpr Site<D> step(Site<D> x, std::uint32_t k) noexcept {
  x[k >> 1] += (k & 1u) ? -1 : 1;
  return x;
}

/// True iff |x|_2 <= r, computed exactly on integers when r is integral and
/// otherwise by comparing squared norms in double.
inline bool within_radius(std::int64_t norm_squared, double r) noexcept {
  return static_cast<double>(norm_squared) <= r * r;
}

/// Offsets z in Z^D with |z|_2 <= r, in lexicographic order.
template <int D>
std::vector<Site<D>> ball_offsets(double r) {
  std::vector<Site<D>> out;
  if (r < 0) return out;
  const auto R = static_cast<std::int32_t>(std::floor(r));
  Site<D> z;
  z.fill(-R);
  while (true) {
    if (within_radius(norm_sq<D>(z), r)) out.push_back(z);
    int i = D - 1;
    while (i >= 0 && z[i] == R) {
      z[i] = -R;
      --i;
    }
    if (i < 0) break;
    ++z[i];
  }
  return out;
}

template <int D>
std::string to_string(const Site<D>& x) {
  std::string s = "(";
  for (int i = 0; i < D; ++i) {
    if (i) s += ",";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

template <int D>
struct SiteHash {
  std::size_t operator()(const Site<D>& x) const noexcept {
    std::uint64_t h = 0x51ED27u;
    for (int i = 0; i < D; ++i) {
      h ^= static_cast<std::uint32_t>(x[i]) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 4;

/// Call f.template operator()<D>() for the runtime dimension d.
template <typename F>
decltype(auto) dispatch_dim(int d, F&& f) {
  switch (d) {
    case 2:
      return std::forward<F>(f).template operator()<2>();
    case 3:
      return std::forward<F>(f).template operator()<3>();
    case 4:
      return std::forward<F>(f).template operator()<4>();
    default:
      throw UnsupportedDimension("dimension " + std::to_string(d) + " not supported (need 2 <= d <= 4)");
  }
}

}  // namespace trapfk

#endif  // TRAPFK_LATTICE_HPP
