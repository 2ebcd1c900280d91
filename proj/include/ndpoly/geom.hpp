// Copyright 2026 The ndpoly Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NDPOLY_GEOM_HPP
#define NDPOLY_GEOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ndpoly/rng.hpp"

namespace ndpoly {

inline constexpr int kMaxDim = 8;

/// Point of R^d, d <= kMaxDim. Unused coordinates stay zero.
struct Vec {
  std::array<double, kMaxDim> c{};
  int d = 0;

  Vec() = default;
  explicit Vec(int dim) : d(dim) {}
  Vec(std::initializer_list<double> xs) : d(static_cast<int>(xs.size())) {
    int i = 0;
    for (double x : xs) c[i++] = x;
  }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  double norm2() const {
    double s = 0;
    for (int i = 0; i < d; ++i) s += c[i] * c[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
  double norm1() const {
    double s = 0;
    for (int i = 0; i < d; ++i) s += std::fabs(c[i]);
    return s;
  }
  double norm_inf() const {
    double s = 0;
    for (int i = 0; i < d; ++i) s = std::max(s, std::fabs(c[i]));
    return s;
  }

  friend Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.d);
    for (int i = 0; i < a.d; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
  }
  friend Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.d);
    for (int i = 0; i < a.d; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
  }
  friend Vec operator*(double s, const Vec& a) {
    Vec r(a.d);
    for (int i = 0; i < a.d; ++i) r.c[i] = s * a.c[i];
    return r;
  }
  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.d != b.d) return false;
    for (int i = 0; i < a.d; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
};

inline double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// Lattice site of Z^d.
struct Site {
  std::array<std::int32_t, kMaxDim> c{};
  int d = 0;

  Site() = default;
  explicit Site(int dim) : d(dim) {}
  Site(std::initializer_list<std::int32_t> xs) : d(static_cast<int>(xs.size())) {
    int i = 0;
    for (auto x : xs) c[i++] = x;
  }

  std::int64_t norm2() const {
    std::int64_t s = 0;
    for (int i = 0; i < d; ++i) s += std::int64_t(c[i]) * c[i];
    return s;
  }
  std::int64_t norm1() const {
    std::int64_t s = 0;
    for (int i = 0; i < d; ++i) s += std::abs(std::int64_t(c[i]));
    return s;
  }
  std::int32_t norm_inf() const {
    std::int32_t s = 0;
    for (int i = 0; i < d; ++i) s = std::max(s, std::abs(c[i]));
    return s;
  }
  Vec to_vec() const {
    Vec v(d);
    for (int i = 0; i < d; ++i) v.c[i] = c[i];
    return v;
  }
  friend bool operator==(const Site& a, const Site& b) {
    if (a.d != b.d) return false;
    for (int i = 0; i < a.d; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
  /// Lexicographic order; used as the deterministic tie-break.
  friend bool operator<(const Site& a, const Site& b) {
    for (int i = 0; i < a.d; ++i) {
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    }
    return false;
  }
};

/// Bits per coordinate so that d coordinates pack into one 64-bit key.
constexpr int site_pack_bits(int d) {
  switch (d) {
    case 1: return 62;
    case 2: return 31;
    case 3: return 21;
    case 4: return 15;
    case 5: return 12;
    default: return 10;
  }
}

/// Largest |coordinate| a packed key can hold.
constexpr std::int32_t site_pack_span(int d) {
  return (std::int32_t{1} << (site_pack_bits(d) - 1)) - 2;
}

inline std::uint64_t pack_site(const Site& s) {
  const int bits = site_pack_bits(s.d);
  const std::uint64_t off = std::uint64_t{1} << (bits - 1);
  std::uint64_t key = 0;
  for (int i = 0; i < s.d; ++i) {
    key = (key << bits) | (static_cast<std::uint64_t>(std::int64_t(s.c[i]) + off));
  }
  return key;
}

struct PackedSiteHash {
  std::size_t operator()(std::uint64_t k) const noexcept {
    return static_cast<std::size_t>(rng::mix64(k));
  }
};

/// Volume of the unit Euclidean ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

/// Number of lattice sites in the closed Euclidean ball of radius r.
/// Exact count; cost grows like r^{d-1}.
std::int64_t lattice_ball_count(int d, double r);

/// All sites of the lattice ball, in lexicographic order.
std::vector<Site> lattice_ball_sites(int d, double r);

/// Visit every site of the lattice ball without materializing it.
void for_each_ball_site(int d, double r, const std::function<void(const Site&)>& fn);

/// Uniform point in the Euclidean ball of radius r (direction from Gaussians,
/// radius from the d-th root of a uniform).
Vec uniform_in_ball(int d, double r, rng::Stream& rs);

/// Lattice site nearest to x whose coordinate sum has the parity of n.
/// Random-walk positions at time n live on that sublattice.
Site nearest_site_with_parity(const Vec& x, long long n);

/// Plain coordinatewise rounding.
Site nearest_site(const Vec& x);

}  // namespace ndpoly

#endif  // NDPOLY_GEOM_HPP
