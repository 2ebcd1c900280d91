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

#ifndef NDPOLY_RNG_HPP
#define NDPOLY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ndpoly::rng {

/// SplitMix64 finalizer. Full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

/// FNV-1a over a string, used to derive per-stream keys from labels.
constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Key for stream `label`/`index` under a master seed. Streams derived from
/// distinct (label, index) pairs are independent for all practical purposes.
constexpr std::uint64_t derive_key(std::uint64_t master, std::string_view label,
                                   std::uint64_t index = 0) {
  return hash_combine(hash_combine(master, hash_label(label)), mix64(index));
}

/// Counter-based generator: output i is mix64(key + i*golden). No hidden
/// state beyond (key, counter), so any value can be regenerated from its
/// index; replica streams and lazily evaluated fields stay reproducible
/// independent of evaluation order.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}
  Stream(std::uint64_t master, std::string_view label, std::uint64_t index = 0)
      : state_(derive_key(master, label, index)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0,1], safe as argument of log().
  double next_unit_pos() { return 1.0 - next_unit(); }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // rejection to kill modulo bias
    const std::uint64_t lim = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= lim);
    return v % n;
  }

  double next_exp() { return -std::log(next_unit_pos()); }

  double next_gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = next_unit_pos();
    const double v = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(6.283185307179586476925287 * v);
    have_spare_ = true;
    return r * std::cos(6.283185307179586476925287 * v);
  }

  /// Poisson count; Knuth's product method for small mean, Hörmann's PTRS
  /// transformed rejection for large mean.
  std::uint64_t next_poisson(double mean);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Pareto(alpha) on [1, inf): survival P(w > t) = t^{-alpha} for t >= 1.
inline double pareto_from_unit(double alpha, double u_pos) {
  return std::pow(u_pos, -1.0 / alpha);
}

/// Pareto(alpha) conditioned on w <= cap (cap >= 1).
inline double pareto_below_from_unit(double alpha, double cap, double u) {
  const double p_le = 1.0 - std::pow(cap, -alpha);
  return std::pow(1.0 - u * p_le, -1.0 / alpha);
}

}  // namespace ndpoly::rng

#endif  // NDPOLY_RNG_HPP
