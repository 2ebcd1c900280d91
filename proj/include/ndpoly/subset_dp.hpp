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

#ifndef NDPOLY_SUBSET_DP_HPP
#define NDPOLY_SUBSET_DP_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ndpoly/geom.hpp"

namespace ndpoly {

/// Held-Karp style dynamic program over (subset, endpoint) states holding
/// the minimal length of an origin-anchored open path visiting the subset.
/// The state table is double up to 16 points and float above, keeping
/// 2^m * m states affordable up to m = 22 (~350 MB); lengths are
/// recomputed in double along reconstructed orders.
class SubsetPathDP {
 public:
  static constexpr int kMaxExactPoints = 22;

  /// States whose partial length exceeds prune_above are not extended;
  /// masks unreachable within the budget then read back +inf.
  void build(std::span<const Vec> pts,
             double prune_above = std::numeric_limits<double>::infinity());

  int size() const { return m_; }

  /// Minimal anchored path length visiting exactly the points of `mask`.
  double min_length(std::uint32_t mask) const;

  /// A visit order achieving min_length; ties broken toward smaller point
  /// indices so witnesses are deterministic.
  std::vector<int> min_length_order(std::uint32_t mask) const;

 private:
  double state(std::uint32_t mask, int j) const;

  int m_ = 0;
  bool wide_ = true;
  std::vector<double> dpd_;     // dp[mask * m_ + last], m <= 16
  std::vector<float> dpf_;      // same beyond 16 points
  std::vector<double> from0_;   // origin -> j
  std::vector<double> pair_;    // j -> k, row-major
};

}  // namespace ndpoly

#endif  // NDPOLY_SUBSET_DP_HPP
