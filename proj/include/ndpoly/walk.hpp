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

#ifndef NDPOLY_WALK_HPP
#define NDPOLY_WALK_HPP

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "ndpoly/geom.hpp"
#include "ndpoly/rng.hpp"
#include "ndpoly/stats.hpp"

namespace ndpoly::walk {

/// Nearest-neighbor path of length N started at the origin.
struct WalkPath {
  int dim = 2;
  std::vector<Site> steps;  // steps.size() == N + 1, steps[0] = 0
};

/// Visited sites, their count, and the sup-norm excursion.
struct RangeSummary {
  std::vector<Site> range;
  std::size_t size = 0;
  std::int32_t max_disp = 0;  // max_n |S_n|_inf
};

WalkPath simulate_walk(long long N, int d, std::uint64_t seed);
RangeSummary range_summary(const WalkPath& path);

/// One uniform nearest-neighbor step applied in place.
inline void step_site(Site& s, int d, rng::Stream& rs) {
  const auto dir = static_cast<int>(rs.next_below(2 * static_cast<std::uint64_t>(d)));
  s.c[dir >> 1] += (dir & 1) ? 1 : -1;
}

/// Set of visited sites behind a packed-key hash set. The packing span
/// bounds the reachable coordinates; construction rejects walks too long
/// for the chosen dimension's packing.
class RangeTracker {
 public:
  RangeTracker(int d, long long max_steps);
  void reset() { set_.clear(); }
  /// True when the site was not yet in the range.
  bool insert(const Site& s) { return set_.insert(pack_site(s)).second; }
  bool contains(const Site& s) const { return set_.count(pack_site(s)) > 0; }
  std::size_t size() const { return set_.size(); }

 private:
  std::unordered_set<std::uint64_t, PackedSiteHash> set_;
};

/// P(the ordered tuple delta is visited in order within N steps), by direct
/// simulation with early termination on completion.
stats::MCEstimate visit_probability_mc(std::span<const Site> delta, long long N, int d,
                                       std::uint64_t replicas, std::uint64_t seed);

/// One-pass N-sweep sharing the walks across the grid (common random
/// numbers): entry j estimates P(delta visited in order within N_grid[j]).
std::vector<stats::MCEstimate> visit_probability_sweep(std::span<const Site> delta,
                                                       std::span<const long long> N_grid, int d,
                                                       std::uint64_t replicas, std::uint64_t seed);

/// Exact P(S_N = s) by splitting the N steps across the axes (multinomial)
/// and per-axis binomials; log-domain. d = 2 or 3.
double exact_endpoint_probability(const Site& s, long long N);

/// Exact expected number of visits to s within N steps: sum_n P(S_n = s).
double exact_mean_visits(const Site& s, long long N);

/// Rate table for reaching x N^xi: entries -log U_N / N^{2 xi - 1} with U_N
/// the exact mean-visit count at the parity-matched target (d = 2 exact
/// path; the polynomial factors wash out of the rate).
struct RatePoint {
  long long N = 0;
  double rate = 0.0;
};
std::vector<RatePoint> ld_rate_check(const Vec& x, double xi, std::span<const long long> N_grid);

/// Lattice Green function sum_n P(S_n = x), d >= 3. Evaluated as a
/// one-dimensional integral of a product of scaled Bessel functions with an
/// analytic tail; relative accuracy ~1e-9.
double green_function(const Site& x);

/// Escape probability lambda_d = P(never return) = 1/G(0); d >= 3.
double escape_probability(int d);

/// MC estimate of the escape probability: survival at N with a Richardson
/// step removing the leading N^{-1/2} no-return tail bias.
struct EscapeMc {
  double survival_at_N = 0.0;  // P(no return by N)
  double corrected = 0.0;      // 2 P(no return by N) - P(no return by N/4)
  double stderr_ = 0.0;        // bootstrap stderr of `corrected`
  std::uint64_t replicas = 0;
};
EscapeMc escape_probability_mc(int d, long long N, std::uint64_t replicas, std::uint64_t seed);

/// P(x ever visited) = G(x)/G(0); x = 0 gives 1. d >= 3.
double hitting_probability_inf(const Site& x, int d);

/// Scaling profile of visit probabilities: in d = 2 the exponential
/// integral of |x|^2/2, in d >= 3 a heat-kernel time integral times twice
/// the escape probability. x = 0 rejected (singular).
double f_profile(const Vec& x, int d);

/// MC table of v_N P(nearest parity site of x sqrt(N) in R_N) against
/// f(x), with v_N = log N (d=2) or N^{d/2-1} (d>=3).
struct LocalLimitRow {
  long long N = 0;
  double scaled_probability = 0.0;  // v_N * empirical probability
  double stderr_ = 0.0;             // of the scaled probability
  double ratio_to_f = 0.0;
  bool zero_hits = false;
};
std::vector<LocalLimitRow> local_limit_check(const Vec& x, int d,
                                             std::span<const long long> N_grid,
                                             std::uint64_t replicas, std::uint64_t seed);

/// Overlap sum J_N = sum_x P(x in R_N)^2 = E |R_N ^(1) cap R_N^(2)|.
/// Exact path enumeration for tiny N, two-walk MC otherwise.
struct OverlapResult {
  double j_n = 0.0;
  double stderr_ = 0.0;
  bool exact = false;
};
OverlapResult overlap_sum(long long N, int d, bool exact, std::uint64_t replicas,
                          std::uint64_t seed);

}  // namespace ndpoly::walk

#endif  // NDPOLY_WALK_HPP
