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

#ifndef NDPOLY_LIMITS_HPP
#define NDPOLY_LIMITS_HPP

#include <cstdint>
#include <vector>

namespace ndpoly::limits {

/// Cutoffs and parameters of the compensated-integral samplers.
struct CompensatedIntegralSpec {
  double K = 6.0;      // spatial cutoff, points sampled in the ball B_K
  double eps_w = 0.0;  // weight floor; 0 picks the default 1% of the median top weight
  double alpha = 1.5;
  int d = 2;
  double beta = 0.0;  // 0 allowed (drops the exponential term)
  double quad_tol = 1e-9;
};

/// Green-weighted centered environment sum, truncated to |x| <= r_cut.
/// Admissible only for d >= 5 with alpha > d/(d-2); each sample carries a
/// median-level bound on the dropped tail.
struct ChiSample {
  double value = 0.0;
  double tail_bound = 0.0;  // median-level budget for the |x| > r_cut remainder
};

std::vector<ChiSample> chi_estimate(double alpha, int d, double mu, double r_cut, std::size_t n,
                                    std::uint64_t seed);

/// Coupled truncations of the same environment at r_cut and 2 r_cut.
struct ChiNested {
  double at_r = 0.0;
  double at_2r = 0.0;
  double tail_bound_r = 0.0;
};
std::vector<ChiNested> chi_estimate_nested(double alpha, int d, double mu, double r_cut,
                                           std::size_t n, std::uint64_t seed);

/// Radial integrals of the visit profile over the ball of radius K.
double f_ball_integral(int d, double K, double tol, double power = 1.0);

/// Intensity mass subtracted by the compensated integral:
/// (alpha/(alpha-1)) eps^{1-alpha} * int_{B_K} f for alpha > 1 (requires
/// eps > 0); zero for alpha < 1 where the raw integral needs no
/// compensation; alpha = 1 rejected.
double compensator_integral(const CompensatedIntegralSpec& spec);

/// One draw of the compensated heavy-tail functional on the truncated
/// window, with its truncation channels attached.
struct WSample {
  double value = 0.0;
  double spatial_channel = 0.0;  // median-level threshold for the |x| > K remainder
  double weight_channel = 0.0;   // median-level budget for the w < eps remainder
  bool overflowed = false;       // an exponential term exceeded the long-double range
  std::uint32_t points = 0;      // Poisson point count of the window
  double eps_used = 0.0;
  double compensator = 0.0;
};

WSample w_sample(const CompensatedIntegralSpec& spec, std::uint64_t seed);

/// Nested couplings for the stability checks: the same point set evaluated
/// on the refined window and restricted to the coarse one.
struct WNestedPair {
  WSample coarse;
  WSample fine;
};
WNestedPair w_sample_k_doubling(const CompensatedIntegralSpec& spec, std::uint64_t seed);
WNestedPair w_sample_eps_halving(const CompensatedIntegralSpec& spec, std::uint64_t seed);

/// Poisson count distribution of the sampling window (for goodness-of-fit
/// checks): mean count Vol(B_K) eps^{-alpha}.
double expected_point_count(const CompensatedIntegralSpec& spec);

/// The default weight floor for a spec with eps_w = 0.
double default_eps(const CompensatedIntegralSpec& spec);

}  // namespace ndpoly::limits

#endif  // NDPOLY_LIMITS_HPP
