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

#ifndef NDPOLY_STATS_HPP
#define NDPOLY_STATS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ndpoly::stats {

/// Monte Carlo scalar estimate with provenance.
struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  bool zero_hits = false;  // no replica contributed; mean is a flagged 0
};

MCEstimate mc_mean(std::span<const double> values, std::uint64_t seed);

/// Standard error of the mean via batch means (guards against the mild
/// within-stream correlation of derived observables).
double batch_means_stderr(std::span<const double> values, int batches = 64);

/// Effective sample size of nonnegative weights: (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

/// Largest single-weight share of the total.
double top_weight_share(std::span<const double> weights);

/// log(sum exp(lw_i)) computed stably.
double log_sum_exp(std::span<const double> log_weights);

/// Weighted quantile of (value, weight) pairs, q in [0,1].
double weighted_quantile(std::vector<double> values, std::vector<double> weights, double q);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// One-sample KS distance against a cdf.
double ks_distance_cdf(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Wilson score interval for a binomial proportion.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = 1.96);

/// Least-squares slope of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Pearson chi-square statistic against expected counts; returns the
/// p-value from the chi-square tail with k-1 degrees of freedom.
double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected);

/// Regularized upper incomplete gamma Q(a, x) (series/continued fraction).
double gamma_q(double a, double x);

}  // namespace ndpoly::stats

#endif  // NDPOLY_STATS_HPP
