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

#ifndef NDPOLY_POLYMER_HPP
#define NDPOLY_POLYMER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ndpoly/env.hpp"
#include "ndpoly/geom.hpp"
#include "ndpoly/model.hpp"
#include "ndpoly/stats.hpp"

namespace ndpoly::polymer {

/// Cheap dispatch over the environment flavors the walkers consume.
class EnvView {
 public:
  static EnvView of(const env::LatticeEnvironment& e) {
    EnvView v;
    v.lattice_ = &e;
    return v;
  }
  static EnvView of(const env::CoupledEnvironment& e) {
    EnvView v;
    v.coupled_ = &e;
    return v;
  }
  /// Same environment with every value moved by `offset` (for the
  /// omega -> omega + c, h -> h + c invariance checks).
  static EnvView shifted(const env::LatticeEnvironment& e, double offset) {
    EnvView v;
    v.lattice_ = &e;
    v.offset_ = offset;
    return v;
  }
  double value(const Site& s) const {
    return (lattice_ != nullptr ? lattice_->value(s) : coupled_->value(s)) + offset_;
  }

 private:
  const env::LatticeEnvironment* lattice_ = nullptr;
  const env::CoupledEnvironment* coupled_ = nullptr;
  double offset_ = 0.0;
};

struct PartitionEstimate {
  double logZ = 0.0;
  bool exact = false;
  long long N = 0;
  double beta = 0.0;
  double h = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  double rel_stderr = 0.0;        // stderr of Z over Z (mc only)
  double ess = 0.0;               // effective sample size of the weights
  double top_weight_share = 0.0;  // largest single replica share
  bool heavy_tail_warning = false;  // top replica carries > 50% of the mass
  std::uint64_t kept_replicas = 0;  // after the restriction filter
};

/// Restriction of the path ensemble through the sup-norm excursion M_N.
struct Restriction {
  enum class Type { none, max_le, max_in } type = Type::none;
  double a = 0.0;  // max_le: M_N <= a;  max_in: M_N in [a, b)
  double b = 0.0;
};

/// Exact partition function by full path enumeration; the path count
/// (2d)^N is capped at 1e8.
PartitionEstimate partition_exact(const EnvView& e, long long N, double beta, double h, int d);

/// Per-replica record of the Monte Carlo ensemble.
struct ReplicaRecord {
  double log_weight = 0.0;     // beta * sum_{x in R_N} (omega_x - h)
  std::int32_t max_disp = 0;   // M_N
  std::uint32_t range_size = 0;
};

/// Simulate the ensemble once; every estimator below is a deterministic
/// reduction of this record set, so restricted and unrestricted statistics
/// can share replicas pathwise.
std::vector<ReplicaRecord> mc_ensemble(const EnvView& e, long long N, double beta, double h,
                                       int d, std::uint64_t replicas, std::uint64_t seed);

/// Reduce an ensemble to a partition estimate under a restriction.
PartitionEstimate reduce_partition(std::span<const ReplicaRecord> ensemble,
                                   const Restriction& r, long long N, double beta, double h,
                                   std::uint64_t seed);

/// Plain Monte Carlo partition function.
PartitionEstimate partition_mc(const EnvView& e, long long N, double beta, double h, int d,
                               std::uint64_t replicas, std::uint64_t seed,
                               const Restriction& r = {});

struct RegionStatistic {
  double value = 0.0;
  PartitionEstimate partition;
  double normalization = 0.0;    // the divisor applied to log Z
  double h_correction = 0.0;     // region A: |h| N^{-(d-alpha)/alpha} budget
  double centering = 0.0;        // region C gaussian: subtracted term
  double centering_stderr = 0.0; // propagated from the mean-range estimate
};

/// Ballistic normalization log Z / (beta_N N^{d/alpha}) at h = 0, with the
/// field-correction budget reported.
RegionStatistic region_A_statistic(const model::ModelParams& p, long long N, const EnvView& e,
                                   std::uint64_t replicas, std::uint64_t seed);

/// Intermediate normalization N^{-(2 xi - 1)} log Z at h = mu.
RegionStatistic region_B_statistic(const model::ModelParams& p, long long N, const EnvView& e,
                                   std::uint64_t replicas, std::uint64_t seed);

enum class RegionCVariant { gaussian, chi, w };

/// Diffusive-regime normalizations; each variant checks its (alpha, d)
/// window and is rejected outside it.
RegionStatistic region_C_statistic(const model::ModelParams& p, long long N, const EnvView& e,
                                   std::uint64_t replicas, std::uint64_t seed,
                                   RegionCVariant variant);

/// Mean range size E|R_N| by plain simulation.
stats::MCEstimate mean_range_size(int d, long long N, std::uint64_t replicas,
                                  std::uint64_t seed);

struct FluctuationRecord {
  std::vector<long long> n_grid;
  std::vector<double> median_m;     // per N: median over environments of the
                                    // Gibbs-weighted median of M_N
  std::vector<double> band_lo;      // quantile band, pooled over environments
  std::vector<double> band_hi;
  double slope = 0.0;               // least-squares slope of log median vs log N
  double slope_ci_lo = 0.0;         // bootstrap over environments and replicas
  double slope_ci_hi = 0.0;
  std::vector<double> min_ess;      // per N: worst environment ESS
  bool low_ess_flag = false;        // some cell fell below 100
};

/// Transversal fluctuation exponent scan: per (environment, N) the
/// Gibbs-weighted quantiles of M_N from plain sampling, medians across
/// environments, and a bootstrap confidence interval for the log-log slope.
FluctuationRecord fluctuation_exponent(const model::ModelParams& p,
                                       std::span<const long long> N_grid, int environments,
                                       std::uint64_t replicas, double quantile_band,
                                       std::uint64_t seed);

}  // namespace ndpoly::polymer

#endif  // NDPOLY_POLYMER_HPP
