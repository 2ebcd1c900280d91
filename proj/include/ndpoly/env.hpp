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

#ifndef NDPOLY_ENV_HPP
#define NDPOLY_ENV_HPP

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "ndpoly/geom.hpp"
#include "ndpoly/rng.hpp"

namespace ndpoly::env {

/// Mean of the Pareto(alpha) law on [1, inf); requires alpha > 1.
double pareto_mean(double alpha);

/// Raw moment E[w^j] = alpha/(alpha - j); requires alpha > j.
double pareto_moment(double alpha, int j);

/// Central moment E[(w - mu)^j] with mu = pareto_mean(alpha).
double pareto_central_moment(double alpha, int j);

/// Variance of Pareto(alpha); requires alpha > 2.
double pareto_variance(double alpha);

/// i.i.d. draws with exact survival P(w > t) = t^{-alpha}, t >= 1.
std::vector<double> sample_pareto(double alpha, std::size_t n, std::uint64_t seed);

/// Descending (weight, site) pairs of a weight field, discrete or continuum.
struct OrderStatistics {
  int dim = 2;
  bool continuum = false;
  double domain_radius = 0.0;
  std::vector<double> weight;  // descending; ties broken by site order
  std::vector<Vec> site;
  std::size_t size() const { return weight.size(); }
};

/// Heavy-tail Pareto field on the lattice ball Lambda_r. Dense storage for
/// small radii; above that values are generated lazily from a counter RNG
/// keyed by (seed, site), so huge balls are never materialized and
/// concurrent readers agree without coordination.
class LatticeEnvironment {
 public:
  static constexpr double kDenseRadiusCap = 64.0;

  static LatticeEnvironment dense(int dim, double radius, double alpha, std::uint64_t seed);
  static LatticeEnvironment lazy(int dim, double radius, double alpha, std::uint64_t seed);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double alpha() const { return alpha_; }
  std::uint64_t seed() const { return seed_; }
  bool is_dense() const { return dense_; }

  /// Value at a site of the ball (dense: table lookup, lazy: regenerated).
  double value(const Site& s) const;

  /// Dense only: all sites in lexicographic order, values aligned.
  const std::vector<Site>& sites() const;
  const std::vector<double>& values() const;

  /// Full descending order statistics (dense only).
  OrderStatistics order_statistics() const;

  /// Top-ell order statistics by streaming the whole ball (any mode).
  OrderStatistics top_order_statistics(std::size_t ell) const;

 private:
  int dim_ = 2;
  double radius_ = 0.0;
  double alpha_ = 1.0;
  std::uint64_t seed_ = 0;
  bool dense_ = false;
  std::vector<Site> sites_;
  std::vector<double> values_;
  std::unordered_map<std::uint64_t, std::size_t, PackedSiteHash> index_;
};

/// Descending sort of all (value, site) pairs of a dense environment.
OrderStatistics order_statistics_discrete(const LatticeEnvironment& e);

/// Top-ell order statistics of the Poisson weight field restricted to the
/// Euclidean ball of radius q: the i-th weight is
/// (Vol_d q^d)^{1/alpha} (E_1+...+E_i)^{-1/alpha} with standard exponentials
/// E_j, and locations are i.i.d. uniform on the ball, independent of the
/// weights.
OrderStatistics sample_poisson_field(double q, double alpha, std::size_t ell, int d,
                                     std::uint64_t seed);

/// Lattice order statistics sharing the continuum field's random draws:
/// weights (n_r/Gamma_i)^{1/alpha} with n_r the lattice ball count and
/// Gamma_i the exponential partial sums behind `cont`; sites are the
/// nearest distinct lattice points of the rescaled continuum locations.
OrderStatistics couple_to_lattice(const OrderStatistics& cont, double r, double alpha);

/// Lattice environment consistent with planted top order statistics: the
/// planted sites carry the given weights, every other site of the ball is
/// an independent Pareto draw conditioned to stay below the smallest
/// planted weight, and sites beyond the ball are unconditioned.
class CoupledEnvironment {
 public:
  CoupledEnvironment(const OrderStatistics& planted_discrete, double alpha, std::uint64_t seed);

  double value(const Site& s) const;
  double cap() const { return cap_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }

 private:
  int dim_;
  double radius_;
  double alpha_;
  double cap_;
  std::uint64_t seed_;
  std::unordered_map<std::uint64_t, double, PackedSiteHash> planted_;
};

/// Truncation level k_N: (log N)^eta N^{d/2alpha} for d >= 3 and
/// (log log N)^eta N^{d/2alpha} for d = 2. Requires eta in (d/(2 alpha), 1).
double truncation_level(int d, double alpha, double eta, double N);

/// View of an environment with values centered and cut at level k_N:
/// (omega - mu) 1{omega <= k_N}.
struct TruncatedEnvironment {
  const LatticeEnvironment* base = nullptr;
  double level = 0.0;  // k_N
  double mu = 0.0;

  double value(const Site& s) const {
    const double w = base->value(s);
    return w <= level ? w - mu : 0.0;
  }
};

TruncatedEnvironment truncate_environment(const LatticeEnvironment& base, double N, double eta,
                                          double mu);

/// Exact-law diagnostics of the truncated coupling exp(beta * tilde_omega).
struct TruncatedMgf {
  double lambda = 0.0;       // log E[exp(beta tilde_omega)]
  double remainder = 0.0;    // |E[...] - 1 - sum_{i<=p} beta^i m_i / i!|
  double bound_shape = 0.0;  // the remainder envelope, up to one constant
  int bound_case = 1;        // 1: beta*k >= 1, 2: beta*k < 1
  double tolerance = 0.0;    // achieved quadrature tolerance
  bool converged = true;
};

/// Quadrature against the exact Pareto law; p must be a nonnegative integer
/// below alpha. mu is the centering (the Pareto mean when alpha > 1).
TruncatedMgf truncated_log_mgf(double alpha, double beta, double k, int p, double mu);

}  // namespace ndpoly::env

#endif  // NDPOLY_ENV_HPP
