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

#ifndef NDPOLY_VARPROB_HPP
#define NDPOLY_VARPROB_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ndpoly/entropy.hpp"
#include "ndpoly/env.hpp"
#include "ndpoly/geom.hpp"

namespace ndpoly::varprob {

/// Entropy flavor of the maximization: quadratic uses Ent_N (tour-length
/// squared over N), rate uses the time-allocated rate entropy.
enum class Kind { quadratic, rate };

/// Normalization of the objective: region-B style beta*energy - entropy,
/// or region-A style energy - entropy/beta.
enum class Normalization { beta_energy, energy_minus_over_beta };

struct VarProbSolution {
  double value = 0.0;  // >= 0, the empty set is always feasible
  entropy::OrderedPointSet witness;
  double energy = 0.0;
  double entropy = 0.0;
  std::size_t ell_used = 0;
  bool heuristic = false;     // order search was heuristic (annealing)
  bool order_refined = true;  // 2-swap refinement applied on the rate kind
};

/// Weight-selection window of an order-statistics field.
struct EnergySpec {
  const env::OrderStatistics* stats = nullptr;
  std::size_t ell = 0;
  enum class Mode { top_ell, beyond_ell, all } mode = Mode::all;
};

/// Sum of selected weights collected on the sites of delta.
double omega_energy(std::span<const Vec> delta, const EnergySpec& spec);

/// Exact maximizer of the objective over ordered subsets of (weights,
/// sites); the subset dynamic program over minimal tour lengths answers the
/// quadratic kind directly, and prunes the rate kind through
/// rate-entropy >= quadratic-entropy/d. N = 1 gives the continuum scaling.
VarProbSolution solve_points(std::span<const double> weights, std::span<const Vec> sites,
                             double N, double beta, int d, Kind kind,
                             Normalization norm = Normalization::beta_energy);

/// Annealing search for point families beyond the exact cap; the result is
/// feasible and labeled heuristic.
VarProbSolution solve_points_heuristic(std::span<const double> weights,
                                       std::span<const Vec> sites, double N, double beta, int d,
                                       Kind kind, Normalization norm, std::uint64_t seed);

/// Discrete problem restricted to the top-ell weights of the field.
VarProbSolution discrete_T(const env::OrderStatistics& stats, double N, double beta,
                           std::size_t ell, int d, Kind kind);

/// Same over the beyond-ell weight family.
VarProbSolution discrete_T_beyond(const env::OrderStatistics& stats, double N, double beta,
                                  std::size_t ell, int d, std::uint64_t heuristic_seed = 1);

/// Continuum problem on a sampled Poisson field: quadratic kind maximizes
/// beta*energy - Ent; rate kind uses the ballistic normalization
/// energy - hatEnt/beta with support confined to the unit ball.
VarProbSolution continuum_T_trunc(double q, double beta, std::size_t ell, double alpha, int d,
                                  std::uint64_t seed, Kind kind = Kind::quadratic);

/// Exact per-field critical coupling of the ballistic problem: the minimal
/// ratio hatEnt/energy over feasible ordered subsets. The problem value at
/// coupling beta is positive exactly when beta exceeds this ratio.
struct BetaCSample {
  double beta_c_exact = 0.0;  // +inf when no subset is reachable
  double beta_c_grid = 0.0;   // first activating grid point, +inf if none
  bool censored = false;      // no grid point activates
};

struct BetaCTable {
  std::vector<BetaCSample> samples;
  double fraction_at_or_below_min = 0.0;  // activation already at the grid minimum
  double fraction_censored = 0.0;
};

BetaCTable beta_c_estimate(double alpha, int d, double q, std::size_t ell,
                           std::span<const double> beta_grid, std::size_t samples,
                           std::uint64_t seed);

/// Tail experiment for the truncated discrete problem: empirical
/// P(T >= t N (beta r^{d/alpha-1})^2) on a t-grid against c t^{-alpha d /
/// (2(alpha+d))}.
struct TailRowT {
  double t = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  std::uint64_t hits = 0;
};

struct TailTableT {
  std::vector<TailRowT> rows;
  double c = 0.0;
  double slope = 0.0;  // log-log slope of the empirical tail
};

double calibrate_T_tail_constant(double alpha, int d, double r, double N, double beta,
                                 std::size_t ell, std::span<const double> t_grid,
                                 std::uint64_t replicas, std::uint64_t seed);

TailTableT tail_experiment_T(double alpha, int d, double r, double N, double beta,
                             std::size_t ell, std::span<const double> t_grid,
                             std::uint64_t replicas, std::uint64_t seed, double c);

/// Coupled scaling-relation samples: first entry solves at coupling beta,
/// second is beta^{2 alpha/(2 alpha - d)} times the coupling-1 solution of
/// the same field.
struct ScalingSamples {
  std::vector<double> at_beta;
  std::vector<double> scaled_from_one;
};
ScalingSamples scaling_relation_samples(double alpha, int d, std::size_t ell, double q,
                                        double beta, std::size_t n, std::uint64_t seed);

}  // namespace ndpoly::varprob

#endif  // NDPOLY_VARPROB_HPP
