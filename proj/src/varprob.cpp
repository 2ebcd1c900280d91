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

#include "ndpoly/varprob.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ndpoly/stats.hpp"
#include "ndpoly/subset_dp.hpp"

namespace ndpoly::varprob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kExactCap = 20;

double combine(Normalization norm, double beta, double energy, double entropy_val) {
  if (norm == Normalization::beta_energy) return beta * energy - entropy_val;
  return energy - entropy_val / beta;
}

// rate-kind entropy of a subset: tour-order proxy + pairwise-swap refinement
struct RateEntropy {
  double value = kInf;
  std::vector<int> order;
};

RateEntropy rate_entropy_for_mask(std::span<const Vec> sites, const SubsetPathDP& dp,
                                  std::uint32_t mask, double N) {
  RateEntropy out;
  std::vector<int> order = dp.min_length_order(mask);
  auto eval = [&](const std::vector<int>& ord) {
    return entropy::hat_ent_ordered(sites, ord, N).value;
  };
  double best = eval(order);
  if (order.size() > 1 && std::isfinite(best)) {
    bool improved = true;
    int rounds = 0;
    while (improved && rounds++ < 4) {
      improved = false;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
          std::swap(order[i], order[j]);
          const double v = eval(order);
          if (v < best - 1e-13) {
            best = v;
            improved = true;
          } else {
            std::swap(order[i], order[j]);
          }
        }
      }
    }
  }
  out.value = best;
  out.order = std::move(order);
  return out;
}

}  // namespace

double omega_energy(std::span<const Vec> delta, const EnergySpec& spec) {
  if (spec.stats == nullptr) throw std::invalid_argument("omega_energy: missing field");
  const auto& os = *spec.stats;
  std::size_t lo = 0, hi = os.size();
  if (spec.mode == EnergySpec::Mode::top_ell) hi = std::min(hi, spec.ell);
  if (spec.mode == EnergySpec::Mode::beyond_ell) lo = std::min(hi, spec.ell);
  double total = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    for (const Vec& x : delta) {
      if (x == os.site[i]) {
        total += os.weight[i];
        break;
      }
    }
  }
  return total;
}

VarProbSolution solve_points(std::span<const double> weights, std::span<const Vec> sites,
                             double N, double beta, int d, Kind kind, Normalization norm) {
  if (weights.size() != sites.size()) throw std::invalid_argument("solve_points: size mismatch");
  if (weights.size() > kExactCap)
    throw std::invalid_argument("solve_points: exact mode limited to 20 points");
  if (beta < 0.0) throw std::invalid_argument("solve_points: beta must be >= 0");
  VarProbSolution sol;
  sol.ell_used = weights.size();
  const int m = static_cast<int>(weights.size());
  if (m == 0 || beta == 0.0) return sol;

  SubsetPathDP dp;
  dp.build(sites);
  const std::uint32_t n_masks = std::uint32_t{1} << m;

  // subset weight sums by peeling the lowest bit
  std::vector<double> wsum(n_masks, 0.0);
  for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
    const int low = std::countr_zero(mask);
    wsum[mask] = wsum[mask & (mask - 1)] + weights[low];
  }

  if (kind == Kind::quadratic) {
    std::uint32_t best_mask = 0;
    double best = 0.0, best_ent = 0.0;
    for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
      const double len = dp.min_length(mask);
      if (!std::isfinite(len)) continue;
      const double e = 0.5 * d * len * len / N;
      const double v = combine(norm, beta, wsum[mask], e);
      if (v > best + 1e-15) {
        best = v;
        best_mask = mask;
        best_ent = e;
      }
    }
    if (best_mask != 0) {
      const auto order = dp.min_length_order(best_mask);
      for (int idx : order) sol.witness.push_back(sites[idx]);
      sol.energy = wsum[best_mask];
      // recompute the entropy along the reconstructed order in double
      sol.entropy = entropy::ent(sol.witness) / N;
      sol.value = combine(norm, beta, sol.energy, sol.entropy);
      if (sol.value < 0.0) {  // float/double disagreement at the margin
        sol = VarProbSolution{};
        sol.ell_used = weights.size();
      }
      (void)best_ent;
    }
    return sol;
  }

  // rate kind: process masks by an optimistic bound so that only a few
  // need the exact allocation solve; hatEnt >= Ent/d gives the bound
  std::vector<std::uint32_t> masks;
  std::vector<double> ub(n_masks, -kInf);
  masks.reserve(n_masks - 1);
  for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
    const double len = dp.min_length(mask);
    if (!std::isfinite(len)) continue;
    const double e_lb = 0.5 * len * len / N;  // Ent/(d) lower bound on hatEnt
    const double v = combine(norm, beta, wsum[mask], e_lb);
    if (v <= 0.0) continue;
    ub[mask] = v;
    masks.push_back(mask);
  }
  std::sort(masks.begin(), masks.end(),
            [&](std::uint32_t a, std::uint32_t b) { return ub[a] > ub[b]; });
  double best = 0.0;
  std::uint32_t best_mask = 0;
  RateEntropy best_re;
  for (std::uint32_t mask : masks) {
    if (ub[mask] <= best) break;
    const auto re = rate_entropy_for_mask(sites, dp, mask, N);
    if (!std::isfinite(re.value)) continue;
    const double v = combine(norm, beta, wsum[mask], re.value);
    if (v > best) {
      best = v;
      best_mask = mask;
      best_re = re;
    }
  }
  if (best_mask != 0) {
    sol.value = best;
    sol.energy = wsum[best_mask];
    sol.entropy = best_re.value;
    for (int idx : best_re.order) sol.witness.push_back(sites[idx]);
  }
  return sol;
}

VarProbSolution solve_points_heuristic(std::span<const double> weights,
                                       std::span<const Vec> sites, double N, double beta, int d,
                                       Kind kind, Normalization norm, std::uint64_t seed) {
  VarProbSolution sol;
  sol.heuristic = true;
  sol.ell_used = weights.size();
  const int m = static_cast<int>(weights.size());
  if (m == 0 || beta == 0.0) return sol;
  rng::Stream rs(seed, "varprob.sa");

  std::vector<int> current;  // ordered member indices
  auto evaluate = [&](const std::vector<int>& sel, double& energy, double& entv) {
    energy = 0.0;
    for (int i : sel) energy += weights[i];
    std::vector<Vec> pts;
    pts.reserve(sel.size());
    for (int i : sel) pts.push_back(sites[i]);
    if (kind == Kind::quadratic) {
      entv = entropy::ent(pts) / N;
    } else {
      entv = entropy::hat_ent_N(pts, N).value;
    }
    return std::isfinite(entv) ? combine(norm, beta, energy, entv) : -kInf;
  };
  double cur_energy = 0.0, cur_ent = 0.0;
  double cur_val = 0.0;
  double best_val = 0.0;
  std::vector<int> best_sel;
  double best_energy = 0.0, best_ent = 0.0;
  const int sweeps = 20000;
  for (int it = 0; it < sweeps; ++it) {
    const double temp = 0.5 * (1.0 - static_cast<double>(it) / sweeps) + 1e-3;
    std::vector<int> prop = current;
    const int move = static_cast<int>(rs.next_below(3));
    if (move == 0 && static_cast<int>(prop.size()) < m) {
      // insert a random absent point at a random position
      std::vector<int> absent;
      std::vector<bool> inside(m, false);
      for (int i : prop) inside[i] = true;
      for (int i = 0; i < m; ++i)
        if (!inside[i]) absent.push_back(i);
      const int pick = absent[rs.next_below(absent.size())];
      prop.insert(prop.begin() + rs.next_below(prop.size() + 1), pick);
    } else if (move == 1 && !prop.empty()) {
      prop.erase(prop.begin() + rs.next_below(prop.size()));
    } else if (move == 2 && prop.size() >= 2) {
      const std::size_t i = rs.next_below(prop.size());
      const std::size_t j = rs.next_below(prop.size());
      std::swap(prop[i], prop[j]);
    } else {
      continue;
    }
    double e = 0.0, s = 0.0;
    const double v = evaluate(prop, e, s);
    if (v >= cur_val || rs.next_unit() < std::exp((v - cur_val) / temp)) {
      current = std::move(prop);
      cur_val = v;
      cur_energy = e;
      cur_ent = s;
      if (cur_val > best_val) {
        best_val = cur_val;
        best_sel = current;
        best_energy = cur_energy;
        best_ent = cur_ent;
      }
    }
  }
  if (best_val > 0.0) {
    sol.value = best_val;
    sol.energy = best_energy;
    sol.entropy = best_ent;
    for (int i : best_sel) sol.witness.push_back(sites[i]);
  }
  return sol;
}

namespace {

VarProbSolution solve_window(const env::OrderStatistics& stats, std::size_t lo, std::size_t hi,
                             double N, double beta, int d, Kind kind, Normalization norm,
                             std::uint64_t heuristic_seed) {
  std::vector<double> w(stats.weight.begin() + lo, stats.weight.begin() + hi);
  std::vector<Vec> s(stats.site.begin() + lo, stats.site.begin() + hi);
  if (w.size() <= kExactCap) return solve_points(w, s, N, beta, d, kind, norm);
  return solve_points_heuristic(w, s, N, beta, d, kind, norm, heuristic_seed);
}

}  // namespace

VarProbSolution discrete_T(const env::OrderStatistics& stats, double N, double beta,
                           std::size_t ell, int d, Kind kind) {
  const std::size_t hi = std::min(ell, stats.size());
  auto sol = solve_window(stats, 0, hi, N, beta, d, kind, Normalization::beta_energy, 1);
  sol.ell_used = hi;
  return sol;
}

VarProbSolution discrete_T_beyond(const env::OrderStatistics& stats, double N, double beta,
                                  std::size_t ell, int d, std::uint64_t heuristic_seed) {
  const std::size_t lo = std::min(ell, stats.size());
  auto sol = solve_window(stats, lo, stats.size(), N, beta, d, Kind::quadratic,
                          Normalization::beta_energy, heuristic_seed);
  sol.ell_used = stats.size() - lo;
  return sol;
}

VarProbSolution continuum_T_trunc(double q, double beta, std::size_t ell, double alpha, int d,
                                  std::uint64_t seed, Kind kind) {
  if (ell > kExactCap) throw std::invalid_argument("continuum_T_trunc: ell capped at 20");
  const auto field = env::sample_poisson_field(q, alpha, ell, d, seed);
  if (kind == Kind::quadratic) {
    return solve_points(field.weight, field.site, 1.0, beta, d, Kind::quadratic,
                        Normalization::beta_energy);
  }
  // ballistic normalization: only points inside the unit l1-reach can ever
  // be collected
  std::vector<double> w;
  std::vector<Vec> s;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field.site[i].norm1() <= 1.0) {
      w.push_back(field.weight[i]);
      s.push_back(field.site[i]);
    }
  }
  auto sol = solve_points(w, s, 1.0, beta, d, Kind::rate, Normalization::energy_minus_over_beta);
  sol.ell_used = field.size();
  return sol;
}

BetaCTable beta_c_estimate(double alpha, int d, double q, std::size_t ell,
                           std::span<const double> beta_grid, std::size_t samples,
                           std::uint64_t seed) {
  if (beta_grid.empty()) throw std::invalid_argument("beta_c_estimate: empty grid");
  if (ell > kExactCap) throw std::invalid_argument("beta_c_estimate: ell capped at 20");
  std::vector<double> grid(beta_grid.begin(), beta_grid.end());
  std::sort(grid.begin(), grid.end());

  BetaCTable table;
  std::size_t at_min = 0, censored = 0;
  for (std::size_t fld = 0; fld < samples; ++fld) {
    const auto field =
        env::sample_poisson_field(q, alpha, ell, d, rng::derive_key(seed, "betac", fld));
    // reachable points only
    std::vector<double> w;
    std::vector<Vec> s;
    for (std::size_t i = 0; i < field.size(); ++i) {
      if (field.site[i].norm1() <= 1.0) {
        w.push_back(field.weight[i]);
        s.push_back(field.site[i]);
      }
    }
    // exact critical coupling: min over ordered subsets of hatEnt/energy;
    // the value at beta is positive iff beta > that ratio
    double ratio = kInf;
    const int m = static_cast<int>(w.size());
    if (m > 0) {
      SubsetPathDP dp;
      dp.build(s);
      const std::uint32_t n_masks = std::uint32_t{1} << m;
      std::vector<double> wsum(n_masks, 0.0);
      std::vector<std::uint32_t> masks;
      std::vector<double> lb(n_masks, kInf);
      for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
        const int low = std::countr_zero(mask);
        wsum[mask] = wsum[mask & (mask - 1)] + w[low];
        const double len = dp.min_length(mask);
        if (!std::isfinite(len)) continue;
        lb[mask] = 0.5 * len * len / wsum[mask];  // hatEnt/energy >= Ent/(d*energy)
        masks.push_back(mask);
      }
      std::sort(masks.begin(), masks.end(),
                [&](std::uint32_t a, std::uint32_t b) { return lb[a] < lb[b]; });
      for (std::uint32_t mask : masks) {
        if (lb[mask] >= ratio) break;
        const auto re = rate_entropy_for_mask(s, dp, mask, 1.0);
        if (!std::isfinite(re.value)) continue;
        ratio = std::min(ratio, re.value / wsum[mask]);
      }
    }
    BetaCSample row;
    row.beta_c_exact = ratio;
    row.beta_c_grid = kInf;
    for (double b : grid) {
      if (b > ratio) {
        row.beta_c_grid = b;
        break;
      }
    }
    row.censored = !std::isfinite(row.beta_c_grid);
    if (row.censored) ++censored;
    if (row.beta_c_grid <= grid.front()) ++at_min;
    table.samples.push_back(row);
  }
  table.fraction_at_or_below_min = static_cast<double>(at_min) / samples;
  table.fraction_censored = static_cast<double>(censored) / samples;
  return table;
}

namespace {

// one environment draw -> value of the truncated discrete problem
double sample_discrete_T_value(double alpha, int d, double r, double N, double beta,
                               std::size_t ell, const std::vector<Site>& ball,
                               std::uint64_t seed) {
  rng::Stream rs(seed, "tailT.env");
  const std::size_t n = ball.size();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i)
    vals[i] = rng::pareto_from_unit(alpha, rs.next_unit_pos());
  // indices of the ell largest values
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  const std::size_t take = std::min(ell, n);
  std::nth_element(idx.begin(), idx.begin() + take - 1, idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return vals[a] > vals[b]; });
  std::vector<double> w(take);
  std::vector<Vec> s(take);
  for (std::size_t i = 0; i < take; ++i) {
    w[i] = vals[idx[i]];
    s[i] = ball[idx[i]].to_vec();
  }
  const auto sol = solve_points(w, s, N, beta, d, Kind::quadratic);
  return sol.value;
}

std::vector<std::uint64_t> tail_T_counts(double alpha, int d, double r, double N, double beta,
                                         std::size_t ell, std::span<const double> t_grid,
                                         std::uint64_t replicas, std::uint64_t seed) {
  const auto ball = lattice_ball_sites(d, r);
  const double unit = N * std::pow(beta * std::pow(r, static_cast<double>(d) / alpha - 1.0), 2.0);
  std::vector<std::uint64_t> hits(t_grid.size(), 0);
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    const double v =
        sample_discrete_T_value(alpha, d, r, N, beta, ell, ball, rng::derive_key(seed, "tailT", rep));
    for (std::size_t j = 0; j < t_grid.size(); ++j)
      if (v >= t_grid[j] * unit) ++hits[j];
  }
  return hits;
}

}  // namespace

double calibrate_T_tail_constant(double alpha, int d, double r, double N, double beta,
                                 std::size_t ell, std::span<const double> t_grid,
                                 std::uint64_t replicas, std::uint64_t seed) {
  const auto hits = tail_T_counts(alpha, d, r, N, beta, ell, t_grid, replicas, seed);
  const double expo = alpha * d / (2.0 * (alpha + d));
  double c = 0.0;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    if (hits[j] == 0) continue;
    const double p = static_cast<double>(hits[j]) / static_cast<double>(replicas);
    c = std::max(c, p * std::pow(t_grid[j], expo));
  }
  return c * 1.15;  // margin against fresh-seed fluctuations
}

TailTableT tail_experiment_T(double alpha, int d, double r, double N, double beta,
                             std::size_t ell, std::span<const double> t_grid,
                             std::uint64_t replicas, std::uint64_t seed, double c) {
  TailTableT table;
  table.c = c;
  const auto hits = tail_T_counts(alpha, d, r, N, beta, ell, t_grid, replicas, seed);
  const double expo = alpha * d / (2.0 * (alpha + d));
  std::vector<double> log_t, log_p;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    TailRowT row;
    row.t = t_grid[j];
    row.hits = hits[j];
    row.empirical = static_cast<double>(hits[j]) / static_cast<double>(replicas);
    row.bound = c * std::pow(t_grid[j], -expo);
    table.rows.push_back(row);
    if (hits[j] > 0) {
      log_t.push_back(std::log(t_grid[j]));
      log_p.push_back(std::log(row.empirical));
    }
  }
  if (log_t.size() >= 2) table.slope = stats::fit_line(log_t, log_p).slope;
  return table;
}

ScalingSamples scaling_relation_samples(double alpha, int d, std::size_t ell, double q,
                                        double beta, std::size_t n, std::uint64_t seed) {
  ScalingSamples out;
  out.at_beta.reserve(n);
  out.scaled_from_one.reserve(n);
  const double expo = 2.0 * alpha / (2.0 * alpha - d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto field =
        env::sample_poisson_field(q, alpha, ell, d, rng::derive_key(seed, "scaling", i));
    const auto at_beta =
        solve_points(field.weight, field.site, 1.0, beta, d, Kind::quadratic);
    const auto at_one = solve_points(field.weight, field.site, 1.0, 1.0, d, Kind::quadratic);
    out.at_beta.push_back(at_beta.value);
    out.scaled_from_one.push_back(std::pow(beta, expo) * at_one.value);
  }
  return out;
}

}  // namespace ndpoly::varprob
