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

#include "ndpoly/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ndpoly/parallel.hpp"
#include "ndpoly/walk.hpp"

namespace ndpoly::polymer {

namespace {

void dfs_partition(const EnvView& e, int d, long long depth, long long N, double beta, double h,
                   Site& s, std::unordered_map<std::uint64_t, int, PackedSiteHash>& visits,
                   double energy, long double& acc) {
  if (depth == N) {
    acc += std::exp(static_cast<long double>(beta) * energy);
    return;
  }
  for (int dir = 0; dir < 2 * d; ++dir) {
    const int axis = dir >> 1;
    const std::int32_t delta = (dir & 1) ? 1 : -1;
    s.c[axis] += delta;
    const std::uint64_t key = pack_site(s);
    auto [it, fresh] = visits.try_emplace(key, 0);
    ++it->second;
    double add = 0.0;
    if (it->second == 1) add = e.value(s) - h;
    dfs_partition(e, d, depth + 1, N, beta, h, s, visits, energy + add, acc);
    if (--it->second == 0) visits.erase(it);
    s.c[axis] -= delta;
  }
}

bool passes(const ReplicaRecord& rec, const Restriction& r) {
  switch (r.type) {
    case Restriction::Type::none: return true;
    case Restriction::Type::max_le: return rec.max_disp <= r.a;
    case Restriction::Type::max_in: return rec.max_disp >= r.a && rec.max_disp < r.b;
  }
  return true;
}

}  // namespace

PartitionEstimate partition_exact(const EnvView& e, long long N, double beta, double h, int d) {
  double paths = 1.0;
  for (long long i = 0; i < N; ++i) {
    paths *= 2.0 * d;
    if (paths > 1e8) throw std::invalid_argument("partition_exact: more than 1e8 paths");
  }
  PartitionEstimate out;
  out.exact = true;
  out.N = N;
  out.beta = beta;
  out.h = h;
  Site s(d);
  std::unordered_map<std::uint64_t, int, PackedSiteHash> visits;
  visits.reserve(2 * N + 2);
  visits.emplace(pack_site(s), 1);
  long double acc = 0.0L;
  const double e0 = e.value(s) - h;  // origin always visited
  dfs_partition(e, d, 0, N, beta, h, s, visits, e0, acc);
  out.logZ = static_cast<double>(std::log(acc) - static_cast<long double>(N) * std::log(2.0L * d));
  return out;
}

std::vector<ReplicaRecord> mc_ensemble(const EnvView& e, long long N, double beta, double h,
                                       int d, std::uint64_t replicas, std::uint64_t seed) {
  std::vector<ReplicaRecord> out(replicas);
  parallel_chunks(replicas, [&](std::uint64_t begin, std::uint64_t end) {
    walk::RangeTracker tracker(d, N);
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      tracker.reset();
      rng::Stream rs(rng::derive_key(seed, "polymer.mc", rep));
      Site s(d);
      tracker.insert(s);
      double energy = e.value(s) - h;
      std::int32_t max_disp = 0;
      for (long long n = 0; n < N; ++n) {
        walk::step_site(s, d, rs);
        if (tracker.insert(s)) energy += e.value(s) - h;
        max_disp = std::max(max_disp, s.norm_inf());
      }
      out[rep].log_weight = beta * energy;
      out[rep].max_disp = max_disp;
      out[rep].range_size = static_cast<std::uint32_t>(tracker.size());
    }
  });
  return out;
}

PartitionEstimate reduce_partition(std::span<const ReplicaRecord> ensemble,
                                   const Restriction& r, long long N, double beta, double h,
                                   std::uint64_t seed) {
  PartitionEstimate out;
  out.N = N;
  out.beta = beta;
  out.h = h;
  out.replicas = ensemble.size();
  out.seed = seed;
  std::vector<double> lw;
  lw.reserve(ensemble.size());
  for (const auto& rec : ensemble) {
    if (passes(rec, r)) lw.push_back(rec.log_weight);
  }
  out.kept_replicas = lw.size();
  if (lw.empty()) {
    out.logZ = -std::numeric_limits<double>::infinity();
    return out;
  }
  // Z estimate = (1/R) sum over kept replicas of e^{lw}; excluded replicas
  // contribute zero weight
  const double lse = stats::log_sum_exp(lw);
  out.logZ = lse - std::log(static_cast<double>(ensemble.size()));
  // shifted weights for the dispersion diagnostics
  const double shift = *std::max_element(lw.begin(), lw.end());
  std::vector<double> w(ensemble.size(), 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    if (passes(ensemble[i], r)) w[i] = std::exp(lw[j++] - shift);
  }
  const double mean_w = std::exp(lse - shift) / static_cast<double>(ensemble.size());
  const double se = stats::batch_means_stderr(w);
  out.rel_stderr = mean_w > 0.0 ? se / mean_w : 0.0;
  out.ess = stats::effective_sample_size(w);
  out.top_weight_share = stats::top_weight_share(w);
  out.heavy_tail_warning = out.top_weight_share > 0.5;
  return out;
}

PartitionEstimate partition_mc(const EnvView& e, long long N, double beta, double h, int d,
                               std::uint64_t replicas, std::uint64_t seed,
                               const Restriction& r) {
  if (replicas < 1000) throw std::invalid_argument("partition_mc: need at least 1e3 replicas");
  const auto ensemble = mc_ensemble(e, N, beta, h, d, replicas, seed);
  return reduce_partition(ensemble, r, N, beta, h, seed);
}

RegionStatistic region_A_statistic(const model::ModelParams& p, long long N, const EnvView& e,
                                   std::uint64_t replicas, std::uint64_t seed) {
  const auto region = model::classify_regime(p);
  if (region != model::Region::A && region != model::Region::boundary_AB)
    throw std::invalid_argument("region_A_statistic: parameters must sit in region A");
  const double beta_N = model::coupling(p, N);
  RegionStatistic rs;
  rs.partition = partition_mc(e, N, beta_N, 0.0, p.d, replicas, seed);
  rs.normalization = beta_N * std::pow(static_cast<double>(N), p.d / p.alpha);
  rs.value = rs.partition.logZ / rs.normalization;
  rs.h_correction =
      std::fabs(p.h) * std::pow(static_cast<double>(N), -(p.d - p.alpha) / p.alpha);
  return rs;
}

RegionStatistic region_B_statistic(const model::ModelParams& p, long long N, const EnvView& e,
                                   std::uint64_t replicas, std::uint64_t seed) {
  if (model::classify_regime(p) != model::Region::B)
    throw std::invalid_argument("region_B_statistic: parameters must sit in region B");
  if (!p.mu.has_value())
    throw std::invalid_argument("region_B_statistic: mu required (alpha > 1)");
  const double beta_N = model::coupling(p, N);
  const double xi = model::wandering_exponent(p);
  RegionStatistic rs;
  rs.partition = partition_mc(e, N, beta_N, *p.mu, p.d, replicas, seed);
  rs.normalization = std::pow(static_cast<double>(N), 2.0 * xi - 1.0);
  rs.value = rs.partition.logZ / rs.normalization;
  return rs;
}

stats::MCEstimate mean_range_size(int d, long long N, std::uint64_t replicas,
                                  std::uint64_t seed) {
  std::vector<double> sizes(replicas);
  parallel_chunks(replicas, [&](std::uint64_t begin, std::uint64_t end) {
    walk::RangeTracker tracker(d, N);
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      tracker.reset();
      rng::Stream rs(rng::derive_key(seed, "meanrange", rep));
      Site s(d);
      tracker.insert(s);
      for (long long n = 0; n < N; ++n) {
        walk::step_site(s, d, rs);
        tracker.insert(s);
      }
      sizes[rep] = static_cast<double>(tracker.size());
    }
  });
  return stats::mc_mean(sizes, seed);
}

RegionStatistic region_C_statistic(const model::ModelParams& p, long long N, const EnvView& e,
                                   std::uint64_t replicas, std::uint64_t seed,
                                   RegionCVariant variant) {
  const auto region = model::classify_regime(p);
  if (region != model::Region::C && region != model::Region::boundary_BC)
    throw std::invalid_argument("region_C_statistic: parameters must sit in region C");
  const double beta_N = model::coupling(p, N);
  const double dd = static_cast<double>(p.d);
  RegionStatistic rs;
  switch (variant) {
    case RegionCVariant::gaussian: {
      if (!(p.alpha > std::max(2.0, dd / 2.0)) || (p.d != 3 && p.d != 4))
        throw std::invalid_argument(
            "region_C_statistic(gaussian): needs alpha > max(2, d/2) and d in {3,4}");
      if (!p.mu.has_value()) throw std::invalid_argument("region_C_statistic: mu required");
      rs.partition = partition_mc(e, N, beta_N, *p.mu, p.d, replicas, seed);
      const double a_N = p.d == 3 ? std::pow(static_cast<double>(N), 0.25)
                                  : std::sqrt(std::log(static_cast<double>(N)));
      const auto mean_range =
          mean_range_size(p.d, N, std::max<std::uint64_t>(2000, replicas / 4),
                          rng::derive_key(seed, "regC.range"));
      const double var_w = env::pareto_variance(p.alpha);
      rs.centering = 0.5 * var_w * beta_N * beta_N * mean_range.mean;
      rs.centering_stderr = 0.5 * var_w * beta_N * beta_N * mean_range.stderr_;
      rs.normalization = a_N * beta_N;
      rs.value = (rs.partition.logZ - rs.centering) / rs.normalization;
      return rs;
    }
    case RegionCVariant::chi: {
      if (p.d < 5 || !(p.alpha > dd / (dd - 2.0)))
        throw std::invalid_argument(
            "region_C_statistic(chi): needs d >= 5 and alpha > d/(d-2)");
      if (!p.mu.has_value()) throw std::invalid_argument("region_C_statistic: mu required");
      rs.partition = partition_mc(e, N, beta_N, *p.mu, p.d, replicas, seed);
      rs.normalization = beta_N;
      rs.value = rs.partition.logZ / rs.normalization;
      return rs;
    }
    case RegionCVariant::w: {
      const bool window_c1 = p.alpha > dd / 2.0 && p.alpha < 2.0 && (p.d == 2 || p.d == 3);
      const bool window_c2 =
          p.alpha < std::min(dd / 2.0, dd / (dd - 2.0)) && p.alpha != 1.0;
      if (!window_c1 && !window_c2)
        throw std::invalid_argument(
            "region_C_statistic(w): alpha outside both admissible windows");
      const double h = p.alpha > 1.0 ? p.mu.value_or(env::pareto_mean(p.alpha)) : p.h;
      rs.partition = partition_mc(e, N, beta_N, h, p.d, replicas, seed);
      const double v_N = p.d == 2 ? std::log(static_cast<double>(N))
                                  : std::pow(static_cast<double>(N), dd / 2.0 - 1.0);
      rs.normalization = beta_N * std::pow(static_cast<double>(N), dd / (2.0 * p.alpha)) / v_N;
      rs.value = rs.partition.logZ / rs.normalization;
      return rs;
    }
  }
  throw std::logic_error("region_C_statistic: unreachable");
}

FluctuationRecord fluctuation_exponent(const model::ModelParams& p,
                                       std::span<const long long> N_grid, int environments,
                                       std::uint64_t replicas, double quantile_band,
                                       std::uint64_t seed) {
  if (N_grid.size() < 4)
    throw std::invalid_argument("fluctuation_exponent: need at least 4 grid points");
  for (std::size_t i = 1; i < N_grid.size(); ++i) {
    if (N_grid[i] != 2 * N_grid[i - 1])
      throw std::invalid_argument("fluctuation_exponent: expected an N-doubling grid");
  }
  const auto region = model::classify_regime(p);
  const double h = (region == model::Region::B || region == model::Region::C ||
                    region == model::Region::boundary_BC) &&
                           p.alpha > 1.0
                       ? p.mu.value_or(env::pareto_mean(p.alpha))
                       : p.h;

  FluctuationRecord rec;
  rec.n_grid.assign(N_grid.begin(), N_grid.end());
  const std::size_t n_pts = N_grid.size();
  // per (env, N): replica max displacements and Gibbs weights
  std::vector<std::vector<double>> m_disp(environments * n_pts);
  std::vector<std::vector<double>> weights(environments * n_pts);
  rec.min_ess.assign(n_pts, std::numeric_limits<double>::infinity());

  for (int ev = 0; ev < environments; ++ev) {
    const auto lattice = env::LatticeEnvironment::lazy(
        p.d, static_cast<double>(N_grid.back()), p.alpha, rng::derive_key(seed, "fluct.env", ev));
    const auto view = EnvView::of(lattice);
    for (std::size_t j = 0; j < n_pts; ++j) {
      const long long N = N_grid[j];
      const double beta_N = model::coupling(p, N);
      const auto ens = mc_ensemble(view, N, beta_N, h, p.d, replicas,
                                   rng::derive_key(seed, "fluct.mc", ev * 131 + j));
      auto& md = m_disp[ev * n_pts + j];
      auto& wt = weights[ev * n_pts + j];
      md.resize(ens.size());
      wt.resize(ens.size());
      double shift = -std::numeric_limits<double>::infinity();
      for (const auto& r : ens) shift = std::max(shift, r.log_weight);
      for (std::size_t i = 0; i < ens.size(); ++i) {
        md[i] = ens[i].max_disp;
        wt[i] = std::exp(ens[i].log_weight - shift);
      }
      const double ess = stats::effective_sample_size(wt);
      rec.min_ess[j] = std::min(rec.min_ess[j], ess);
      if (ess < 100.0) rec.low_ess_flag = true;
    }
  }

  const auto median_of_env_medians = [&](const std::vector<int>& env_ids, double q,
                                         std::vector<double>& out_per_n) {
    out_per_n.assign(n_pts, 0.0);
    for (std::size_t j = 0; j < n_pts; ++j) {
      std::vector<double> med;
      med.reserve(env_ids.size());
      for (int ev : env_ids)
        med.push_back(stats::weighted_quantile(m_disp[ev * n_pts + j], weights[ev * n_pts + j], q));
      std::sort(med.begin(), med.end());
      out_per_n[j] = med[med.size() / 2];
    }
  };

  std::vector<int> all_envs(environments);
  for (int ev = 0; ev < environments; ++ev) all_envs[ev] = ev;
  median_of_env_medians(all_envs, 0.5, rec.median_m);
  median_of_env_medians(all_envs, 0.5 - 0.5 * quantile_band, rec.band_lo);
  median_of_env_medians(all_envs, 0.5 + 0.5 * quantile_band, rec.band_hi);

  std::vector<double> lx(n_pts), ly(n_pts);
  for (std::size_t j = 0; j < n_pts; ++j) {
    lx[j] = std::log(static_cast<double>(N_grid[j]));
    ly[j] = std::log(std::max(1.0, rec.median_m[j]));
  }
  rec.slope = stats::fit_line(lx, ly).slope;

  // bootstrap: resample environments with replacement and jitter the
  // weighted medians by replica resampling
  rng::Stream boot(seed, "fluct.boot");
  std::vector<double> slopes;
  const int B = 200;
  for (int b = 0; b < B; ++b) {
    std::vector<int> env_ids(environments);
    for (int i = 0; i < environments; ++i)
      env_ids[i] = static_cast<int>(boot.next_below(environments));
    std::vector<double> med(n_pts);
    for (std::size_t j = 0; j < n_pts; ++j) {
      std::vector<double> env_med;
      for (int ev : env_ids) {
        const auto& md = m_disp[ev * n_pts + j];
        const auto& wt = weights[ev * n_pts + j];
        // replica bootstrap
        std::vector<double> bm(md.size()), bw(md.size());
        for (std::size_t i = 0; i < md.size(); ++i) {
          const std::size_t k = boot.next_below(md.size());
          bm[i] = md[k];
          bw[i] = wt[k];
        }
        env_med.push_back(stats::weighted_quantile(std::move(bm), std::move(bw), 0.5));
      }
      std::sort(env_med.begin(), env_med.end());
      med[j] = std::log(std::max(1.0, env_med[env_med.size() / 2]));
    }
    slopes.push_back(stats::fit_line(lx, med).slope);
  }
  std::sort(slopes.begin(), slopes.end());
  rec.slope_ci_lo = slopes[static_cast<std::size_t>(0.025 * B)];
  rec.slope_ci_hi = slopes[static_cast<std::size_t>(0.975 * B) - 1];
  return rec;
}

}  // namespace ndpoly::polymer
