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

#include "ndpoly/elpp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "ndpoly/subset_dp.hpp"

namespace ndpoly::elpp {

PointCloud sample_cloud_continuum(int d, double r, std::size_t m, std::uint64_t seed) {
  PointCloud c;
  c.dim = d;
  c.lattice = false;
  c.radius = r;
  rng::Stream rs(seed, "cloud.cont");
  c.points.reserve(m);
  for (std::size_t i = 0; i < m; ++i) c.points.push_back(uniform_in_ball(d, r, rs));
  return c;
}

PointCloud sample_cloud_lattice(int d, double r, std::size_t m, std::uint64_t seed) {
  const auto total = lattice_ball_count(d, r);
  if (static_cast<std::int64_t>(m) > total)
    throw std::invalid_argument("sample_cloud_lattice: more points than ball sites");
  PointCloud c;
  c.dim = d;
  c.lattice = true;
  c.radius = r;
  rng::Stream rs(seed, "cloud.lat");
  std::unordered_set<std::uint64_t, PackedSiteHash> used;
  const auto span = static_cast<std::int64_t>(std::floor(r));
  while (c.points.size() < m) {
    Site s(d);
    double n2 = 0.0;
    for (int i = 0; i < d; ++i) {
      s.c[i] = static_cast<std::int32_t>(
          static_cast<std::int64_t>(rs.next_below(2 * span + 1)) - span);
      n2 += static_cast<double>(s.c[i]) * s.c[i];
    }
    if (n2 > r * r) continue;
    if (!used.insert(pack_site(s)).second) continue;
    c.points.push_back(s.to_vec());
  }
  return c;
}

ElppResult elpp_exact(const PointCloud& cloud, double B) {
  const int m = static_cast<int>(cloud.points.size());
  if (m > SubsetPathDP::kMaxExactPoints)
    throw std::invalid_argument("elpp_exact: exact mode limited to 22 points");
  ElppResult res;
  if (m == 0 || B < 0.0) return res;
  const int d = cloud.dim;
  const double budget = std::sqrt(2.0 * B / d);
  SubsetPathDP dp;
  dp.build(cloud.points, budget * (1.0 + 2e-6));  // prune: only feasible states matter
  const std::uint32_t n_masks = std::uint32_t{1} << m;
  // collect candidates per cardinality; float round-off is settled by a
  // double recompute of the reconstructed order
  std::uint32_t best_mask = 0;
  int best_k = 0;
  double best_len = 0.0;
  const double slack = budget * (1.0 + 2e-6);
  for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
    const int k = std::popcount(mask);
    if (k < best_k) continue;
    const double len = dp.min_length(mask);
    if (len > slack) continue;
    if (k > best_k || len < best_len) {
      const auto order = dp.min_length_order(mask);
      entropy::OrderedPointSet pts;
      for (int idx : order) pts.push_back(cloud.points[idx]);
      const double e = entropy::ent(pts);
      if (e <= B * (1.0 + 1e-9)) {
        best_k = k;
        best_mask = mask;
        best_len = len;
        res.k_max = static_cast<std::size_t>(k);
        res.witness = std::move(pts);
        res.entropy_used = e;
      }
    }
  }
  (void)best_mask;
  return res;
}

ElppResult elpp_greedy(const PointCloud& cloud, double B) {
  ElppResult res;
  if (cloud.points.empty() || B < 0.0) return res;
  const int d = cloud.dim;
  const double budget = std::sqrt(2.0 * B / d);
  const int m = static_cast<int>(cloud.points.size());
  std::vector<bool> used(m, false);
  Vec cur(d);
  double len = 0.0;
  for (;;) {
    int best = -1;
    double best_step = 0.0;
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      const double step = dist(cloud.points[j], cur);
      if (len + step <= budget && (best < 0 || step < best_step)) {
        best = j;
        best_step = step;
      }
    }
    if (best < 0) break;
    used[best] = true;
    len += best_step;
    cur = cloud.points[best];
    res.witness.push_back(cur);
  }
  res.k_max = res.witness.size();
  res.entropy_used = entropy::ent(res.witness);
  return res;
}

namespace {

std::vector<std::uint64_t> tail_counts(std::size_t m, double r, double B, int d,
                                       std::span<const int> k_grid, std::uint64_t replicas,
                                       std::uint64_t seed, bool lattice) {
  std::vector<std::uint64_t> hits(k_grid.size(), 0);
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    const std::uint64_t s = rng::derive_key(seed, "elpp.tail", rep);
    const PointCloud cloud =
        lattice ? sample_cloud_lattice(d, r, m, s) : sample_cloud_continuum(d, r, m, s);
    const auto res = elpp_exact(cloud, B);
    for (std::size_t j = 0; j < k_grid.size(); ++j)
      if (res.k_max > static_cast<std::size_t>(k_grid[j])) ++hits[j];
  }
  return hits;
}

double envelope(double c_d, double B, std::size_t m, double r, int d, int k) {
  const double base = c_d * std::sqrt(B) * std::pow(static_cast<double>(m), 1.0 / d) /
                      (r * static_cast<double>(k));
  return std::pow(base, static_cast<double>(d) * k);
}

}  // namespace

double calibrate_tail_constant(std::size_t m, double r, double B, int d,
                               std::span<const int> k_grid, std::uint64_t replicas,
                               std::uint64_t seed, bool lattice) {
  const auto hits = tail_counts(m, r, B, d, k_grid, replicas, seed, lattice);
  double c = 0.0;
  for (std::size_t j = 0; j < k_grid.size(); ++j) {
    if (hits[j] == 0) continue;
    const double p = static_cast<double>(hits[j]) / static_cast<double>(replicas);
    // smallest c with (c sqrt(B) m^{1/d} / (r k))^{dk} = p
    const int k = k_grid[j];
    const double need = std::pow(p, 1.0 / (static_cast<double>(d) * k)) * r * k /
                        (std::sqrt(B) * std::pow(static_cast<double>(m), 1.0 / d));
    c = std::max(c, need);
  }
  return c * 1.10;  // margin against sampling noise on fresh seeds
}

TailTable elpp_tail_experiment(std::size_t m, double r, double B, int d,
                               std::span<const int> k_grid, std::uint64_t replicas,
                               std::uint64_t seed, double c_d, bool lattice) {
  TailTable table;
  table.c_d = c_d;
  table.lattice = lattice;
  const auto hits = tail_counts(m, r, B, d, k_grid, replicas, seed, lattice);
  for (std::size_t j = 0; j < k_grid.size(); ++j) {
    TailRow row;
    row.k = k_grid[j];
    row.hits = hits[j];
    row.empirical = static_cast<double>(hits[j]) / static_cast<double>(replicas);
    const auto iv = stats::wilson_interval(hits[j], replicas);
    row.wilson_lo = iv.lo;
    row.wilson_hi = iv.hi;
    row.bound = envelope(c_d, B, m, r, d, row.k);
    table.rows.push_back(row);
  }
  return table;
}

stats::MCEstimate entropy_ball_volume(int k, double B, int d, std::uint64_t replicas,
                                      std::uint64_t seed) {
  if (k < 1 || k > 6 || d > 4)
    throw std::invalid_argument("entropy_ball_volume: need k <= 6 and d <= 4");
  // tour length <= sqrt(2B/d) confines every point to that box
  const double L = std::sqrt(2.0 * B / d);
  const double box_vol = std::pow(2.0 * L, static_cast<double>(d) * k);
  rng::Stream rs(seed, "entvol");
  std::uint64_t inside = 0;
  entropy::OrderedPointSet pts(k, Vec(d));
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    for (int i = 0; i < k; ++i)
      for (int c = 0; c < d; ++c) pts[i].c[c] = L * (2.0 * rs.next_unit() - 1.0);
    if (entropy::ent(pts) <= B) ++inside;
  }
  const double p = static_cast<double>(inside) / static_cast<double>(replicas);
  stats::MCEstimate est;
  est.mean = p * box_vol;
  est.stderr_ = box_vol * std::sqrt(p * (1.0 - p) / static_cast<double>(replicas));
  est.replicas = replicas;
  est.seed = seed;
  est.zero_hits = inside == 0;
  return est;
}

double entropy_ball_volume_formula(int k, double B, int d) {
  const double ball = std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return std::pow(ball, k) * std::pow(std::tgamma(static_cast<double>(d)), k) /
         std::tgamma(static_cast<double>(d) * k + 1.0) *
         std::pow(B, 0.5 * static_cast<double>(d) * k);
}

}  // namespace ndpoly::elpp
