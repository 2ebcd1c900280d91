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

#include "ndpoly/geom.hpp"

#include <cmath>
#include <stdexcept>

namespace ndpoly {

namespace {

std::int64_t count_rec(int d, double r2) {
  if (r2 < 0) return 0;
  const auto span = static_cast<std::int64_t>(std::floor(std::sqrt(r2)));
  if (d == 1) return 2 * span + 1;
  std::int64_t total = 0;
  for (std::int64_t x = -span; x <= span; ++x) {
    total += count_rec(d - 1, r2 - static_cast<double>(x) * x);
  }
  return total;
}

void sites_rec(int d, int level, double r2, Site& cur, std::vector<Site>& out) {
  if (level == d) {
    out.push_back(cur);
    return;
  }
  const auto span = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(0.0, r2))));
  for (std::int64_t x = -span; x <= span; ++x) {
    cur.c[level] = static_cast<std::int32_t>(x);
    sites_rec(d, level + 1, r2 - static_cast<double>(x) * x, cur, out);
  }
  cur.c[level] = 0;
}

}  // namespace

std::int64_t lattice_ball_count(int d, double r) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("lattice_ball_count: bad dimension");
  if (r < 0) return 0;
  if (d >= 4 && r > 512.0) {
    // continuum volume; relative error O(1/r) is far below anything we
    // compare counts against at these radii
    return static_cast<std::int64_t>(std::llround(unit_ball_volume(d) * std::pow(r, d)));
  }
  return count_rec(d, r * r);
}

std::vector<Site> lattice_ball_sites(int d, double r) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("lattice_ball_sites: bad dimension");
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(1, lattice_ball_count(d, r))));
  Site cur(d);
  sites_rec(d, 0, r * r, cur, out);
  return out;
}

namespace {

void visit_rec(int d, int level, double r2, Site& cur,
               const std::function<void(const Site&)>& fn) {
  if (level == d) {
    fn(cur);
    return;
  }
  const auto span = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(0.0, r2))));
  for (std::int64_t x = -span; x <= span; ++x) {
    cur.c[level] = static_cast<std::int32_t>(x);
    visit_rec(d, level + 1, r2 - static_cast<double>(x) * x, cur, fn);
  }
  cur.c[level] = 0;
}

}  // namespace

void for_each_ball_site(int d, double r, const std::function<void(const Site&)>& fn) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("for_each_ball_site: bad dimension");
  if (r < 0) return;
  Site cur(d);
  visit_rec(d, 0, r * r, cur, fn);
}

Vec uniform_in_ball(int d, double r, rng::Stream& rs) {
  Vec v(d);
  double n2 = 0;
  do {
    n2 = 0;
    for (int i = 0; i < d; ++i) {
      v.c[i] = rs.next_gauss();
      n2 += v.c[i] * v.c[i];
    }
  } while (n2 == 0.0);
  const double radius = r * std::pow(rs.next_unit_pos(), 1.0 / d);
  const double scale = radius / std::sqrt(n2);
  for (int i = 0; i < d; ++i) v.c[i] *= scale;
  return v;
}

Site nearest_site(const Vec& x) {
  Site s(x.d);
  for (int i = 0; i < x.d; ++i) s.c[i] = static_cast<std::int32_t>(std::llround(x.c[i]));
  return s;
}

Site nearest_site_with_parity(const Vec& x, long long n) {
  Site s = nearest_site(x);
  long long sum = 0;
  for (int i = 0; i < s.d; ++i) sum += s.c[i];
  if (((sum ^ n) & 1LL) == 0) return s;
  // flip the coordinate with the cheapest adjustment
  int best = 0;
  double best_cost = 1e300;
  std::int32_t best_delta = 1;
  for (int i = 0; i < s.d; ++i) {
    for (std::int32_t delta : {std::int32_t{1}, std::int32_t{-1}}) {
      const double moved = s.c[i] + delta;
      const double cost = std::fabs(moved - x.c[i]) - std::fabs(s.c[i] - x.c[i]);
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
        best_delta = delta;
      }
    }
  }
  s.c[best] += best_delta;
  return s;
}

}  // namespace ndpoly
