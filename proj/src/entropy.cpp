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

#include "ndpoly/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ndpoly/subset_dp.hpp"

namespace ndpoly::entropy {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double rate_J(double t) {
  t = std::fabs(t);
  if (t > 1.0) return kInf;
  if (t == 1.0) return std::log(2.0);
  if (t == 0.0) return 0.0;
  return 0.5 * (1.0 + t) * std::log1p(t) + 0.5 * (1.0 - t) * std::log1p(-t);
}

JdSolution rate_Jd_full(const Vec& x) {
  const int d = x.d;
  double c[kMaxDim];
  double l1 = 0.0;
  for (int i = 0; i < d; ++i) {
    c[i] = std::fabs(x.c[i]);
    l1 += c[i];
  }
  if (l1 > 1.0 + 1e-12) return {kInf, {}};

  JdSolution sol;
  sol.axis_share.resize(d);
  if (l1 >= 1.0) {
    // boundary: all time goes into displacement, u_i = |x_i|
    double v = 0.0;
    for (int i = 0; i < d; ++i) {
      c[i] /= l1;  // absorb round-off above 1
      sol.axis_share[i] = c[i];
      if (c[i] > 0.0) v += c[i] * (std::log(2.0) + std::log(d * c[i]));
    }
    sol.value = v;
    return sol;
  }
  // stationarity gives u_i = sqrt(c_i^2 + (s/d)^2); solve sum u_i = 1 in s
  double lo = 0.0, hi = static_cast<double>(d);
  for (int iter = 0; iter < 200 && hi - lo > 1e-16 * (1.0 + hi); ++iter) {
    const double s = 0.5 * (lo + hi);
    double tot = 0.0;
    for (int i = 0; i < d; ++i) tot += std::sqrt(c[i] * c[i] + (s / d) * (s / d));
    (tot < 1.0 ? lo : hi) = s;
  }
  const double s = 0.5 * (lo + hi);
  double v = 0.0;
  for (int i = 0; i < d; ++i) {
    const double u = std::sqrt(c[i] * c[i] + (s / d) * (s / d));
    sol.axis_share[i] = u;
    v += u * rate_J(c[i] / u) + u * std::log(d * u);
  }
  sol.value = std::max(0.0, v);  // clip the 1e-17 negatives at x = 0
  return sol;
}

double rate_Jd(const Vec& x) { return rate_Jd_full(x).value; }

double tour_length(std::span<const Vec> delta) {
  if (delta.empty()) return 0.0;
  double len = delta[0].norm();
  for (std::size_t i = 1; i < delta.size(); ++i) len += dist(delta[i], delta[i - 1]);
  return len;
}

double ent(std::span<const Vec> delta) {
  if (delta.empty()) return 0.0;
  const double len = tour_length(delta);
  return 0.5 * delta[0].d * len * len;
}

Allocation ent_N(std::span<const Vec> delta, double N) {
  if (N <= 0.0) throw std::invalid_argument("ent_N: N must be positive");
  Allocation a;
  if (delta.empty()) return a;
  const double len = tour_length(delta);
  a.value = ent(delta) / N;
  a.dt.resize(delta.size());
  Vec prev(delta[0].d);
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double leg = dist(delta[i], prev);
    a.dt[i] = len > 0.0 ? N * leg / len : N / static_cast<double>(delta.size());
    prev = delta[i];
  }
  return a;
}

namespace {

// leg time for marginal level S: the tau >= |z|_1 with
// sum_j sqrt(z_j^2 + (S tau / d)^2) = tau
double leg_time(const Vec& z, double S) {
  const int d = z.d;
  const double l1 = z.norm1();
  double lo = l1, hi = l1 / (1.0 - S) + 1e-12;
  for (int iter = 0; iter < 100 && hi - lo > 1e-15 * (1.0 + hi); ++iter) {
    const double tau = 0.5 * (lo + hi);
    double tot = 0.0;
    for (int j = 0; j < d; ++j) tot += std::sqrt(z.c[j] * z.c[j] + (S * tau / d) * (S * tau / d));
    (tot > tau ? lo : hi) = tau;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Allocation hat_ent_N(std::span<const Vec> delta, double N) {
  if (N <= 0.0) throw std::invalid_argument("hat_ent_N: N must be positive");
  Allocation a;
  if (delta.empty()) return a;
  const int d = delta[0].d;
  std::vector<Vec> legs(delta.size());
  double l1_total = 0.0;
  {
    Vec prev(d);
    for (std::size_t i = 0; i < delta.size(); ++i) {
      legs[i] = delta[i] - prev;
      l1_total += legs[i].norm1();
      prev = delta[i];
    }
  }
  if (l1_total > N) {
    a.value = kInf;
    return a;
  }
  a.dt.resize(delta.size());
  if (l1_total == N) {  // fully stretched: each leg at speed 1 in l1
    double v = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double li = legs[i].norm1();
      a.dt[i] = li;
      if (li > 0.0) v += li * rate_Jd((1.0 / li) * legs[i]);
    }
    a.value = v;
    return a;
  }
  // The total time N is always used up (every leg cost decreases in its
  // time). Legs share a common marginal level S in (0,1); each leg time is
  // a monotone root given S, and S itself is fixed by sum dt = N.
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 100 && hi - lo > 1e-15; ++iter) {
    const double S = 0.5 * (lo + hi);
    double tot = 0.0;
    for (const Vec& z : legs) {
      tot += leg_time(z, S);
      if (tot > N) break;
    }
    (tot < N ? lo : hi) = S;
  }
  const double S = 0.5 * (lo + hi);
  double tot = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    a.dt[i] = leg_time(legs[i], S);
    tot += a.dt[i];
  }
  // close the tiny residual so the returned allocation is feasible
  const double scale = N / tot;
  double v = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    a.dt[i] = std::max(a.dt[i] * scale, legs[i].norm1());
    v += a.dt[i] * rate_Jd((1.0 / a.dt[i]) * legs[i]);
  }
  a.value = v;
  return a;
}

Allocation hat_ent_ordered(std::span<const Vec> pts, std::span<const int> order, double N) {
  std::vector<Vec> delta;
  delta.reserve(order.size());
  for (int idx : order) delta.push_back(pts[idx]);
  return hat_ent_N(delta, N);
}

VisitOrder shortest_visit_length(std::span<const Vec> points, bool exact_mode) {
  VisitOrder out;
  const int m = static_cast<int>(points.size());
  if (m == 0) return out;
  if (exact_mode && m <= SubsetPathDP::kMaxExactPoints) {
    SubsetPathDP dp;
    dp.build(points);
    const std::uint32_t full = (m == 32) ? ~0u : ((std::uint32_t{1} << m) - 1);
    out.order = dp.min_length_order(full);
    std::vector<Vec> ordered;
    for (int i : out.order) ordered.push_back(points[i]);
    out.length = tour_length(ordered);
    out.exact = true;
    return out;
  }
  if (exact_mode)
    throw std::invalid_argument("shortest_visit_length: exact mode limited to 22 points");
  // nearest-neighbor greedy; optimality gap unverified
  std::vector<bool> used(m, false);
  Vec cur(points[0].d);
  out.exact = false;
  for (int step = 0; step < m; ++step) {
    int best = -1;
    double best_d = kInf;
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      const double dd = dist(points[j], cur);
      if (dd < best_d) {
        best_d = dd;
        best = j;
      }
    }
    used[best] = true;
    out.order.push_back(best);
    out.length += best_d;
    cur = points[best];
  }
  return out;
}

}  // namespace ndpoly::entropy
