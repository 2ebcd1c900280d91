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

#include "ndpoly/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "ndpoly/quadrature.hpp"

namespace ndpoly::walk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// cumulative log-factorial table
const std::vector<double>& log_factorials(long long n) {
  static std::mutex mu;
  static std::vector<double> table{0.0, 0.0};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<long long>(table.size()) <= n) {
    table.push_back(table.back() + std::log(static_cast<double>(table.size())));
  }
  return table;
}

double log_binom(const std::vector<double>& lf, long long n, long long k) {
  if (k < 0 || k > n) return -kInf;
  return lf[n] - lf[k] - lf[n - k];
}

}  // namespace

WalkPath simulate_walk(long long N, int d, std::uint64_t seed) {
  if (N < 0) throw std::invalid_argument("simulate_walk: N must be >= 0");
  WalkPath p;
  p.dim = d;
  p.steps.reserve(N + 1);
  Site s(d);
  p.steps.push_back(s);
  rng::Stream rs(seed, "walk");
  for (long long n = 0; n < N; ++n) {
    step_site(s, d, rs);
    p.steps.push_back(s);
  }
  return p;
}

RangeSummary range_summary(const WalkPath& path) {
  RangeSummary rs;
  RangeTracker tracker(path.dim, static_cast<long long>(path.steps.size()));
  for (const Site& s : path.steps) {
    if (tracker.insert(s)) rs.range.push_back(s);
    rs.max_disp = std::max(rs.max_disp, s.norm_inf());
  }
  rs.size = rs.range.size();
  return rs;
}

RangeTracker::RangeTracker(int d, long long max_steps) {
  if (max_steps > site_pack_span(d))
    throw std::invalid_argument("RangeTracker: walk too long for packed sites in this dimension");
  set_.reserve(static_cast<std::size_t>(std::min<long long>(max_steps + 1, 1 << 16)));
}

stats::MCEstimate visit_probability_mc(std::span<const Site> delta, long long N, int d,
                                       std::uint64_t replicas, std::uint64_t seed) {
  const long long grid[1] = {N};
  return visit_probability_sweep(delta, grid, d, replicas, seed)[0];
}

std::vector<stats::MCEstimate> visit_probability_sweep(std::span<const Site> delta,
                                                       std::span<const long long> N_grid, int d,
                                                       std::uint64_t replicas, std::uint64_t seed) {
  if (delta.empty()) throw std::invalid_argument("visit_probability: empty target tuple");
  for (std::size_t i = 0; i < delta.size(); ++i) {
    Site zero(d);
    if (delta[i] == zero) throw std::invalid_argument("visit_probability: points must be nonzero");
    for (std::size_t j = i + 1; j < delta.size(); ++j)
      if (delta[i] == delta[j])
        throw std::invalid_argument("visit_probability: points must be distinct");
  }
  const long long n_max = *std::max_element(N_grid.begin(), N_grid.end());
  std::vector<std::uint64_t> hits(N_grid.size(), 0);
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    rng::Stream rs(rng::derive_key(seed, "visit", rep));
    Site s(d);
    std::size_t progress = 0;
    long long done_at = -1;
    for (long long n = 1; n <= n_max; ++n) {
      step_site(s, d, rs);
      if (s == delta[progress]) {
        ++progress;
        if (progress == delta.size()) {
          done_at = n;
          break;
        }
      }
    }
    if (done_at >= 0) {
      for (std::size_t j = 0; j < N_grid.size(); ++j)
        if (done_at <= N_grid[j]) ++hits[j];
    }
  }
  std::vector<stats::MCEstimate> out(N_grid.size());
  for (std::size_t j = 0; j < N_grid.size(); ++j) {
    const double p = static_cast<double>(hits[j]) / static_cast<double>(replicas);
    out[j].mean = p;
    out[j].stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(replicas));
    out[j].replicas = replicas;
    out[j].seed = seed;
    out[j].zero_hits = hits[j] == 0;
  }
  return out;
}

double exact_endpoint_probability(const Site& s, long long N) {
  const int d = s.d;
  if (d != 2 && d != 3)
    throw std::invalid_argument("exact_endpoint_probability: d = 2 or 3 only");
  long long parity = N;
  for (int i = 0; i < d; ++i) parity += s.c[i];
  if (parity % 2 != 0) return 0.0;
  const auto& lf = log_factorials(N);
  const double logd = std::log(static_cast<double>(d));
  // split steps across axes; per axis a +-1 walk must land on s.c[i]
  double best = -kInf;
  std::vector<double> terms;
  const auto axis_term = [&](long long n, long long x) {
    // n steps of a 1-d walk landing at x: C(n, (n+x)/2) 2^{-n}
    if (std::llabs(x) > n || ((n + x) & 1LL)) return -kInf;
    return log_binom(lf, n, (n + x) / 2) - static_cast<double>(n) * std::log(2.0);
  };
  if (d == 2) {
    for (long long n1 = std::llabs(s.c[0]); n1 <= N - std::llabs(s.c[1]); ++n1) {
      const long long n2 = N - n1;
      const double t = log_binom(lf, N, n1) - N * logd + axis_term(n1, s.c[0]) +
                       axis_term(n2, s.c[1]);
      if (t > -kInf) {
        terms.push_back(t);
        best = std::max(best, t);
      }
    }
  } else {
    for (long long n1 = std::llabs(s.c[0]); n1 <= N; ++n1) {
      const double t1 = axis_term(n1, s.c[0]);
      if (t1 == -kInf) continue;
      for (long long n2 = std::llabs(s.c[1]); n2 <= N - n1; ++n2) {
        const long long n3 = N - n1 - n2;
        const double t = lf[N] - lf[n1] - lf[n2] - lf[n3] - N * logd + t1 +
                         axis_term(n2, s.c[1]) + axis_term(n3, s.c[2]);
        if (t > -kInf) {
          terms.push_back(t);
          best = std::max(best, t);
        }
      }
    }
  }
  if (terms.empty()) return 0.0;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return std::exp(best) * acc;
}

double exact_mean_visits(const Site& s, long long N) {
  double total = 0.0;
  for (long long n = 1; n <= N; ++n) total += exact_endpoint_probability(s, n);
  return total;
}

std::vector<RatePoint> ld_rate_check(const Vec& x, double xi, std::span<const long long> N_grid) {
  if (!(xi > 0.5 && xi <= 1.0)) throw std::invalid_argument("ld_rate_check: xi must be in (1/2, 1]");
  if (xi == 1.0 && x.norm1() >= 1.0)
    throw std::invalid_argument("ld_rate_check: need |x|_1 < 1 at xi = 1");
  std::vector<RatePoint> out;
  for (long long N : N_grid) {
    const Vec target = std::pow(static_cast<double>(N), xi) * x;
    const Site site = nearest_site_with_parity(target, 0);  // mean visits mixes both parities
    double u = 0.0;
    if (x.norm2() == 0.0) {
      out.push_back({N, 0.0});
      continue;
    }
    u = exact_mean_visits(site, N);
    const double rate = -std::log(u) / std::pow(static_cast<double>(N), 2.0 * xi - 1.0);
    out.push_back({N, rate});
  }
  return out;
}

namespace {

// ---- Green function machinery (d >= 3) ----

// product of scaled Bessel factors prod_i e^{-z} I_{|x_i|}(z) at z = t/d
struct GreenIntegrand {
  int d;
  std::array<int, kMaxDim> order;
  int n_max;
  mutable std::vector<double> buf;

  double miller(double t) const {
    quad::bessel_ive_all(t / d, n_max, buf);
    double p = 1.0;
    for (int i = 0; i < d; ++i) p *= buf[order[i]];
    return p;
  }

  // per-factor asymptotic series, valid for z well above order^2
  double asymptotic(double t) const {
    const double z = t / d;
    double p = 1.0;
    for (int i = 0; i < d; ++i) {
      const double mu = 4.0 * order[i] * order[i];
      const double i8z = 1.0 / (8.0 * z);
      const double c1 = (mu - 1.0) * i8z;
      const double c2 = (mu - 1.0) * (mu - 9.0) * i8z * i8z / 2.0;
      const double c3 = (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * i8z * i8z * i8z / 6.0;
      p *= (1.0 - c1 + c2 - c3) / std::sqrt(2.0 * M_PI * z);
    }
    return p;
  }
};

}  // namespace

double green_function(const Site& x) {
  const int d = x.d;
  if (d < 3) throw std::invalid_argument("green_function: transient dimensions d >= 3 only");
  GreenIntegrand g;
  g.d = d;
  g.n_max = 0;
  for (int i = 0; i < d; ++i) {
    g.order[i] = std::abs(x.c[i]);
    g.n_max = std::max(g.n_max, g.order[i]);
  }
  if (g.n_max > 64) throw std::invalid_argument("green_function: |x|_inf capped at 64");
  const double z1 = std::max(400.0, 15.0 * g.n_max * g.n_max);
  const double T1 = d * z1;
  const double T2 = std::max(2.0e5, 10.0 * T1);
  const auto r1 = quad::adaptive_simpson([&](double t) { return g.miller(t); }, 0.0, T1,
                                         1e-11, 44);
  const auto r2 = quad::adaptive_simpson([&](double t) { return g.asymptotic(t); }, T1, T2,
                                         1e-11, 44);
  // analytic tail: (d/2pi)^{d/2} int_T2^inf t^{-d/2} (1 - C1/t) dt
  double c1_sum = 0.0;
  for (int i = 0; i < d; ++i) c1_sum += (4.0 * g.order[i] * g.order[i] - 1.0) / 8.0;
  const double C1 = d * c1_sum;
  const double e = 0.5 * d;
  const double lead = std::pow(d / (2.0 * M_PI), e);
  const double tail = lead * (std::pow(T2, 1.0 - e) / (e - 1.0) - C1 * std::pow(T2, -e) / e);
  return r1.value + r2.value + tail;
}

namespace {

double green_zero_cached(int d) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  const double v = green_function(Site(d));
  cache.emplace(d, v);
  return v;
}

}  // namespace

double escape_probability(int d) {
  if (d < 3) throw std::invalid_argument("escape_probability: recurrent for d = 2");
  return 1.0 / green_zero_cached(d);
}

EscapeMc escape_probability_mc(int d, long long N, std::uint64_t replicas, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("escape_probability_mc: recurrent for d = 2");
  const long long n_half = N / 4;
  std::uint64_t alive_half = 0, alive_full = 0;
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    rng::Stream rs(rng::derive_key(seed, "escape", rep));
    Site s(d);
    bool returned = false;
    long long return_at = N + 1;
    for (long long n = 1; n <= N; ++n) {
      step_site(s, d, rs);
      if (s.norm2() == 0) {
        returned = true;
        return_at = n;
        break;
      }
    }
    if (!returned || return_at > n_half) ++alive_half;
    if (!returned) ++alive_full;
  }
  EscapeMc out;
  out.replicas = replicas;
  const double n = static_cast<double>(replicas);
  const double p_full = alive_full / n;
  const double p_half = alive_half / n;
  out.survival_at_N = p_full;
  // survival(N) ~ lambda + a N^{-1/2}: the pair (N/4, N) kills the leading bias
  out.corrected = 2.0 * p_full - p_half;
  // var(2 X_full - X_half) with X_full <= X_half pathwise
  const double var = 4.0 * p_full * (1 - p_full) + p_half * (1 - p_half) -
                     4.0 * (p_full - p_full * p_half);
  out.stderr_ = std::sqrt(std::max(0.0, var) / n);
  return out;
}

double hitting_probability_inf(const Site& x, int d) {
  if (d < 3) throw std::invalid_argument("hitting_probability_inf: d >= 3 only");
  if (x.norm2() == 0) return 1.0;
  return green_function(x) / green_zero_cached(d);
}

double f_profile(const Vec& x, int d) {
  if (x.norm2() == 0.0) throw std::invalid_argument("f_profile: singular at x = 0");
  if (d == 2) {
    // int_z^inf u^{-1} e^{-u} du with z = |x|^2/2, via u = z e^v
    const double z = 0.5 * x.norm2();
    const double vmax = std::log((z + 60.0) / z);
    const auto r = quad::adaptive_simpson([&](double v) { return std::exp(-z * std::exp(v)); },
                                          0.0, vmax, 1e-12 * (1.0 + vmax), 48);
    return r.value;
  }
  const double lam = escape_probability(d);
  const double n2 = x.norm2();
  const auto rho = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double expo = -0.5 * d * n2 / u;
    if (expo < -700.0) return 0.0;
    return std::pow(2.0 * M_PI * u / d, -0.5 * d) * std::exp(expo);
  };
  const auto r = quad::adaptive_simpson(rho, 0.0, 1.0, 1e-10, 48);
  return 2.0 * lam * r.value;
}

std::vector<LocalLimitRow> local_limit_check(const Vec& x, int d,
                                             std::span<const long long> N_grid,
                                             std::uint64_t replicas, std::uint64_t seed) {
  if (x.norm2() == 0.0) throw std::invalid_argument("local_limit_check: x must be nonzero");
  const double f = f_profile(x, d);
  std::vector<LocalLimitRow> rows;
  for (long long N : N_grid) {
    const Vec target = std::sqrt(static_cast<double>(N)) * x;
    // any visit time in [1, N] works; pick the walk-parity representative
    const Site site = nearest_site_with_parity(target, 0);
    const Site site_odd = nearest_site_with_parity(target, 1);
    std::uint64_t hits = 0;
    for (std::uint64_t rep = 0; rep < replicas; ++rep) {
      rng::Stream rs(rng::derive_key(seed, "locallimit", rep ^ (static_cast<std::uint64_t>(N) << 32)));
      Site s(d);
      for (long long n = 1; n <= N; ++n) {
        step_site(s, d, rs);
        if (s == site || s == site_odd) {
          ++hits;
          break;
        }
      }
    }
    const double vN = d == 2 ? std::log(static_cast<double>(N))
                             : std::pow(static_cast<double>(N), 0.5 * d - 1.0);
    const double p = static_cast<double>(hits) / static_cast<double>(replicas);
    LocalLimitRow row;
    row.N = N;
    row.scaled_probability = vN * p;
    row.stderr_ = vN * std::sqrt(p * (1.0 - p) / static_cast<double>(replicas));
    row.ratio_to_f = row.scaled_probability / f;
    row.zero_hits = hits == 0;
    rows.push_back(row);
  }
  return rows;
}

OverlapResult overlap_sum(long long N, int d, bool exact, std::uint64_t replicas,
                          std::uint64_t seed) {
  OverlapResult out;
  if (exact) {
    if (N > 10 || d > 3) throw std::invalid_argument("overlap_sum: exact mode needs N <= 10, d <= 3");
    // P(x in R_N) for every x by direct enumeration of all (2d)^N paths
    std::unordered_map<std::uint64_t, double, PackedSiteHash> hit_prob;
    const double leaf_prob = std::pow(2.0 * d, -static_cast<double>(N));
    std::vector<int> dir_stack(N, 0);
    Site s(d);
    std::vector<Site> path(N + 1, Site(d));
    // iterative odometer over direction strings
    long long total = 1;
    for (long long i = 0; i < N; ++i) total *= 2 * d;
    for (long long code = 0; code < total; ++code) {
      long long c = code;
      s = Site(d);
      path[0] = s;
      for (long long i = 0; i < N; ++i) {
        const int dir = static_cast<int>(c % (2 * d));
        c /= 2 * d;
        s.c[dir >> 1] += (dir & 1) ? 1 : -1;
        path[i + 1] = s;
      }
      // dedupe the range of this path
      std::unordered_set<std::uint64_t, PackedSiteHash> rng_set;
      for (const Site& p : path) rng_set.insert(pack_site(p));
      for (std::uint64_t key : rng_set) hit_prob[key] += leaf_prob;
    }
    double j = 0.0;
    for (const auto& [key, p] : hit_prob) j += p * p;
    out.j_n = j;
    out.exact = true;
    return out;
  }
  // MC: mean size of the intersection of two independent ranges
  std::vector<double> samples;
  samples.reserve(replicas);
  RangeTracker first(d, N + 1), second(d, N + 1);
  for (std::uint64_t rep = 0; rep < replicas; ++rep) {
    rng::Stream rs(rng::derive_key(seed, "overlap", rep));
    first.reset();
    second.reset();
    Site s(d);
    first.insert(s);
    for (long long n = 0; n < N; ++n) {
      step_site(s, d, rs);
      first.insert(s);
    }
    s = Site(d);
    std::size_t overlap = first.contains(s) ? 1 : 0;
    second.insert(s);
    for (long long n = 0; n < N; ++n) {
      step_site(s, d, rs);
      if (second.insert(s) && first.contains(s)) ++overlap;
    }
    samples.push_back(static_cast<double>(overlap));
  }
  const auto est = stats::mc_mean(samples, seed);
  out.j_n = est.mean;
  out.stderr_ = est.stderr_;
  out.exact = false;
  return out;
}

}  // namespace ndpoly::walk
