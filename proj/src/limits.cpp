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

#include "ndpoly/limits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "ndpoly/env.hpp"
#include "ndpoly/geom.hpp"
#include "ndpoly/quadrature.hpp"
#include "ndpoly/rng.hpp"
#include "ndpoly/walk.hpp"

namespace ndpoly::limits {

namespace {

void require_chi_window(double alpha, int d, double r_cut) {
  if (d < 5)
    throw std::invalid_argument("chi_estimate: requires d >= 5 (square-summable visit tail)");
  const double lo = static_cast<double>(d) / (d - 2.0);
  if (!(alpha > lo))
    throw std::invalid_argument("chi_estimate: alpha must exceed d/(d-2) for a summable series");
  if (r_cut < 10.0) throw std::invalid_argument("chi_estimate: r_cut must be >= 10");
  if (r_cut > 20.0) throw std::invalid_argument("chi_estimate: r_cut capped at 20");
}

void require_w_window(const CompensatedIntegralSpec& s) {
  const double dd = static_cast<double>(s.d);
  if (s.beta < 0.0) throw std::invalid_argument("w_sample: beta must be >= 0");
  if (s.alpha == 1.0) throw std::invalid_argument("w_sample: alpha = 1 is not supported");
  if (s.beta > 0.0) {
    const bool ok = s.alpha > dd / 2.0 && s.alpha < 2.0 && (s.d == 2 || s.d == 3);
    if (!ok)
      throw std::invalid_argument(
          "w_sample: beta > 0 requires alpha in (d/2, 2) with d in {2, 3}");
    return;
  }
  const bool low = s.alpha > 0.0 && s.alpha < 1.0;
  const bool mid = s.alpha > 1.0 && s.alpha < 2.0 && s.alpha < dd / (dd - 2.0);
  if (!low && !mid)
    throw std::invalid_argument(
        "w_sample: beta = 0 requires alpha in (0,1), or alpha in (1,2) below d/(d-2)");
}

// E|w - mu|^kappa under the Pareto law (kappa < alpha)
double pareto_abs_central_moment(double alpha, double mu, double kappa) {
  const double T = 1e6;
  const auto f = [&](double t) {
    return std::pow(std::fabs(t - mu), kappa) * alpha * std::pow(t, -alpha - 1.0);
  };
  const auto r = quad::adaptive_simpson(f, 1.0, T, 1e-10, 44);
  const double tail = alpha / (alpha - kappa) * std::pow(T, kappa - alpha);
  return r.value + tail;
}

// visit probabilities deduplicated by lattice symmetry (sorted |coords|)
class VisitProbCache {
 public:
  explicit VisitProbCache(int d) : d_(d) {}

  double at(const Site& s) {
    std::array<std::int32_t, kMaxDim> key{};
    for (int i = 0; i < d_; ++i) key[i] = std::abs(s.c[i]);
    std::sort(key.begin(), key.begin() + d_);
    std::uint64_t packed = 0;
    for (int i = 0; i < d_; ++i) packed = (packed << 7) | static_cast<std::uint64_t>(key[i]);
    auto it = cache_.find(packed);
    if (it != cache_.end()) return it->second;
    const double p = walk::hitting_probability_inf(s, d_);
    cache_.emplace(packed, p);
    return p;
  }

 private:
  int d_;
  std::unordered_map<std::uint64_t, double> cache_;
};

double chi_tail_bound(double alpha, int d, double mu, double r_cut, double c_profile) {
  // median-level Markov bound on the |x| > r_cut remainder via the kappa-th
  // moment, kappa strictly between d/(d-2) and alpha (capped at 2)
  const double kappa = std::min(2.0, 0.5 * (static_cast<double>(d) / (d - 2.0) + alpha));
  const double m_k = pareto_abs_central_moment(alpha, mu, kappa);
  const double cp = 1.3 * c_profile;  // safety on the shell-calibrated decay
  const double surface = d * unit_ball_volume(d);
  const double expo = (2.0 - d) * kappa + d;  // < 0 in the admissible window
  const double tail_sum = std::pow(cp, kappa) * surface * std::pow(r_cut, expo) / (-expo);
  // von Bahr-Esseen: E|sum|^kappa <= 2 sum E|term|^kappa; median at 2x mass
  return std::pow(2.0 * 2.0 * m_k * tail_sum, 1.0 / kappa);
}

}  // namespace

std::vector<ChiSample> chi_estimate(double alpha, int d, double mu, double r_cut, std::size_t n,
                                    std::uint64_t seed) {
  require_chi_window(alpha, d, r_cut);
  VisitProbCache cache(d);
  double c_profile = 0.0;
  std::vector<ChiSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t env_key = rng::derive_key(seed, "chi.env", i);
    double acc = 0.0;
    for_each_ball_site(d, r_cut, [&](const Site& s) {
      const double p = cache.at(s);
      const std::uint64_t key = rng::hash_combine(env_key, pack_site(s));
      const double u = 1.0 - static_cast<double>(rng::mix64(key) >> 11) * 0x1.0p-53;
      acc += (rng::pareto_from_unit(alpha, u) - mu) * p;
      if (i == 0) {
        const double nn = s.to_vec().norm();
        if (nn >= r_cut - 1.0)  // outer shell calibrates the decay profile
          c_profile = std::max(c_profile, p * std::pow(nn, static_cast<double>(d) - 2.0));
      }
    });
    out[i].value = acc;
    if (i == 0) {
      const double bound = chi_tail_bound(alpha, d, mu, r_cut, c_profile);
      for (auto& cs : out) cs.tail_bound = bound;
    }
  }
  return out;
}

std::vector<ChiNested> chi_estimate_nested(double alpha, int d, double mu, double r_cut,
                                           std::size_t n, std::uint64_t seed) {
  require_chi_window(alpha, d, r_cut);
  VisitProbCache cache(d);
  const double r2 = r_cut * r_cut;
  double c_inner = 0.0;
  std::vector<ChiNested> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t env_key = rng::derive_key(seed, "chi.env", i);
    double inner = 0.0, outer = 0.0;
    for_each_ball_site(d, 2.0 * r_cut, [&](const Site& s) {
      const double p = cache.at(s);
      const std::uint64_t key = rng::hash_combine(env_key, pack_site(s));
      const double u = 1.0 - static_cast<double>(rng::mix64(key) >> 11) * 0x1.0p-53;
      const double term = (rng::pareto_from_unit(alpha, u) - mu) * p;
      outer += term;
      const double nn2 = static_cast<double>(s.norm2());
      if (nn2 <= r2) {
        inner += term;
        if (i == 0 && nn2 >= (r_cut - 1.0) * (r_cut - 1.0))
          c_inner = std::max(c_inner, p * std::pow(std::sqrt(nn2), static_cast<double>(d) - 2.0));
      }
    });
    out[i].at_r = inner;
    out[i].at_2r = outer;
    if (i == 0) {
      const double bound = chi_tail_bound(alpha, d, mu, r_cut, c_inner);
      for (auto& cs : out) cs.tail_bound_r = bound;
    }
  }
  return out;
}

double f_ball_integral(int d, double K, double tol, double power) {
  struct Key {
    int d;
    double K, tol, power;
    bool operator<(const Key& o) const {
      return std::tie(d, K, tol, power) < std::tie(o.d, o.K, o.tol, o.power);
    }
  };
  static std::mutex mu;
  static std::map<Key, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    const auto it = cache.find({d, K, tol, power});
    if (it != cache.end()) return it->second;
  }
  const double surface = d * unit_ball_volume(d);
  const auto integrand = [&](double r) {
    if (r <= 0.0) return 0.0;
    Vec x(d);
    x.c[0] = r;
    return std::pow(walk::f_profile(x, d), power) * std::pow(r, static_cast<double>(d) - 1.0);
  };
  const auto res = quad::adaptive_simpson(integrand, 1e-6, K, tol, 44);
  const double v = surface * res.value;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(Key{d, K, tol, power}, v);
  return v;
}

double compensator_integral(const CompensatedIntegralSpec& spec) {
  if (spec.alpha == 1.0) throw std::invalid_argument("compensator_integral: alpha = 1 unsupported");
  if (spec.alpha < 1.0) return 0.0;  // raw integral, nothing subtracted
  if (!(spec.eps_w > 0.0))
    throw std::invalid_argument("compensator_integral: alpha > 1 requires eps > 0");
  const double mass = spec.alpha / (spec.alpha - 1.0) * std::pow(spec.eps_w, 1.0 - spec.alpha);
  return mass * f_ball_integral(spec.d, spec.K, spec.quad_tol);
}

double default_eps(const CompensatedIntegralSpec& spec) {
  // 1% of the median top weight in the window
  const double measure = unit_ball_volume(spec.d) * std::pow(spec.K, spec.d);
  const double median_top = std::pow(measure / std::log(2.0), 1.0 / spec.alpha);
  return 0.01 * median_top;
}

double expected_point_count(const CompensatedIntegralSpec& spec) {
  const double eps = spec.eps_w > 0.0 ? spec.eps_w : default_eps(spec);
  return unit_ball_volume(spec.d) * std::pow(spec.K, spec.d) * std::pow(eps, -spec.alpha);
}

namespace {

// radial interpolation of the visit profile (log-spaced); direct
// evaluation below the table floor
class ProfileTable {
 public:
  ProfileTable(int d, double r_max) : d_(d), r_min_(1e-3), r_max_(r_max) {
    const int n = 2048;
    table_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double r = r_min_ * std::pow(r_max_ / r_min_, static_cast<double>(i) / n);
      Vec x(d_);
      x.c[0] = r;
      table_[i] = walk::f_profile(x, d_);
    }
  }
  double operator()(double r) const {
    if (r >= r_max_) return 0.0;
    if (r <= r_min_) {
      Vec x(d_);
      x.c[0] = std::max(r, 1e-9);
      return walk::f_profile(x, d_);
    }
    const double pos = std::log(r / r_min_) / std::log(r_max_ / r_min_) * 2048.0;
    const int i = std::min(2047, static_cast<int>(pos));
    const double frac = pos - i;
    return table_[i] * (1.0 - frac) + table_[i + 1] * frac;
  }

 private:
  int d_;
  double r_min_, r_max_;
  std::vector<double> table_;
};

const ProfileTable& profile_table(int d, double r_max) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::unique_ptr<ProfileTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{d, r_max}];
  if (!slot) slot = std::make_unique<ProfileTable>(d, r_max);
  return *slot;
}

struct PointSet {
  std::vector<Vec> x;
  std::vector<double> w;
};

PointSet sample_points(const CompensatedIntegralSpec& spec, double K_dom, double eps_dom,
                       std::uint64_t seed) {
  PointSet ps;
  rng::Stream rs(seed, "wsample");
  const double mean_count =
      unit_ball_volume(spec.d) * std::pow(K_dom, spec.d) * std::pow(eps_dom, -spec.alpha);
  const std::uint64_t count = rs.next_poisson(mean_count);
  ps.x.reserve(count);
  ps.w.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ps.x.push_back(uniform_in_ball(spec.d, K_dom, rs));
    ps.w.push_back(eps_dom * std::pow(rs.next_unit_pos(), -1.0 / spec.alpha));
  }
  return ps;
}

double weight_channel_bound(const CompensatedIntegralSpec& spec, double eps) {
  const double dd = static_cast<double>(spec.d);
  if (spec.alpha < 1.0) {
    // uncompensated small weights: L1 mass, median at twice the mean
    const double mass = spec.alpha / (1.0 - spec.alpha) * std::pow(eps, 1.0 - spec.alpha);
    return 2.0 * mass * f_ball_integral(spec.d, spec.K, spec.quad_tol);
  }
  // compensated: kappa-norm with kappa strictly between alpha and the
  // profile-integrability ceiling min(2, d/(d-2))
  const double ceil_k = spec.d <= 3 ? 2.0 : std::min(2.0, dd / (dd - 2.0) - 1e-9);
  const double kappa = 0.5 * (spec.alpha + ceil_k);
  const double w_mass = spec.alpha / (kappa - spec.alpha) * std::pow(eps, kappa - spec.alpha);
  const double f_mass = f_ball_integral(spec.d, std::min(spec.K, 50.0), spec.quad_tol, kappa);
  double channel = std::pow(2.0 * 2.0 * w_mass * f_mass, 1.0 / kappa);
  if (spec.beta > 0.0) {
    // the exponential term contributes ~ (beta/2) w^2 below eps
    const double quad_mass =
        0.5 * spec.beta * spec.alpha / (2.0 - spec.alpha) * std::pow(eps, 2.0 - spec.alpha);
    channel += 2.0 * quad_mass * f_ball_integral(spec.d, spec.K, spec.quad_tol);
  }
  return channel;
}

WSample evaluate_points(const CompensatedIntegralSpec& spec, const PointSet& ps,
                        const ProfileTable& profile, double K_eval, double eps_eval) {
  WSample out;
  out.eps_used = eps_eval;
  long double expo_part = 0.0L;
  double linear_part = 0.0;
  std::uint32_t used = 0;
  for (std::size_t i = 0; i < ps.x.size(); ++i) {
    const double r = ps.x[i].norm();
    if (r > K_eval || ps.w[i] < eps_eval) continue;
    ++used;
    const double f = profile(r);
    if (spec.beta > 0.0) {
      const long double bw = static_cast<long double>(spec.beta) * ps.w[i];
      if (bw > 11000.0L) {
        out.overflowed = true;
        expo_part = std::numeric_limits<long double>::max();
      } else {
        expo_part += (expl(bw) - 1.0L - bw) / spec.beta * f;
      }
    }
    linear_part += ps.w[i] * f;
  }
  out.points = used;
  CompensatedIntegralSpec eval_spec = spec;
  eval_spec.K = K_eval;
  eval_spec.eps_w = eps_eval;
  out.compensator = compensator_integral(eval_spec);
  const long double total = expo_part + static_cast<long double>(linear_part) - out.compensator;
  out.value = static_cast<double>(total);
  out.spatial_channel = std::exp(-K_eval);  // median-level threshold for the spatial tail
  out.weight_channel = weight_channel_bound(eval_spec, eps_eval);
  return out;
}

}  // namespace

WSample w_sample(const CompensatedIntegralSpec& spec, std::uint64_t seed) {
  require_w_window(spec);
  const double eps = spec.eps_w > 0.0 ? spec.eps_w : default_eps(spec);
  const auto ps = sample_points(spec, spec.K, eps, seed);
  const ProfileTable& profile = profile_table(spec.d, spec.K);
  return evaluate_points(spec, ps, profile, spec.K, eps);
}

WNestedPair w_sample_k_doubling(const CompensatedIntegralSpec& spec, std::uint64_t seed) {
  require_w_window(spec);
  const double eps = spec.eps_w > 0.0 ? spec.eps_w : default_eps(spec);
  const auto ps = sample_points(spec, 2.0 * spec.K, eps, seed);
  const ProfileTable& profile = profile_table(spec.d, 2.0 * spec.K);
  WNestedPair pair;
  pair.coarse = evaluate_points(spec, ps, profile, spec.K, eps);
  pair.fine = evaluate_points(spec, ps, profile, 2.0 * spec.K, eps);
  return pair;
}

WNestedPair w_sample_eps_halving(const CompensatedIntegralSpec& spec, std::uint64_t seed) {
  require_w_window(spec);
  const double eps = spec.eps_w > 0.0 ? spec.eps_w : default_eps(spec);
  const auto ps = sample_points(spec, spec.K, 0.5 * eps, seed);
  const ProfileTable& profile = profile_table(spec.d, spec.K);
  WNestedPair pair;
  pair.coarse = evaluate_points(spec, ps, profile, spec.K, eps);
  pair.fine = evaluate_points(spec, ps, profile, spec.K, 0.5 * eps);
  return pair;
}

}  // namespace ndpoly::limits
