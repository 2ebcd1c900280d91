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

#include "ndpoly/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "ndpoly/quadrature.hpp"

namespace ndpoly::env {

namespace {

double site_unit_pos(std::uint64_t env_seed, const Site& s) {
  const std::uint64_t key =
      rng::hash_combine(rng::derive_key(env_seed, "env.site"), pack_site(s) ^ (std::uint64_t(s.d) << 58));
  const double u = static_cast<double>(rng::mix64(key) >> 11) * 0x1.0p-53;
  return 1.0 - u;  // in (0, 1]
}

bool weight_site_less(double wa, const Site& sa, double wb, const Site& sb) {
  // descending weight, lexicographic site on ties
  if (wa != wb) return wa > wb;
  return sa < sb;
}

}  // namespace

double pareto_mean(double alpha) {
  if (alpha <= 1.0) throw std::invalid_argument("pareto_mean: requires alpha > 1");
  return alpha / (alpha - 1.0);
}

double pareto_moment(double alpha, int j) {
  if (j < 0) throw std::invalid_argument("pareto_moment: negative order");
  if (j == 0) return 1.0;
  if (alpha <= static_cast<double>(j))
    throw std::invalid_argument("pareto_moment: requires alpha > j");
  return alpha / (alpha - j);
}

double pareto_central_moment(double alpha, int j) {
  const double mu = pareto_mean(alpha);
  double sum = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= j; ++i) {
    // C(j, i) * E[w^i] * (-mu)^{j-i}
    sum += binom * pareto_moment(alpha, i) * std::pow(-mu, j - i);
    binom = binom * (j - i) / (i + 1.0);
  }
  return sum;
}

double pareto_variance(double alpha) {
  if (alpha <= 2.0) throw std::invalid_argument("pareto_variance: requires alpha > 2");
  const double m = pareto_mean(alpha);
  return pareto_moment(alpha, 2) - m * m;
}

std::vector<double> sample_pareto(double alpha, std::size_t n, std::uint64_t seed) {
  if (alpha <= 0.0) throw std::invalid_argument("sample_pareto: alpha must be positive");
  if (n == 0) throw std::invalid_argument("sample_pareto: need n >= 1");
  rng::Stream rs(seed, "pareto");
  std::vector<double> out(n);
  for (double& v : out) v = rng::pareto_from_unit(alpha, rs.next_unit_pos());
  return out;
}

LatticeEnvironment LatticeEnvironment::dense(int dim, double radius, double alpha,
                                             std::uint64_t seed) {
  if (radius > kDenseRadiusCap)
    throw std::invalid_argument("LatticeEnvironment::dense: radius above dense cap");
  if (alpha <= 0.0) throw std::invalid_argument("LatticeEnvironment: alpha must be positive");
  LatticeEnvironment e;
  e.dim_ = dim;
  e.radius_ = radius;
  e.alpha_ = alpha;
  e.seed_ = seed;
  e.dense_ = true;
  e.sites_ = lattice_ball_sites(dim, radius);
  e.values_.resize(e.sites_.size());
  e.index_.reserve(e.sites_.size() * 2);
  for (std::size_t i = 0; i < e.sites_.size(); ++i) {
    e.values_[i] = rng::pareto_from_unit(alpha, site_unit_pos(seed, e.sites_[i]));
    e.index_.emplace(pack_site(e.sites_[i]), i);
  }
  return e;
}

LatticeEnvironment LatticeEnvironment::lazy(int dim, double radius, double alpha,
                                            std::uint64_t seed) {
  if (alpha <= 0.0) throw std::invalid_argument("LatticeEnvironment: alpha must be positive");
  LatticeEnvironment e;
  e.dim_ = dim;
  e.radius_ = radius;
  e.alpha_ = alpha;
  e.seed_ = seed;
  e.dense_ = false;
  return e;
}

double LatticeEnvironment::value(const Site& s) const {
  if (dense_) {
    const auto it = index_.find(pack_site(s));
    if (it == index_.end())
      throw std::invalid_argument("LatticeEnvironment::value: site outside the ball");
    return values_[it->second];
  }
  return rng::pareto_from_unit(alpha_, site_unit_pos(seed_, s));
}

const std::vector<Site>& LatticeEnvironment::sites() const {
  if (!dense_) throw std::logic_error("LatticeEnvironment::sites: lazy environment");
  return sites_;
}

const std::vector<double>& LatticeEnvironment::values() const {
  if (!dense_) throw std::logic_error("LatticeEnvironment::values: lazy environment");
  return values_;
}

OrderStatistics LatticeEnvironment::order_statistics() const {
  if (!dense_) throw std::logic_error("order_statistics: dense environments only");
  OrderStatistics os;
  os.dim = dim_;
  os.continuum = false;
  os.domain_radius = radius_;
  std::vector<std::size_t> idx(sites_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return weight_site_less(values_[a], sites_[a], values_[b], sites_[b]);
  });
  os.weight.reserve(idx.size());
  os.site.reserve(idx.size());
  for (std::size_t i : idx) {
    os.weight.push_back(values_[i]);
    os.site.push_back(sites_[i].to_vec());
  }
  return os;
}

OrderStatistics LatticeEnvironment::top_order_statistics(std::size_t ell) const {
  if (ell == 0) throw std::invalid_argument("top_order_statistics: ell must be >= 1");
  OrderStatistics os;
  os.dim = dim_;
  os.continuum = false;
  os.domain_radius = radius_;
  using Entry = std::pair<double, Site>;
  const auto entry_greater = [](const Entry& a, const Entry& b) {
    return weight_site_less(a.first, a.second, b.first, b.second);
  };
  // min-heap of the current top-ell under the descending order
  std::priority_queue<Entry, std::vector<Entry>, decltype(entry_greater)> heap(entry_greater);
  const auto consider = [&](const Site& s, double w) {
    if (heap.size() < ell) {
      heap.emplace(w, s);
    } else if (weight_site_less(w, s, heap.top().first, heap.top().second)) {
      heap.pop();
      heap.emplace(w, s);
    }
  };
  if (dense_) {
    for (std::size_t i = 0; i < sites_.size(); ++i) consider(sites_[i], values_[i]);
  } else {
    for_each_ball_site(dim_, radius_, [&](const Site& s) { consider(s, value(s)); });
  }
  std::vector<Entry> top;
  top.reserve(heap.size());
  while (!heap.empty()) {
    top.push_back(heap.top());
    heap.pop();
  }
  std::reverse(top.begin(), top.end());
  for (const auto& [w, s] : top) {
    os.weight.push_back(w);
    os.site.push_back(s.to_vec());
  }
  return os;
}

OrderStatistics order_statistics_discrete(const LatticeEnvironment& e) {
  return e.order_statistics();
}

OrderStatistics sample_poisson_field(double q, double alpha, std::size_t ell, int d,
                                     std::uint64_t seed) {
  if (q <= 0.0) throw std::invalid_argument("sample_poisson_field: q must be positive");
  if (ell == 0) throw std::invalid_argument("sample_poisson_field: ell must be >= 1");
  if (alpha <= 0.0) throw std::invalid_argument("sample_poisson_field: alpha must be positive");
  OrderStatistics os;
  os.dim = d;
  os.continuum = true;
  os.domain_radius = q;
  os.weight.resize(ell);
  os.site.resize(ell);
  rng::Stream weights(seed, "poisson.weights");
  rng::Stream places(seed, "poisson.sites");
  const double measure = unit_ball_volume(d) * std::pow(q, d);  // (c_d q)^d
  double gamma = 0.0;
  for (std::size_t i = 0; i < ell; ++i) {
    gamma += weights.next_exp();
    os.weight[i] = std::pow(measure / gamma, 1.0 / alpha);
    os.site[i] = uniform_in_ball(d, q, places);
  }
  return os;
}

OrderStatistics couple_to_lattice(const OrderStatistics& cont, double r, double alpha) {
  if (!cont.continuum) throw std::invalid_argument("couple_to_lattice: need a continuum field");
  OrderStatistics os;
  os.dim = cont.dim;
  os.continuum = false;
  os.domain_radius = r;
  const double q = cont.domain_radius;
  const double measure = unit_ball_volume(cont.dim) * std::pow(q, cont.dim);
  const auto n_r = static_cast<double>(lattice_ball_count(cont.dim, r));
  // same exponential partial sums as the continuum field, lattice measure:
  // M_i = measure^{1/alpha} Gamma_i^{-1/alpha}  ->  M^r_i = (n_r/Gamma_i)^{1/alpha}
  const double factor = std::pow(n_r / measure, 1.0 / alpha);
  std::unordered_map<std::uint64_t, bool, PackedSiteHash> used;
  const double scale = r / q;
  for (std::size_t i = 0; i < cont.size(); ++i) {
    os.weight.push_back(cont.weight[i] * factor);
    Site s = nearest_site(scale * cont.site[i]);
    int guard = 0;  // keep sites distinct: nudge deterministically on collision
    while (used.count(pack_site(s))) {
      s.c[guard % cont.dim] += (guard % 2 == 0 ? 1 : -1);
      ++guard;
    }
    used.emplace(pack_site(s), true);
    os.site.push_back(s.to_vec());
  }
  return os;
}

CoupledEnvironment::CoupledEnvironment(const OrderStatistics& planted, double alpha,
                                       std::uint64_t seed)
    : dim_(planted.dim),
      radius_(planted.domain_radius),
      alpha_(alpha),
      cap_(1.0),
      seed_(seed) {
  if (planted.continuum)
    throw std::invalid_argument("CoupledEnvironment: need lattice order statistics");
  double cap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < planted.size(); ++i) {
    Site s(dim_);
    for (int k = 0; k < dim_; ++k) s.c[k] = static_cast<std::int32_t>(std::llround(planted.site[i].c[k]));
    planted_.emplace(pack_site(s), planted.weight[i]);
    cap = std::min(cap, planted.weight[i]);
  }
  cap_ = std::max(1.0, cap);
}

double CoupledEnvironment::value(const Site& s) const {
  const auto it = planted_.find(pack_site(s));
  if (it != planted_.end()) return it->second;
  const std::uint64_t key = rng::hash_combine(rng::derive_key(seed_, "coupled.site"),
                                              pack_site(s) ^ (std::uint64_t(s.d) << 58));
  const double u = static_cast<double>(rng::mix64(key) >> 11) * 0x1.0p-53;
  const double n2 = static_cast<double>(s.norm2());
  if (n2 <= radius_ * radius_) return rng::pareto_below_from_unit(alpha_, cap_, u);
  return rng::pareto_from_unit(alpha_, 1.0 - u);
}

double truncation_level(int d, double alpha, double eta, double N) {
  if (N < 3.0) throw std::invalid_argument("truncation_level: N must be >= 3");
  const double lo = d / (2.0 * alpha);
  if (!(eta > lo && eta < 1.0))
    throw std::invalid_argument("truncation_level: eta must lie in (d/(2 alpha), 1)");
  const double logN = std::log(N);
  const double slow = d == 2 ? std::log(logN) : logN;
  return std::pow(slow, eta) * std::pow(N, d / (2.0 * alpha));
}

TruncatedEnvironment truncate_environment(const LatticeEnvironment& base, double N, double eta,
                                          double mu) {
  TruncatedEnvironment t;
  t.base = &base;
  t.level = truncation_level(base.dim(), base.alpha(), eta, N);
  t.mu = mu;
  return t;
}

TruncatedMgf truncated_log_mgf(double alpha, double beta, double k, int p, double mu) {
  if (p < 0 || static_cast<double>(p) >= alpha)
    throw std::invalid_argument("truncated_log_mgf: need integer 0 <= p < alpha");
  if (k < 1.0) throw std::invalid_argument("truncated_log_mgf: need k >= 1");
  if (beta < 0.0) throw std::invalid_argument("truncated_log_mgf: need beta >= 0");
  TruncatedMgf out;
  if (beta == 0.0) return out;

  // E[e^{beta tilde_w}] - 1 = int_1^k (e^{beta(t-mu)} - 1) alpha t^{-alpha-1} dt
  // (the cut region contributes e^0)
  const auto integrand = [&](double t) {
    return std::expm1(beta * (t - mu)) * alpha * std::pow(t, -alpha - 1.0);
  };
  const double scale = std::max(1.0, std::fabs(std::expm1(beta * (k - mu))));
  const auto r = quad::adaptive_simpson(integrand, 1.0, k, 1e-13 * scale, 48);
  const double e_minus_1 = r.value;
  out.lambda = std::log1p(e_minus_1);
  out.tolerance = r.tolerance_achieved;
  out.converged = r.converged;

  double taylor = 0.0;
  double fact = 1.0;
  for (int i = 1; i <= p; ++i) {
    fact *= i;
    taylor += std::pow(beta, i) / fact * pareto_central_moment(alpha, i);
  }
  out.remainder = std::fabs(e_minus_1 - taylor);

  if (beta * k >= 1.0) {
    out.bound_case = 1;
    double factor;
    if (p + 1 > alpha)
      factor = std::pow(beta, alpha);
    else if (static_cast<double>(p + 1) == alpha)
      factor = std::pow(beta, alpha) * std::log(k);
    else
      factor = std::pow(beta, p + 1);
    out.bound_shape = std::exp(beta * k) * factor;
  } else {
    out.bound_case = 2;
    if (alpha < p + 1) {
      out.bound_shape = beta * std::pow(k, 1.0 - alpha);
    } else if (static_cast<double>(p + 1) == alpha) {
      out.bound_shape = beta * std::pow(k, 1.0 - alpha) * std::log(k);
    } else {
      // small-coupling regime with enough moments: the next Taylor term
      out.bound_shape = std::pow(beta, p + 1);
    }
  }
  return out;
}

}  // namespace ndpoly::env
