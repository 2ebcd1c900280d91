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

#ifndef NDPOLY_ENTROPY_HPP
#define NDPOLY_ENTROPY_HPP

#include <span>
#include <vector>

#include "ndpoly/geom.hpp"

namespace ndpoly::entropy {

/// An ordered tuple of distinct points with implicit anchor at the origin;
/// the argument of every energy/entropy functional.
using OrderedPointSet = std::vector<Vec>;

/// One-dimensional random-walk rate function:
/// J(t) = (1+|t|)log(1+|t|)/2 + (1-|t|)log(1-|t|)/2 on [-1,1], +inf beyond.
double rate_J(double t);

/// d-dimensional rate function J_d(x), the cost per unit time of ballistic
/// displacement x. Evaluated by splitting the time across the d axes: the
/// optimal share of axis i solves u_i = sqrt(x_i^2 + (s/d)^2) with a common
/// s fixed by sum u_i = 1 (a one-dimensional monotone root). +inf when
/// ||x||_1 > 1.
double rate_Jd(const Vec& x);

struct JdSolution {
  double value = 0.0;
  std::vector<double> axis_share;  // optimal u_i, empty when value is +inf
};
JdSolution rate_Jd_full(const Vec& x);

/// Total Euclidean tour length through the ordered points, starting at 0.
double tour_length(std::span<const Vec> delta);

/// Ent(delta) = (d/2) * (tour length)^2.
double ent(std::span<const Vec> delta);

struct Allocation {
  double value = 0.0;
  std::vector<double> dt;  // optimal time spent on each leg
};

/// N-step quadratic entropy: inf over visit times of
/// sum (d/2)|x_i-x_{i-1}|^2/(t_i-t_{i-1}), equal to Ent(delta)/N with the
/// optimal leg times proportional to the leg lengths.
Allocation ent_N(std::span<const Vec> delta, double N);

/// N-step rate entropy: inf over visit times of
/// sum (t_i-t_{i-1}) J_d((x_i-x_{i-1})/(t_i-t_{i-1})). Total time N is
/// always exhausted (each leg cost decreases in its time share); the leg
/// split is solved by equalizing the marginal costs across legs, two nested
/// monotone one-dimensional roots. +inf when the l1 tour length exceeds N.
Allocation hat_ent_N(std::span<const Vec> delta, double N);

/// hat_ent_N at N = 1 (the continuum normalization).
inline Allocation hat_ent(std::span<const Vec> delta) { return hat_ent_N(delta, 1.0); }

/// Rate entropy of a fixed visit order given by `order` indices into pts.
Allocation hat_ent_ordered(std::span<const Vec> pts, std::span<const int> order, double N);

struct VisitOrder {
  double length = 0.0;
  std::vector<int> order;  // indices into the input set
  bool exact = true;       // false for the greedy fallback
};

/// Shortest origin-anchored open path through an unordered set: exact
/// subset dynamic program for up to 22 points, greedy nearest-neighbor
/// above that (exact_mode=false forces greedy).
VisitOrder shortest_visit_length(std::span<const Vec> points, bool exact_mode = true);

}  // namespace ndpoly::entropy

#endif  // NDPOLY_ENTROPY_HPP
