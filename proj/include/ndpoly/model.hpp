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

#ifndef NDPOLY_MODEL_HPP
#define NDPOLY_MODEL_HPP

#include <optional>
#include <string>

namespace ndpoly::model {

/// Phase-diagram coordinates of the polymer model. The coupling decays as
/// beta_N = beta_hat * N^{-gamma}; h is the external field; mu the
/// environment mean (defined only for tail exponent alpha > 1).
struct ModelParams {
  int d = 2;                     // lattice dimension, >= 2
  double alpha = 1.5;            // tail exponent, in (0, d)
  double gamma = 0.0;            // coupling decay exponent, >= 0
  double beta_hat = 1.0;         // coupling amplitude, > 0; may be +infinity
  double h = 0.0;                // external field
  std::optional<double> mu;      // mean of the environment, iff alpha > 1

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

enum class Region { A, B, C, boundary_AB, boundary_BC };

std::string to_string(Region r);

/// Phase-diagram region of (alpha, gamma, d). Ballistic A for slow decay,
/// diffusive C for fast decay, the interpolating B strip only when
/// alpha > d/2. Equalities get their own boundary tags: the theorems treat
/// gamma = (d-alpha)/alpha and gamma = d/(2 alpha) specially.
Region classify_regime(const ModelParams& p);

/// Wandering exponent xi: 1 in region A, alpha(1-gamma)/(2 alpha - d) in
/// region B, 1/2 in region C; continuous across the boundaries.
double wandering_exponent(const ModelParams& p);

/// beta_N = beta_hat * N^{-gamma}, evaluated in log space so that huge N
/// cannot overflow intermediate powers.
double coupling(const ModelParams& p, long long N);

}  // namespace ndpoly::model

#endif  // NDPOLY_MODEL_HPP
