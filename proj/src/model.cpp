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

#include "ndpoly/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ndpoly::model {

void ModelParams::validate() const {
  if (d < 2) throw std::invalid_argument("model: dimension d must be >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("model: alpha must be positive");
  if (alpha >= static_cast<double>(d))
    throw std::invalid_argument("model: alpha must lie strictly below d");
  if (gamma < 0.0) throw std::invalid_argument("model: gamma must be >= 0");
  if (!(beta_hat > 0.0)) throw std::invalid_argument("model: beta_hat must be > 0 (or +inf)");
  if (mu.has_value() && alpha <= 1.0)
    throw std::invalid_argument("model: mu is defined only when alpha > 1");
}

std::string to_string(Region r) {
  switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::C: return "C";
    case Region::boundary_AB: return "boundary_AB";
    case Region::boundary_BC: return "boundary_BC";
  }
  return "?";
}

Region classify_regime(const ModelParams& p) {
  p.validate();
  const double g_ab = (p.d - p.alpha) / p.alpha;  // A <-> B (or A <-> C) boundary
  const double g_bc = p.d / (2.0 * p.alpha);      // B <-> C boundary
  if (p.gamma == g_ab) return Region::boundary_AB;
  if (p.gamma < g_ab) return Region::A;
  if (p.alpha > p.d / 2.0) {
    if (p.gamma == g_bc) return Region::boundary_BC;
    if (p.gamma < g_bc) return Region::B;
  }
  return Region::C;
}

double wandering_exponent(const ModelParams& p) {
  switch (classify_regime(p)) {
    case Region::A:
    case Region::boundary_AB:
      return 1.0;
    case Region::B:
      return p.alpha * (1.0 - p.gamma) / (2.0 * p.alpha - p.d);
    case Region::C:
    case Region::boundary_BC:
      return 0.5;
  }
  return 0.5;
}

double coupling(const ModelParams& p, long long N) {
  if (N < 1) throw std::invalid_argument("coupling: N must be >= 1");
  if (std::isinf(p.beta_hat)) return p.beta_hat;
  if (p.gamma == 0.0) return p.beta_hat;
  return std::exp(std::log(p.beta_hat) - p.gamma * std::log(static_cast<double>(N)));
}

}  // namespace ndpoly::model
