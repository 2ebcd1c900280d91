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

#ifndef NDPOLY_QUADRATURE_HPP
#define NDPOLY_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace ndpoly::quad {

struct Result {
  double value = 0.0;
  double tolerance_achieved = 0.0;  // estimated absolute error
  bool converged = true;
};

/// Adaptive Simpson on [a,b]. Absolute tolerance; recursion depth capped.
Result adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 40);

/// Gauss-Legendre nodes/weights on [-1,1].
struct GaussLegendre {
  std::vector<double> node;
  std::vector<double> weight;
};
const GaussLegendre& gauss_legendre(int n);

/// Exponentially scaled modified Bessel functions e^{-z} I_k(z) for
/// k = 0..n_max at once (Miller downward recurrence, normalized with
/// e^{-z}(I_0 + 2 sum I_k) = 1). Requires z >= 0.
void bessel_ive_all(double z, int n_max, std::vector<double>& out);

}  // namespace ndpoly::quad

#endif  // NDPOLY_QUADRATURE_HPP
