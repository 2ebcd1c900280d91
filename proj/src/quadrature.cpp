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

#include "ndpoly/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ndpoly::quad {

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  double err_acc = 0.0;
  bool converged = true;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm), frm = (*st.f)(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    st.converged = false;
    st.err_acc += std::fabs(delta);
    return left + right + delta / 15.0;
  }
  if (std::fabs(delta) <= 15.0 * tol) {
    st.err_acc += std::fabs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

Result adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (a == b) return {0.0, 0.0, true};
  SimpsonState st{&f};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = simpson_rec(st, a, b, fa, fm, fb, whole, abs_tol, max_depth);
  return {v, st.err_acc, st.converged};
}

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendre gl;
  gl.node.resize(n);
  gl.weight.resize(n);
  // Newton iteration from Chebyshev-like initial guesses
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
      }
      const double dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) {
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
        }
        break;
      }
    }
    double p2 = 0.0;
    {
      double q1 = 1.0, q2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double q3 = q2;
        q2 = q1;
        q1 = ((2.0 * j + 1.0) * x * q2 - j * q3) / (j + 1.0);
      }
      p1 = q1;
      p2 = q2;
    }
    const double dp = n * (x * p1 - p2) / (x * x - 1.0);
    gl.node[i] = -x;
    gl.node[n - 1 - i] = x;
    gl.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.weight[n - 1 - i] = gl.weight[i];
  }
  auto [ins, ok] = cache.emplace(n, std::move(gl));
  return ins->second;
}

void bessel_ive_all(double z, int n_max, std::vector<double>& out) {
  if (z < 0.0) throw std::invalid_argument("bessel_ive_all: z must be >= 0");
  out.assign(n_max + 1, 0.0);
  if (z == 0.0) {
    out[0] = 1.0;
    return;
  }
  // start order for the downward recurrence: comfortably above both n_max
  // and the turning point ~z
  const int start = n_max + 16 +
                    static_cast<int>(std::ceil(2.0 * std::sqrt(std::max(1.0, z) * 34.0)));
  double high = 0.0, cur = 1e-280;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = high;
    high = cur;
    cur = prev + (2.0 * k / z) * high;  // I_{k-1} = I_{k+1} + (2k/z) I_k
    if (k - 1 <= n_max) out[k - 1] = cur;
    if (k - 1 >= 1) norm += 2.0 * cur;
    if (std::fabs(cur) > 1e260) {  // rescale to dodge overflow
      const double s = 1e-260;
      cur *= s;
      high *= s;
      norm *= s;
      for (double& v : out) v *= s;
    }
  }
  norm += cur;  // cur now holds unnormalized I_0
  // e^{-z} (I_0 + 2 sum_{k>=1} I_k) = 1
  const double scale = 1.0 / norm;
  for (double& v : out) v *= scale;
}

}  // namespace ndpoly::quad
