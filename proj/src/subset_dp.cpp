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

#include "ndpoly/subset_dp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ndpoly {

namespace {
template <class T>
void relax_all(std::vector<T>& dp, int m, const std::vector<double>& from0,
               const std::vector<double>& pair, double prune_above) {
  const std::size_t n_masks = std::size_t{1} << m;
  dp.assign(n_masks * m, std::numeric_limits<T>::infinity());
  for (int j = 0; j < m; ++j)
    dp[(std::size_t{1} << j) * m + j] = static_cast<T>(from0[j]);
  for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
    const std::size_t base = std::size_t{mask} * m;
    for (int j = 0; j < m; ++j) {
      if (!(mask >> j & 1u)) continue;
      const T cur = dp[base + j];
      if (!std::isfinite(cur) || cur > prune_above) continue;
      const std::size_t row = static_cast<std::size_t>(j) * m;
      std::uint32_t rest = ~mask & (static_cast<std::uint32_t>(n_masks) - 1);
      while (rest) {
        const int k = std::countr_zero(rest);
        rest &= rest - 1;
        const T cand = cur + static_cast<T>(pair[row + k]);
        T& slot = dp[(std::size_t{mask} | (std::uint32_t{1} << k)) * m + k];
        if (cand < slot) slot = cand;
      }
    }
  }
}
}  // namespace

void SubsetPathDP::build(std::span<const Vec> pts, double prune_above) {
  m_ = static_cast<int>(pts.size());
  if (m_ > kMaxExactPoints)
    throw std::invalid_argument("SubsetPathDP: exact mode limited to 22 points");
  from0_.resize(m_);
  pair_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int j = 0; j < m_; ++j) {
    from0_[j] = pts[j].norm();
    for (int k = 0; k < m_; ++k) pair_[static_cast<std::size_t>(j) * m_ + k] = dist(pts[j], pts[k]);
  }
  if (m_ == 0) return;
  // double table below 16 points (exactness for the oracle comparisons),
  // float above to keep 2^m * m states affordable
  wide_ = m_ <= 16;
  if (wide_) {
    dpf_.clear();
    relax_all(dpd_, m_, from0_, pair_, prune_above);
  } else {
    dpd_.clear();
    relax_all(dpf_, m_, from0_, pair_, prune_above);
  }
}

double SubsetPathDP::state(std::uint32_t mask, int j) const {
  const std::size_t idx = std::size_t{mask} * m_ + j;
  return wide_ ? dpd_[idx] : static_cast<double>(dpf_[idx]);
}

double SubsetPathDP::min_length(std::uint32_t mask) const {
  if (mask == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m_; ++j) {
    if (mask >> j & 1u) best = std::min(best, state(mask, j));
  }
  return best;
}

std::vector<int> SubsetPathDP::min_length_order(std::uint32_t mask) const {
  std::vector<int> order;
  if (mask == 0) return order;
  int last = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m_; ++j) {
    if ((mask >> j & 1u) && state(mask, j) < best) {
      best = state(mask, j);
      last = j;
    }
  }
  std::uint32_t cur_mask = mask;
  const double tol = wide_ ? 1e-11 : 1e-4;
  while (last >= 0) {
    order.push_back(last);
    const std::uint32_t prev_mask = cur_mask ^ (std::uint32_t{1} << last);
    if (prev_mask == 0) break;
    const double target = state(cur_mask, last);
    int pick = -1;
    for (int i = 0; i < m_; ++i) {
      if (!(prev_mask >> i & 1u)) continue;
      const double via =
          state(prev_mask, i) + pair_[static_cast<std::size_t>(i) * m_ + last];
      if (std::fabs(via - target) <= tol * (1.0 + std::fabs(target))) {
        pick = i;
        break;  // ascending scan: smallest index wins
      }
    }
    if (pick < 0) {  // round-off pushed everything outside the window
      double best_via = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (!(prev_mask >> i & 1u)) continue;
        const double via =
            state(prev_mask, i) + pair_[static_cast<std::size_t>(i) * m_ + last];
        if (via < best_via) {
          best_via = via;
          pick = i;
        }
      }
    }
    last = pick;
    cur_mask = prev_mask;
  }
  std::reverse(order.begin(), order.end());
  return order;
}

}  // namespace ndpoly
