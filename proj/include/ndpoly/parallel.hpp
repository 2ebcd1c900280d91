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

#ifndef NDPOLY_PARALLEL_HPP
#define NDPOLY_PARALLEL_HPP

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ndpoly {

/// Worker pool width: NDPOLY_THREADS when set, hardware width otherwise.
inline int worker_count() {
  if (const char* envv = std::getenv("NDPOLY_THREADS")) {
    const int n = std::atoi(envv);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(begin, end) over a fixed deterministic chunking of [0, n).
/// Work must only write to caller-owned slots indexed by the loop index so
/// results are identical for every pool width.
inline void parallel_chunks(std::uint64_t n,
                            const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
  const int workers = worker_count();
  if (n == 0) return;
  if (workers <= 1 || n < 2) {
    fn(0, n);
    return;
  }
  const std::uint64_t chunks = std::min<std::uint64_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  const std::uint64_t per = n / chunks;
  const std::uint64_t extra = n % chunks;
  std::uint64_t begin = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t end = begin + per + (c < extra ? 1 : 0);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    begin = end;
  }
  for (auto& t : pool) t.join();
}

/// Per-index convenience wrapper.
inline void parallel_for(std::uint64_t n, const std::function<void(std::uint64_t)>& fn) {
  parallel_chunks(n, [&fn](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace ndpoly

#endif  // NDPOLY_PARALLEL_HPP
