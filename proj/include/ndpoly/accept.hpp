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

#ifndef NDPOLY_ACCEPT_HPP
#define NDPOLY_ACCEPT_HPP

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace ndpoly::accept {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  std::string name;
  bool fast = false;  // member of the quick release gate
  std::function<CheckResult()> fn;
};

/// The release checks, in their numbered order.
const std::vector<Check>& all_checks();

/// Run the fast or the full suite, printing one pass/fail line per check.
/// Returns the results; overall success is the conjunction.
std::vector<CheckResult> run_suite(bool fast_only, std::ostream& log);

}  // namespace ndpoly::accept

#endif  // NDPOLY_ACCEPT_HPP
