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

// Release gate: runs every acceptance check and prints one pass/fail line
// per criterion. Exit status is the conjunction.

#include <cstring>
#include <iostream>

#include "ndpoly/accept.hpp"

int main(int argc, char** argv) {
  const bool fast_only = argc > 1 && std::strcmp(argv[1], "--fast") == 0;
  const auto results = ndpoly::accept::run_suite(fast_only, std::cout);
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  std::cout << results.size() - failures << "/" << results.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
