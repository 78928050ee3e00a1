/*
 * Copyright 2026 The anonkey Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ANONKEY_BENCH_HPP_
#define ANONKEY_BENCH_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "anonkey/group.hpp"
#include "anonkey/random.hpp"
#include "json.hpp"

namespace anonkey::bench {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Ordinary least squares of ys on xs. Needs at least two distinct xs.
LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys);

struct BenchPoint {
  std::size_t ring_size = 0;
  double sign_seconds = 0;    // mean over repetitions
  double verify_seconds = 0;  // mean over repetitions
  std::size_t encoded_bytes = 0;
};

struct BenchReport {
  std::size_t repetitions = 0;
  std::string params_fingerprint;
  std::vector<BenchPoint> points;
  LinearFit sign_fit;
  LinearFit verify_fit;
  LinearFit size_fit;

  nlohmann::json to_json() const;
  // ring_size,sign_seconds,verify_seconds,encoded_bytes
  std::string to_csv() const;
};

// Single-threaded timing of sign and verify on freshly generated keys. Every
// signature is checked; a rejection throws Error(kInternal).
// Requires at least 3 distinct sizes >= 1 and at least 5 repetitions.
BenchReport run_bench(std::vector<std::size_t> sizes, std::size_t repetitions,
                      const group::GroupParams& params, RandomSource& rng);

}  // namespace anonkey::bench

#endif  // ANONKEY_BENCH_HPP_
