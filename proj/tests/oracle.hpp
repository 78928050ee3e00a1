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

// Independent reference arithmetic for the toy group, used as test oracles.
// Deliberately shares no code with the library.

#ifndef ANONKEY_TESTS_ORACLE_HPP_
#define ANONKEY_TESTS_ORACLE_HPP_

#include <cstdint>

namespace oracle {

inline constexpr std::uint64_t kToyP = 23;
inline constexpr std::uint64_t kToyQ = 11;
inline constexpr std::uint64_t kToyG = 4;

// Right-to-left square and multiply.
inline std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1) result = result * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return result;
}

// Brute-force inverse by search.
inline std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
  for (std::uint64_t x = 1; x < m; ++x) {
    if (a * x % m == 1) return x;
  }
  return 0;
}

}  // namespace oracle

#endif  // ANONKEY_TESTS_ORACLE_HPP_
