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

#include "anonkey/random.hpp"

#include <openssl/rand.h>

#include "anonkey/error.hpp"

namespace anonkey {

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error(Errc::kInternal, "RAND_bytes failed");
  }
}

DeterministicRandom::DeterministicRandom(ByteView seed)
    : seed_(seed.begin(), seed.end()) {}

DeterministicRandom::DeterministicRandom(std::uint64_t seed) {
  append_u64_be(seed_, seed);
}

void DeterministicRandom::fill(std::span<std::uint8_t> out) {
  std::lock_guard lock(mu_);
  for (auto& b : out) {
    if (used_ == block_.size()) {
      Bytes input = seed_;
      append_u64_be(input, counter_++);
      block_ = sha256(input);
      used_ = 0;
    }
    b = block_[used_++];
  }
}

RandomSource& system_random() {
  static SystemRandom instance;
  return instance;
}

}  // namespace anonkey
