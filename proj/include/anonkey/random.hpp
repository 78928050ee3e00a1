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

#ifndef ANONKEY_RANDOM_HPP_
#define ANONKEY_RANDOM_HPP_

#include <cstdint>
#include <mutex>
#include <span>

#include "anonkey/bytes.hpp"

namespace anonkey {

// Source of random bytes. Signing, sharing and challenge generation all take
// one of these so tests can inject reproducible streams.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
  }
};

// OpenSSL RAND_bytes. Safe for concurrent use.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// SHA-256 in counter mode over a seed. Not for production keys. Calls are
// serialized so one stream can back a multithreaded service.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(ByteView seed);
  explicit DeterministicRandom(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mutex mu_;
  Bytes seed_;
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = block_.size();
};

// Process-wide system source.
RandomSource& system_random();

}  // namespace anonkey

#endif  // ANONKEY_RANDOM_HPP_
