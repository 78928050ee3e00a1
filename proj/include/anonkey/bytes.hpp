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

#ifndef ANONKEY_BYTES_HPP_
#define ANONKEY_BYTES_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

struct evp_md_ctx_st;

namespace anonkey {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return Bytes(v.begin(), v.end());
}

inline void append(Bytes& out, ByteView in) {
  out.insert(out.end(), in.begin(), in.end());
}

inline void append(Bytes& out, std::string_view in) { append(out, as_bytes(in)); }

void append_u32_be(Bytes& out, std::uint32_t v);
void append_u64_be(Bytes& out, std::uint64_t v);

std::string to_hex(ByteView data);
// Throws Error(kMalformedEncoding) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

Digest sha256(ByteView data);

// Incremental SHA-256. Copies carry the midstate, so a long common prefix
// can be hashed once and extended many times.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256& other);
  Sha256& operator=(const Sha256& other);

  Sha256& update(ByteView data);
  Sha256& update(std::string_view data) { return update(as_bytes(data)); }
  // Leaves this object usable; finishing works on a copy of the state.
  Digest finish() const;

 private:
  ::evp_md_ctx_st* ctx_;
};

Digest hmac_sha256(ByteView key, ByteView data);

bool constant_time_equal(ByteView a, ByteView b);

// Overwrites the buffer in a way the optimizer cannot elide.
void secure_wipe(std::span<std::uint8_t> buf);

}  // namespace anonkey

#endif  // ANONKEY_BYTES_HPP_
