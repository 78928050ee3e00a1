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

#ifndef ANONKEY_GROUP_HPP_
#define ANONKEY_GROUP_HPP_

#include <gmpxx.h>

#include <compare>
#include <filesystem>
#include <string>
#include <string_view>

#include "anonkey/bytes.hpp"
#include "anonkey/random.hpp"
#include "json.hpp"

namespace anonkey::group {

using BigInt = mpz_class;

// Prime-order subgroup of Z_p^*: q prime, q | p - 1, g of order q.
struct GroupParams {
  BigInt p;
  BigInt q;
  BigInt g;

  // Fixed serialization widths, ceil(bits/8).
  std::size_t p_bytes() const;
  std::size_t q_bytes() const;

  // Throws Error(kInvalidArgument) naming the first failed invariant.
  void validate() const;

  // {"p": hex, "q": hex, "g": hex}, lowercase minimal hex.
  nlohmann::json to_json() const;
  static GroupParams from_json(const nlohmann::json& j);
  std::string canonical_json() const;
  Digest fingerprint() const;

  bool operator==(const GroupParams& other) const {
    return p == other.p && q == other.q && g == other.g;
  }
};

// p = 23, q = 11, g = 4. Small enough to enumerate everything in tests.
const GroupParams& toy_params();

// The pinned 2048-bit p / 256-bit q set, generated by generate_params from
// the seed "anonkey-production-params-v1".
const GroupParams& production_params();

inline constexpr std::string_view kProductionSeed =
    "anonkey-production-params-v1";

GroupParams load_params(const std::filesystem::path& path);
void save_params(const GroupParams& params, const std::filesystem::path& path);

// Deterministic from seed. Requires p_bits >= q_bits + 8.
GroupParams generate_params(unsigned q_bits, unsigned p_bits, ByteView seed);

// Big-endian, left-padded to width. Throws if the value does not fit.
Bytes encode_fixed(const BigInt& v, std::size_t width);
BigInt decode_unsigned(ByteView bytes);
std::string to_hex(const BigInt& v);
BigInt from_hex(std::string_view hex);

class Scalar {
 public:
  Scalar() = default;

  // Throws Error(kInvalidArgument) unless 0 <= v < q.
  static Scalar from_int(const BigInt& v, const GroupParams& params);
  static Scalar reduce(const BigInt& v, const GroupParams& params);

  const BigInt& value() const { return v_; }
  bool is_zero() const { return v_ == 0; }

  Bytes encode(const GroupParams& params) const;
  // Strict: exactly q_bytes long and below q.
  static Scalar decode(ByteView bytes, const GroupParams& params);

  bool operator==(const Scalar& other) const { return v_ == other.v_; }

 private:
  explicit Scalar(BigInt v) : v_(std::move(v)) {}
  BigInt v_;
};

Scalar add(const Scalar& a, const Scalar& b, const GroupParams& params);
Scalar sub(const Scalar& a, const Scalar& b, const GroupParams& params);
Scalar mul(const Scalar& a, const Scalar& b, const GroupParams& params);
// Throws Error(kInvalidArgument) for zero.
Scalar inverse(const Scalar& a, const GroupParams& params);

// Uniform in [0, q) by rejection sampling.
Scalar random_scalar(RandomSource& rng, const GroupParams& params);
Scalar random_nonzero_scalar(RandomSource& rng, const GroupParams& params);

class GroupElement {
 public:
  GroupElement() : v_(1) {}

  // Throws Error(kInvalidArgument) unless 1 <= v < p and v^q = 1 mod p.
  static GroupElement from_int(const BigInt& v, const GroupParams& params);
  // Skips the membership check; only for values produced by group
  // arithmetic on members.
  static GroupElement from_trusted(BigInt v) { return GroupElement(std::move(v)); }

  const BigInt& value() const { return v_; }
  bool is_identity() const { return v_ == 1; }

  Bytes encode(const GroupParams& params) const;
  // Strict: exactly p_bytes long and a subgroup member.
  static GroupElement decode(ByteView bytes, const GroupParams& params);

  bool operator==(const GroupElement& other) const { return v_ == other.v_; }
  std::strong_ordering operator<=>(const GroupElement& other) const {
    int c = cmp(v_, other.v_);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
  }

 private:
  explicit GroupElement(BigInt v) : v_(std::move(v)) {}
  BigInt v_;
};

bool in_subgroup(const BigInt& v, const GroupParams& params);

GroupElement generator(const GroupParams& params);
GroupElement mul(const GroupElement& a, const GroupElement& b,
                 const GroupParams& params);

// base^e mod p for public exponents.
GroupElement exp(const GroupElement& base, const Scalar& e,
                 const GroupParams& params);
// base^e mod p using GMP's side-channel-silent powm. Best effort only: GMP
// avoids exponent-dependent branches and memory access patterns, but the
// surrounding big-integer code does not.
GroupElement exp_secret(const GroupElement& base, const Scalar& e,
                        const GroupParams& params);

// Hasher primed with tag || 0x00, for callers that stream their input.
Sha256 tagged_hasher(std::string_view domain_tag);
// Digest as a big-endian integer, mod q.
Scalar scalar_from_digest(const Digest& d, const GroupParams& params);

// SHA-256(tag || 0x00 || data) mod q.
Scalar hash_to_scalar(ByteView data, std::string_view domain_tag,
                      const GroupParams& params);

// Cofactor exponentiation of SHA-256(tag || 0x00 || data || ctr) mod p. The
// discrete log of the result relative to g is unknown to everyone.
GroupElement hash_to_group(ByteView data, std::string_view domain_tag,
                           const GroupParams& params);

}  // namespace anonkey::group

#endif  // ANONKEY_GROUP_HPP_
