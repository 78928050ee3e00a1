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

#ifndef ANONKEY_LRS_HPP_
#define ANONKEY_LRS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "anonkey/bytes.hpp"
#include "anonkey/group.hpp"
#include "anonkey/random.hpp"

// Linkable ring signatures in the LSAG style. A signature proves that the
// signer holds the private key of one ring member without saying which, and
// carries a linkage tag h^x that is identical for every signature made with
// the same key under the same scope.
namespace anonkey::lrs {

using group::GroupElement;
using group::GroupParams;
using group::Scalar;

inline constexpr std::string_view kChallengeTag = "lrs-c";
inline constexpr std::string_view kLinkBaseTag = "lrs-h";
inline constexpr std::string_view kDetachedMagic = "LRSSIG01";

// Anonymity set, sorted ascending by fixed-width encoding with no duplicates.
class Ring {
 public:
  // Throws Error(kEmptyInput) for no members, Error(kInvalidArgument) for
  // duplicates.
  static Ring canonical(std::vector<GroupElement> members, const GroupParams& params);

  const std::vector<GroupElement>& members() const { return members_; }
  // Concatenated fixed-width member encodings.
  const Bytes& descriptor() const { return descriptor_; }
  std::size_t size() const { return members_.size(); }
  std::optional<std::size_t> index_of(const GroupElement& member) const;

  bool operator==(const Ring& other) const { return descriptor_ == other.descriptor_; }

 private:
  std::vector<GroupElement> members_;
  Bytes descriptor_;
};

struct Signature {
  Scalar c1;
  std::vector<Scalar> s;
  GroupElement tag;
  Bytes scope;

  bool operator==(const Signature&) const = default;
};

struct VerifyResult {
  bool accepted = false;
  GroupElement tag;
};

// Linkability scope used when the caller has no service-wide scope.
inline Bytes default_scope(const Ring& ring) { return ring.descriptor(); }

GroupElement linkage_base(ByteView scope, const GroupParams& params);
GroupElement linkage_tag(const Scalar& x, ByteView scope, const GroupParams& params);

// Throws Error(kInvalidArgument) for an out-of-range index and
// Error(kSignerMismatch) when g^x is not the member at signer_index.
Signature sign(ByteView msg, const Ring& ring, std::size_t signer_index,
               const Scalar& x, ByteView scope, const GroupParams& params,
               RandomSource& rng);

// Recomputes the challenge chain and checks that it closes on c1.
VerifyResult verify(ByteView msg, const Ring& ring, const Signature& sig,
                    const GroupParams& params);

// True iff both tags are equal. Throws Error(kScopeMismatch) when the scopes
// differ, since tags from different scopes are unrelated.
bool link(const Signature& a, const Signature& b);

// n (u32 BE) || scope length (u32 BE) || scope || tag || c1 || s_1..s_n,
// with tag P bytes and scalars Q bytes wide.
Bytes encode(const Signature& sig, const GroupParams& params);
// Throws Error(kMalformedEncoding) on any layout or range violation.
Signature decode(ByteView bytes, const GroupParams& params);
std::size_t encoded_size(std::size_t ring_size, std::size_t scope_len,
                         const GroupParams& params);

// "LRSSIG01" || encode(sig).
Bytes to_detached(const Signature& sig, const GroupParams& params);
Signature from_detached(ByteView bytes, const GroupParams& params);

// xxd-style dump for debugging.
std::string hex_dump(ByteView bytes);

}  // namespace anonkey::lrs

#endif  // ANONKEY_LRS_HPP_
