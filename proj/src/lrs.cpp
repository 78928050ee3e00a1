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

#include "anonkey/lrs.hpp"

#include <algorithm>
#include <cstdio>

#include "anonkey/error.hpp"

namespace anonkey::lrs {

namespace {

std::uint32_t read_u32_be(ByteView b) {
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

// Hashes prefix || a || b where prefix = descriptor || tag || msg. The
// prefix midstate is computed once, keeping each step O(1) in ring size.
class ChallengeHasher {
 public:
  ChallengeHasher(const Ring& ring, const GroupElement& tag, ByteView msg,
                  const GroupParams& params)
      : params_(params), prefix_(group::tagged_hasher(kChallengeTag)) {
    prefix_.update(ring.descriptor()).update(tag.encode(params)).update(msg);
  }

  Scalar operator()(const GroupElement& a, const GroupElement& b) {
    Sha256 h(prefix_);
    h.update(a.encode(params_)).update(b.encode(params_));
    return group::scalar_from_digest(h.finish(), params_);
  }

 private:
  const GroupParams& params_;
  Sha256 prefix_;
};

}  // namespace

Ring Ring::canonical(std::vector<GroupElement> members, const GroupParams& params) {
  if (members.empty()) throw Error(Errc::kEmptyInput, "ring has no members");
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw Error(Errc::kInvalidArgument, "ring contains duplicate members");
  }
  Ring ring;
  ring.descriptor_.reserve(members.size() * params.p_bytes());
  for (const auto& m : members) append(ring.descriptor_, m.encode(params));
  ring.members_ = std::move(members);
  return ring;
}

std::optional<std::size_t> Ring::index_of(const GroupElement& member) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), member);
  if (it == members_.end() || *it != member) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

GroupElement linkage_base(ByteView scope, const GroupParams& params) {
  return group::hash_to_group(scope, kLinkBaseTag, params);
}

GroupElement linkage_tag(const Scalar& x, ByteView scope, const GroupParams& params) {
  return group::exp_secret(linkage_base(scope, params), x, params);
}

Signature sign(ByteView msg, const Ring& ring, std::size_t signer_index,
               const Scalar& x, ByteView scope, const GroupParams& params,
               RandomSource& rng) {
  const std::size_t n = ring.size();
  if (signer_index >= n) throw Error(Errc::kInvalidArgument, "signer index out of range");
  const GroupElement g = group::generator(params);
  if (group::exp_secret(g, x, params) != ring.members()[signer_index]) {
    throw Error(Errc::kSignerMismatch, "private key does not match the ring slot");
  }

  const GroupElement h = linkage_base(scope, params);
  const GroupElement tag = group::exp_secret(h, x, params);
  ChallengeHasher hash(ring, tag, msg, params);

  std::vector<Scalar> c(n);
  std::vector<Scalar> s(n);
  const Scalar u = group::random_scalar(rng, params);
  c[(signer_index + 1) % n] =
      hash(group::exp_secret(g, u, params), group::exp_secret(h, u, params));

  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t i = (signer_index + k) % n;
    s[i] = group::random_scalar(rng, params);
    auto a = group::mul(group::exp(g, s[i], params),
                        group::exp(ring.members()[i], c[i], params), params);
    auto b = group::mul(group::exp(h, s[i], params), group::exp(tag, c[i], params),
                        params);
    c[(i + 1) % n] = hash(a, b);
  }
  s[signer_index] = group::sub(u, group::mul(x, c[signer_index], params), params);

  return Signature{c[0], std::move(s), tag, Bytes(scope.begin(), scope.end())};
}

VerifyResult verify(ByteView msg, const Ring& ring, const Signature& sig,
                    const GroupParams& params) {
  const std::size_t n = ring.size();
  if (sig.s.size() != n || !group::in_subgroup(sig.tag.value(), params)) {
    return {false, sig.tag};
  }
  const GroupElement g = group::generator(params);
  const GroupElement h = linkage_base(sig.scope, params);
  ChallengeHasher hash(ring, sig.tag, msg, params);

  Scalar c = sig.c1;
  for (std::size_t i = 0; i < n; ++i) {
    auto a = group::mul(group::exp(g, sig.s[i], params),
                        group::exp(ring.members()[i], c, params), params);
    auto b = group::mul(group::exp(h, sig.s[i], params),
                        group::exp(sig.tag, c, params), params);
    c = hash(a, b);
  }
  return {c == sig.c1, sig.tag};
}

bool link(const Signature& a, const Signature& b) {
  if (a.scope != b.scope) {
    throw Error(Errc::kScopeMismatch, "linkage tags from different scopes are incomparable");
  }
  return a.tag == b.tag;
}

std::size_t encoded_size(std::size_t ring_size, std::size_t scope_len,
                         const GroupParams& params) {
  return 4 + 4 + scope_len + params.p_bytes() + params.q_bytes() * (1 + ring_size);
}

Bytes encode(const Signature& sig, const GroupParams& params) {
  Bytes out;
  out.reserve(encoded_size(sig.s.size(), sig.scope.size(), params));
  append_u32_be(out, static_cast<std::uint32_t>(sig.s.size()));
  append_u32_be(out, static_cast<std::uint32_t>(sig.scope.size()));
  append(out, sig.scope);
  append(out, sig.tag.encode(params));
  append(out, sig.c1.encode(params));
  for (const auto& si : sig.s) append(out, si.encode(params));
  return out;
}

Signature decode(ByteView bytes, const GroupParams& params) {
  if (bytes.size() < 8) throw Error(Errc::kMalformedEncoding, "signature truncated");
  const std::uint64_t n = read_u32_be(bytes.subspan(0, 4));
  const std::uint64_t scope_len = read_u32_be(bytes.subspan(4, 4));
  const std::uint64_t pb = params.p_bytes();
  const std::uint64_t qb = params.q_bytes();
  if (n == 0) throw Error(Errc::kMalformedEncoding, "signature has empty ring");
  if (bytes.size() != 8 + scope_len + pb + qb * (1 + n)) {
    throw Error(Errc::kMalformedEncoding, "signature length does not match its header");
  }
  std::size_t off = 8;
  Signature sig;
  sig.scope.assign(bytes.begin() + off, bytes.begin() + off + scope_len);
  off += scope_len;
  sig.tag = GroupElement::decode(bytes.subspan(off, pb), params);
  off += pb;
  sig.c1 = Scalar::decode(bytes.subspan(off, qb), params);
  off += qb;
  sig.s.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i, off += qb) {
    sig.s.push_back(Scalar::decode(bytes.subspan(off, qb), params));
  }
  return sig;
}

Bytes to_detached(const Signature& sig, const GroupParams& params) {
  Bytes out = to_bytes(kDetachedMagic);
  append(out, encode(sig, params));
  return out;
}

Signature from_detached(ByteView bytes, const GroupParams& params) {
  auto magic = as_bytes(kDetachedMagic);
  if (bytes.size() < magic.size() ||
      !std::equal(magic.begin(), magic.end(), bytes.begin())) {
    throw Error(Errc::kMalformedEncoding, "missing LRSSIG01 magic");
  }
  return decode(bytes.subspan(magic.size()), params);
}

std::string hex_dump(ByteView bytes) {
  std::string out;
  char line[96];
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    std::snprintf(line, sizeof(line), "%08zx:", off);
    out += line;
    for (std::size_t i = off; i < off + 16; ++i) {
      if (i < bytes.size()) {
        std::snprintf(line, sizeof(line), "%s%02x", (i - off) % 2 == 0 ? " " : "",
                      bytes[i]);
        out += line;
      } else {
        out += (i - off) % 2 == 0 ? "   " : "  ";
      }
    }
    out += "  ";
    for (std::size_t i = off; i < off + 16 && i < bytes.size(); ++i) {
      out += (bytes[i] >= 0x20 && bytes[i] < 0x7f) ? static_cast<char>(bytes[i]) : '.';
    }
    out += '\n';
  }
  return out;
}

}  // namespace anonkey::lrs
