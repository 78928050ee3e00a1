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

#include "anonkey/group.hpp"

#include <fstream>
#include <sstream>

#include "anonkey/error.hpp"

namespace anonkey::group {

namespace {

constexpr int kPrimalityRounds = 64;
constexpr int kMaxPrimeCandidates = 1 << 20;

// Production set, output of generate_params(256, 2048, kProductionSeed).
constexpr const char* kProductionP =
    "a2ec608aec02480ebbc2b40681dac0dc5c01fee363be382c6ea493529d69b008"
    "a57cc9980bb190bb9840ab36be5b757e1ba53477408a8aa3cdc82cd6b99db7ea"
    "286f0549a442e6f96f246471b9a8b6bec56a66e4942ed5b0549ddb10a9b05980"
    "bb845abe84c77930c9fc114899b32530cf1af712bfc514ff11bfc847ec037bf9"
    "85b90170837b394f5e4a26701c03ad4eb9681cb568094ce2561933fba953883e"
    "e93705222f8581110e3cc236b70fd125f5e752e27967cb769ed68857719434e6"
    "e080a803715e682df8596628c8bcb64313096cb8cd3e781d8c78986c283ada2d"
    "1c2d97ccc9f4619016ecdda8cef422a690ee5ba137d5a4682a254b3fd9f0ba27";
constexpr const char* kProductionQ =
    "a302f29221ec534988e17ed0237068fd6e30b40c8accb3a6a379fbfbac5497a1";
constexpr const char* kProductionG =
    "8bbb6bb94697941fc238af6230acbca65d517e24520678a173b1ac5c75c1a1fe"
    "56d2949311ac7adb9e5d2498e42b2250154ee8ad544f3e46d743386b1f836dd9"
    "38b62c8e1c95bd404bda624287af956dbb21ca07dda9de6d1d83ce4778b984b1"
    "794ce96f3d2f2413a07add162c94a93eba8afedbb15b88446717686e30ffff24"
    "c3d55cbed901c7947dd6f06fe2ffd7b319d2b07b79b6df20dcc6f7562b64b6ca"
    "8ed22a5f78e00bb0dfc872092363b725a71b6853216c5f5ff07ffab2d3b7cfe1"
    "85c9f691b9ae8925263c0b67f93782c190761d100de462ce2075c8b6327b37df"
    "c5f09d48c4dde0f621cb5ba5f2ea7571acb262e7a9fd87a2300bd1338ca7af38";

bool is_probable_prime(const BigInt& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), kPrimalityRounds) > 0;
}

std::size_t byte_width(const BigInt& v) {
  return (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
}

BigInt random_bits(RandomSource& rng, unsigned bits) {
  Bytes buf = rng.bytes((bits + 7) / 8);
  unsigned excess = static_cast<unsigned>(buf.size() * 8) - bits;
  if (!buf.empty()) buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
  return decode_unsigned(buf);
}

}  // namespace

std::size_t GroupParams::p_bytes() const { return byte_width(p); }
std::size_t GroupParams::q_bytes() const { return byte_width(q); }

void GroupParams::validate() const {
  if (p < 3 || q < 2) throw Error(Errc::kInvalidArgument, "p or q too small");
  if (!is_probable_prime(p)) throw Error(Errc::kInvalidArgument, "p is not prime");
  if (!is_probable_prime(q)) throw Error(Errc::kInvalidArgument, "q is not prime");
  BigInt r = (p - 1) % q;
  if (r != 0) throw Error(Errc::kInvalidArgument, "q does not divide p - 1");
  if (g < 2 || g >= p) throw Error(Errc::kInvalidArgument, "g out of range");
  BigInt t;
  mpz_powm(t.get_mpz_t(), g.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  if (t != 1) throw Error(Errc::kInvalidArgument, "g does not have order q");
}

nlohmann::json GroupParams::to_json() const {
  return {{"p", group::to_hex(p)}, {"q", group::to_hex(q)}, {"g", group::to_hex(g)}};
}

GroupParams GroupParams::from_json(const nlohmann::json& j) {
  try {
    GroupParams params{from_hex(j.at("p").get<std::string>()),
                       from_hex(j.at("q").get<std::string>()),
                       from_hex(j.at("g").get<std::string>())};
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("params json: ") + e.what());
  }
}

std::string GroupParams::canonical_json() const { return to_json().dump(); }

Digest GroupParams::fingerprint() const { return sha256(as_bytes(canonical_json())); }

const GroupParams& toy_params() {
  static const GroupParams params{23, 11, 4};
  return params;
}

const GroupParams& production_params() {
  static const GroupParams params{from_hex(kProductionP), from_hex(kProductionQ),
                                  from_hex(kProductionG)};
  return params;
}

GroupParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open params file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("params file: ") + e.what());
  }
  GroupParams params = GroupParams::from_json(j);
  params.validate();
  return params;
}

void save_params(const GroupParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::kIoError, "cannot write params file " + path.string());
  out << params.to_json().dump(2) << "\n";
}

GroupParams generate_params(unsigned q_bits, unsigned p_bits, ByteView seed) {
  if (q_bits < 2 || p_bits < q_bits + 8) {
    throw Error(Errc::kInvalidArgument, "need q_bits >= 2 and p_bits >= q_bits + 8");
  }
  DeterministicRandom rng(seed);

  BigInt q;
  bool found = false;
  for (int i = 0; i < kMaxPrimeCandidates && !found; ++i) {
    q = random_bits(rng, q_bits);
    mpz_setbit(q.get_mpz_t(), q_bits - 1);
    mpz_setbit(q.get_mpz_t(), 0);
    found = is_probable_prime(q);
  }
  if (!found) throw Error(Errc::kParamSearchFailed, "no prime q found; re-seed");

  // p = k * 2q + 1 with exactly p_bits bits.
  BigInt two_q = 2 * q;
  BigInt p;
  found = false;
  for (int i = 0; i < kMaxPrimeCandidates && !found; ++i) {
    BigInt x = random_bits(rng, p_bits);
    mpz_setbit(x.get_mpz_t(), p_bits - 1);
    BigInt rem = x % two_q;
    p = x - rem + 1;
    if (mpz_sizeinbase(p.get_mpz_t(), 2) != p_bits) continue;
    found = is_probable_prime(p);
  }
  if (!found) throw Error(Errc::kParamSearchFailed, "no prime p found; re-seed");

  BigInt cofactor = (p - 1) / q;
  BigInt g;
  for (BigInt h = 2; h < p; ++h) {
    mpz_powm(g.get_mpz_t(), h.get_mpz_t(), cofactor.get_mpz_t(), p.get_mpz_t());
    if (g != 1) break;
  }
  GroupParams params{p, q, g};
  params.validate();
  return params;
}

Bytes encode_fixed(const BigInt& v, std::size_t width) {
  if (v < 0) throw Error(Errc::kInvalidArgument, "negative integer");
  std::size_t len = v == 0 ? 0 : byte_width(v);
  if (len > width) throw Error(Errc::kInvalidArgument, "integer exceeds field width");
  Bytes out(width, 0);
  if (len > 0) {
    std::size_t written = 0;
    mpz_export(out.data() + (width - len), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
  return out;
}

BigInt decode_unsigned(ByteView bytes) {
  BigInt v;
  if (!bytes.empty()) {
    mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return v;
}

std::string to_hex(const BigInt& v) { return v.get_str(16); }

BigInt from_hex(std::string_view hex) {
  if (hex.empty()) throw Error(Errc::kMalformedEncoding, "empty hex integer");
  BigInt v;
  if (v.set_str(std::string(hex), 16) != 0 || v < 0) {
    throw Error(Errc::kMalformedEncoding, "bad hex integer");
  }
  return v;
}

Scalar Scalar::from_int(const BigInt& v, const GroupParams& params) {
  if (v < 0 || v >= params.q) throw Error(Errc::kInvalidArgument, "scalar out of range");
  return Scalar(v);
}

Scalar Scalar::reduce(const BigInt& v, const GroupParams& params) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), params.q.get_mpz_t());
  return Scalar(r);
}

Bytes Scalar::encode(const GroupParams& params) const {
  return encode_fixed(v_, params.q_bytes());
}

Scalar Scalar::decode(ByteView bytes, const GroupParams& params) {
  if (bytes.size() != params.q_bytes()) {
    throw Error(Errc::kMalformedEncoding, "scalar has wrong width");
  }
  BigInt v = decode_unsigned(bytes);
  if (v >= params.q) throw Error(Errc::kMalformedEncoding, "scalar not below q");
  return Scalar(v);
}

Scalar add(const Scalar& a, const Scalar& b, const GroupParams& params) {
  return Scalar::reduce(a.value() + b.value(), params);
}

Scalar sub(const Scalar& a, const Scalar& b, const GroupParams& params) {
  return Scalar::reduce(a.value() - b.value(), params);
}

Scalar mul(const Scalar& a, const Scalar& b, const GroupParams& params) {
  return Scalar::reduce(a.value() * b.value(), params);
}

Scalar inverse(const Scalar& a, const GroupParams& params) {
  BigInt r;
  if (a.is_zero() ||
      mpz_invert(r.get_mpz_t(), a.value().get_mpz_t(), params.q.get_mpz_t()) == 0) {
    throw Error(Errc::kInvalidArgument, "scalar not invertible");
  }
  return Scalar::from_int(r, params);
}

Scalar random_scalar(RandomSource& rng, const GroupParams& params) {
  unsigned bits = static_cast<unsigned>(mpz_sizeinbase(params.q.get_mpz_t(), 2));
  for (;;) {
    BigInt v = random_bits(rng, bits);
    if (v < params.q) return Scalar::from_int(v, params);
  }
}

Scalar random_nonzero_scalar(RandomSource& rng, const GroupParams& params) {
  for (;;) {
    Scalar s = random_scalar(rng, params);
    if (!s.is_zero()) return s;
  }
}

GroupElement GroupElement::from_int(const BigInt& v, const GroupParams& params) {
  if (!in_subgroup(v, params)) {
    throw Error(Errc::kInvalidArgument, "value is not a subgroup element");
  }
  return GroupElement(v);
}

Bytes GroupElement::encode(const GroupParams& params) const {
  return encode_fixed(v_, params.p_bytes());
}

GroupElement GroupElement::decode(ByteView bytes, const GroupParams& params) {
  if (bytes.size() != params.p_bytes()) {
    throw Error(Errc::kMalformedEncoding, "group element has wrong width");
  }
  BigInt v = decode_unsigned(bytes);
  if (!in_subgroup(v, params)) {
    throw Error(Errc::kMalformedEncoding, "not a subgroup element");
  }
  return GroupElement(v);
}

bool in_subgroup(const BigInt& v, const GroupParams& params) {
  if (v < 1 || v >= params.p) return false;
  BigInt t;
  mpz_powm(t.get_mpz_t(), v.get_mpz_t(), params.q.get_mpz_t(), params.p.get_mpz_t());
  return t == 1;
}

GroupElement generator(const GroupParams& params) {
  return GroupElement::from_trusted(params.g);
}

GroupElement mul(const GroupElement& a, const GroupElement& b,
                 const GroupParams& params) {
  BigInt r = a.value() * b.value();
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), params.p.get_mpz_t());
  return GroupElement::from_trusted(std::move(r));
}

GroupElement exp(const GroupElement& base, const Scalar& e,
                 const GroupParams& params) {
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.value().get_mpz_t(), e.value().get_mpz_t(),
           params.p.get_mpz_t());
  return GroupElement::from_trusted(std::move(r));
}

GroupElement exp_secret(const GroupElement& base, const Scalar& e,
                        const GroupParams& params) {
  // mpz_powm_sec requires a positive exponent and odd modulus.
  if (e.is_zero()) return GroupElement();
  BigInt r;
  mpz_powm_sec(r.get_mpz_t(), base.value().get_mpz_t(), e.value().get_mpz_t(),
               params.p.get_mpz_t());
  return GroupElement::from_trusted(std::move(r));
}

namespace {

Bytes tagged_input(ByteView data, std::string_view domain_tag) {
  Bytes input;
  input.reserve(domain_tag.size() + 1 + data.size() + 1);
  append(input, domain_tag);
  input.push_back(0x00);
  append(input, data);
  return input;
}

}  // namespace

Sha256 tagged_hasher(std::string_view domain_tag) {
  Sha256 h;
  h.update(domain_tag);
  const std::uint8_t sep = 0x00;
  h.update(ByteView(&sep, 1));
  return h;
}

Scalar scalar_from_digest(const Digest& d, const GroupParams& params) {
  return Scalar::reduce(decode_unsigned(d), params);
}

Scalar hash_to_scalar(ByteView data, std::string_view domain_tag,
                      const GroupParams& params) {
  return scalar_from_digest(tagged_hasher(domain_tag).update(data).finish(), params);
}

GroupElement hash_to_group(ByteView data, std::string_view domain_tag,
                           const GroupParams& params) {
  Bytes input = tagged_input(data, domain_tag);
  input.push_back(0);
  BigInt cofactor = (params.p - 1) / params.q;
  for (int ctr = 0; ctr < 256; ++ctr) {
    input.back() = static_cast<std::uint8_t>(ctr);
    Digest d = sha256(input);
    BigInt u = decode_unsigned(d);
    mpz_mod(u.get_mpz_t(), u.get_mpz_t(), params.p.get_mpz_t());
    BigInt h;
    mpz_powm(h.get_mpz_t(), u.get_mpz_t(), cofactor.get_mpz_t(), params.p.get_mpz_t());
    // u = 0 maps to 0, which is not a member.
    if (h > 1) return GroupElement::from_trusted(std::move(h));
  }
  throw Error(Errc::kHashExhausted, "hash_to_group exhausted its counter");
}

}  // namespace anonkey::group
