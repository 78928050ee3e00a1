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

#include <set>

#include "anonkey/error.hpp"
#include "anonkey/group.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace anonkey;
using namespace anonkey::group;

namespace {

const GroupParams& toy() { return toy_params(); }

GroupElement toy_elem(unsigned v) { return GroupElement::from_int(v, toy()); }
Scalar toy_scalar(unsigned v) { return Scalar::from_int(v, toy()); }

}  // namespace

TEST_CASE("toy exponentiation matches the square-and-multiply oracle") {
  CHECK(exp(toy_elem(4), toy_scalar(7), toy()).value() == 8);
  CHECK(oracle::powmod(4, 7, 23) == 8);
  CHECK(exp(toy_elem(4), toy_scalar(0), toy()).is_identity());
  // e = q reduces to zero.
  CHECK(exp(toy_elem(4), Scalar::reduce(11, toy()), toy()).is_identity());
  CHECK(exp_secret(toy_elem(4), toy_scalar(0), toy()).is_identity());
  for (unsigned e = 0; e < 11; ++e) {
    CHECK(exp_secret(toy_elem(4), toy_scalar(e), toy()).value() ==
          oracle::powmod(4, e, 23));
  }
}

TEST_CASE("exponent composition is exhaustive on the toy group") {
  const auto g = generator(toy());
  for (unsigned a = 0; a <= 10; ++a) {
    for (unsigned b = 0; b <= 10; ++b) {
      auto lhs = exp(exp(g, toy_scalar(a), toy()), toy_scalar(b), toy());
      auto rhs = exp(g, Scalar::reduce(a * b, toy()), toy());
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("subgroup is closed under multiplication") {
  std::vector<unsigned> members;
  for (unsigned v = 1; v < 23; ++v) {
    if (oracle::powmod(v, 11, 23) == 1) members.push_back(v);
  }
  REQUIRE(members.size() == 11);
  for (unsigned a : members) {
    CHECK(in_subgroup(a, toy()));
    for (unsigned b : members) {
      CHECK(in_subgroup(mul(toy_elem(a), toy_elem(b), toy()).value(), toy()));
    }
  }
  CHECK_FALSE(in_subgroup(5, toy()));
  CHECK_FALSE(in_subgroup(0, toy()));
  CHECK_FALSE(in_subgroup(23, toy()));
  CHECK_THROWS_AS(toy_elem(5), Error);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(toy().validate());
  CHECK(22 % 11 == 0);
  CHECK(oracle::powmod(4, 11, 23) == 1);
  CHECK_NOTHROW(production_params().validate());
  CHECK(production_params().p_bytes() == 256);
  CHECK(production_params().q_bytes() == 32);

  CHECK_THROWS_AS((GroupParams{23, 11, 5}).validate(), Error);   // order 22
  CHECK_THROWS_AS((GroupParams{23, 11, 1}).validate(), Error);
  CHECK_THROWS_AS((GroupParams{25, 11, 4}).validate(), Error);   // p composite
  CHECK_THROWS_AS((GroupParams{23, 7, 4}).validate(), Error);    // 7 does not divide 22
}

TEST_CASE("generate_params is deterministic and valid") {
  auto seed = as_bytes("unit-test-seed");
  auto a = generate_params(16, 64, seed);
  auto b = generate_params(16, 64, seed);
  CHECK(a == b);
  CHECK_NOTHROW(a.validate());
  CHECK(mpz_sizeinbase(a.q.get_mpz_t(), 2) == 16);
  CHECK(mpz_sizeinbase(a.p.get_mpz_t(), 2) == 64);
  auto c = generate_params(16, 64, as_bytes("other-seed"));
  CHECK_FALSE(a == c);
  CHECK_THROWS_AS(generate_params(16, 20, seed), Error);
}

TEST_CASE("shipped production parameters regenerate from their seed") {
  auto regenerated = generate_params(256, 2048, as_bytes(kProductionSeed));
  CHECK(regenerated == production_params());
}

TEST_CASE("params fingerprint matches reference SHA-256 of canonical JSON") {
  CHECK(toy().canonical_json() == R"({"g":"4","p":"17","q":"b"})");
  CHECK(to_hex(toy().fingerprint()) ==
        "37d7c87a8af06f6897633c167cf6fab6623fc7f1174a3350840c8e511e83a553");
  CHECK(to_hex(production_params().fingerprint()) ==
        "60fc1541b807c4ab16eafdd3a9248660c5aeb939ea772337cf83fd1341c2ce62");
  CHECK(GroupParams::from_json(production_params().to_json()) == production_params());
}

TEST_CASE("hash_to_scalar reference values and properties") {
  // Frozen from a Python hashlib reference.
  CHECK(hash_to_scalar(as_bytes("abc"), "lrs-c", toy()).value() == 8);
  CHECK(hash_to_scalar(as_bytes("abc"), "lrs-h", toy()).value() == 2);
  const auto& prod = production_params();
  auto c = hash_to_scalar(as_bytes("abc"), "lrs-c", prod);
  auto h = hash_to_scalar(as_bytes("abc"), "lrs-h", prod);
  CHECK(to_hex(c.value()) ==
        "954ae9fda5dc6ada2fbb657b2dbf09525854efc385472304c30a3678e5774181");
  CHECK(to_hex(h.value()) ==
        "17fa17ae92ec2a932c4ace2408b862a508205e3b15038aec022d530f8e5f7759");
  CHECK(c == hash_to_scalar(as_bytes("abc"), "lrs-c", prod));
  CHECK_FALSE(c == h);

  DeterministicRandom rng(1);
  for (int i = 0; i < 10000; ++i) {
    auto data = rng.bytes(1 + i % 40);
    CHECK(hash_to_scalar(data, "t", prod).value() < prod.q);
  }
}

TEST_CASE("hash_to_group reference values and membership") {
  auto h = hash_to_group(as_bytes("abc"), "lrs-h", toy());
  CHECK(h.value() == 12);
  CHECK(hash_to_group(as_bytes("mockbook:alice"), "ibe-qid", toy()).value() == 8);
  const auto& prod = production_params();
  auto hp = hash_to_group(as_bytes("abc"), "lrs-h", prod);
  CHECK(to_hex(sha256(hp.encode(prod))) ==
        "7bdd9183240efbcddc0bfb6d2dfe7b23c1bcd69885d109ea43ec63ad824d5c67");

  DeterministicRandom rng(2);
  for (int i = 0; i < 1000; ++i) {
    auto data = rng.bytes(16);
    auto e = hash_to_group(data, "t", prod);
    CHECK(in_subgroup(e.value(), prod));
    CHECK_FALSE(e.is_identity());
  }
  for (int i = 0; i < 200; ++i) {
    auto e = hash_to_group(rng.bytes(8), "t", toy());
    CHECK(oracle::powmod(e.value().get_ui(), 11, 23) == 1);
    CHECK(e.value() != 1);
  }
}

TEST_CASE("fixed-width codecs") {
  const auto& prod = production_params();
  auto s = random_scalar(system_random(), prod);
  auto enc = s.encode(prod);
  CHECK(enc.size() == 32);
  CHECK(Scalar::decode(enc, prod) == s);

  Bytes q_bytes = encode_fixed(prod.q, 32);
  CHECK_THROWS_AS(Scalar::decode(q_bytes, prod), Error);
  CHECK_THROWS_AS(Scalar::decode(Bytes(31, 0), prod), Error);

  auto y = exp(generator(prod), s, prod);
  auto yenc = y.encode(prod);
  CHECK(yenc.size() == 256);
  CHECK(GroupElement::decode(yenc, prod) == y);
  // p - 1 has order 2, never a member of the odd-order subgroup.
  CHECK_THROWS_AS(GroupElement::decode(encode_fixed(prod.p - 1, 256), prod), Error);
  CHECK_THROWS_AS(GroupElement::decode(encode_fixed(prod.p, 256), prod), Error);
  CHECK_THROWS_AS(encode_fixed(256, 1), Error);
}

TEST_CASE("scalar field arithmetic") {
  CHECK(add(toy_scalar(7), toy_scalar(6), toy()).value() == 2);
  CHECK(sub(toy_scalar(3), toy_scalar(5), toy()).value() == 9);
  CHECK(mul(toy_scalar(3), toy_scalar(5), toy()).value() == 4);
  for (unsigned a = 1; a < 11; ++a) {
    CHECK(inverse(toy_scalar(a), toy()).value() == oracle::invmod(a, 11));
  }
  CHECK_THROWS_AS(inverse(toy_scalar(0), toy()), Error);

  std::set<unsigned long> seen;
  DeterministicRandom rng(3);
  for (int i = 0; i < 500; ++i) seen.insert(random_scalar(rng, toy()).value().get_ui());
  CHECK(seen.size() == 11);
}
