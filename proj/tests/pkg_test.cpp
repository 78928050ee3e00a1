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

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "anonkey/error.hpp"
#include "anonkey/keyshare.hpp"
#include "anonkey/pkg.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace anonkey;
using namespace anonkey::group;
using namespace anonkey::pkg;

namespace {

Scalar ts(unsigned v) { return Scalar::from_int(v, toy_params()); }

// All k-subsets of {0..n-1}.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) s.push_back(i);
    }
    out.push_back(s);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

}  // namespace

TEST_CASE("shamir shares of a fixed polynomial") {
  std::vector<Scalar> poly{ts(7), ts(3)};
  auto shares = shamir_share_polynomial(poly, 3, toy_params());
  REQUIRE(shares.size() == 3);
  CHECK(shares[0] == ShamirShare{1, ts(10)});
  CHECK(shares[1] == ShamirShare{2, ts(2)});
  CHECK(shares[2] == ShamirShare{3, ts(5)});
  for (unsigned i = 1; i <= 3; ++i) CHECK(shares[i - 1].value.value() == (7 + 3 * i) % 11);
}

TEST_CASE("degenerate thresholds") {
  DeterministicRandom rng(40);
  for (auto& s : shamir_share(ts(6), 1, 4, toy_params(), rng)) CHECK(s.value == ts(6));
  auto single = shamir_share(ts(9), 1, 1, toy_params(), rng);
  REQUIRE(single.size() == 1);
  CHECK(single[0].value == ts(9));
  CHECK_THROWS_AS(shamir_share(ts(1), 3, 2, toy_params(), rng), Error);
  CHECK_THROWS_AS(shamir_share(ts(1), 0, 2, toy_params(), rng), Error);
  CHECK_THROWS_AS(shamir_share(ts(1), 2, 11, toy_params(), rng), Error);
}

TEST_CASE("lagrange coefficients") {
  std::vector<std::uint64_t> idx{1, 2};
  CHECK(lagrange_coeff(idx, 1, toy_params()).value() == 2);
  CHECK(lagrange_coeff(idx, 2, toy_params()).value() == 10);
  CHECK(2 * oracle::invmod(1, 11) % 11 == 2);
  CHECK(1 * oracle::invmod(10, 11) % 11 == 10);
  std::vector<std::uint64_t> one{5};
  CHECK(lagrange_coeff(one, 5, toy_params()).value() == 1);
  CHECK_THROWS_AS(lagrange_coeff(idx, 3, toy_params()), Error);
  std::vector<std::uint64_t> clash{1, 12};  // 12 = 1 mod 11
  CHECK_THROWS_AS(lagrange_coeff(clash, 1, toy_params()), Error);
}

TEST_CASE("extract and recombine on the toy group") {
  keyshare::IdentityRef alice{"mockbook", "alice"};
  auto q_id = identity_point(alice, toy_params());
  CHECK(q_id.value() == 8);  // Python reference value

  // Q_ID = 18 via an explicit base.
  auto base = GroupElement::from_int(18, toy_params());
  CHECK(exp(base, ts(3), toy_params()).value() == 13);
  CHECK(oracle::powmod(18, 3, 23) == 13);

  auto shares = shamir_share_polynomial(std::vector<Scalar>{ts(7), ts(3)}, 3, toy_params());
  std::vector<PkgShareResponse> responses;
  for (const auto& s : shares) responses.push_back({s.index, exp(base, s.value, toy_params())});
  CHECK(oracle::powmod(18, 7, 23) == 6);
  CHECK(pkg_recombine(std::span(responses).first(2), 2, toy_params()).value() == 6);
  std::vector<PkgShareResponse> reversed{responses[2], responses[0]};
  CHECK(pkg_recombine(reversed, 2, toy_params()).value() == 6);
  try {
    pkg_recombine(std::span(responses).first(1), 2, toy_params());
    FAIL("expected threshold error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kThresholdNotMet);
  }
  std::vector<PkgShareResponse> dup{responses[0], responses[0]};
  CHECK_THROWS_AS(pkg_recombine(dup, 2, toy_params()), Error);

  auto zero = pkg_extract_share({4, ts(0)}, alice, toy_params());
  CHECK(zero.q_priv.is_identity());
  auto r1 = pkg_extract_share(shares[0], alice, toy_params());
  CHECK(r1.q_priv == exp(q_id, shares[0].value, toy_params()));
}

TEST_CASE("recombination is exhaustive over small thresholds") {
  keyshare::IdentityRef id{"mockpal", "bob"};
  const auto& toy = toy_params();
  auto q_id = identity_point(id, toy);
  DeterministicRandom rng(41);
  for (unsigned n = 1; n <= 4; ++n) {
    for (unsigned t = 1; t <= n; ++t) {
      for (unsigned secret = 0; secret <= 10; ++secret) {
        auto shares = shamir_share(ts(secret), t, n, toy, rng);
        auto expected = exp(q_id, ts(secret), toy);
        for (const auto& subset : subsets(n, t)) {
          std::vector<PkgShareResponse> rs;
          std::vector<ShamirShare> ss;
          for (auto i : subset) {
            rs.push_back(pkg_extract_share(shares[i], id, toy));
            ss.push_back(shares[i]);
          }
          CHECK(pkg_recombine(rs, t, toy) == expected);
          CHECK(shamir_reconstruct(ss, t, toy) == ts(secret));
        }
      }
    }
  }
}

TEST_CASE("one share of a 2-threshold sharing hides the secret") {
  // Fix share (1, v); every secret s has exactly one slope a with s + a = v.
  const auto& toy = toy_params();
  for (unsigned v = 0; v < 11; ++v) {
    std::map<unsigned long, int> polys_per_secret;
    for (unsigned s = 0; s < 11; ++s) {
      for (unsigned a = 0; a < 11; ++a) {
        auto shares = shamir_share_polynomial(std::vector<Scalar>{ts(s), ts(a)}, 2, toy);
        if (shares[0].value == ts(v)) polys_per_secret[s]++;
      }
    }
    CHECK(polys_per_secret.size() == 11);
    for (auto& [s, count] : polys_per_secret) CHECK(count == 1);
  }
}

TEST_CASE("n-of-n Shamir agrees with additive anytrust sharing") {
  const auto& prod = production_params();
  DeterministicRandom rng(42);
  keyshare::IdentityRef id{"mockbook", "carol"};
  auto q_id = identity_point(id, prod);
  std::vector<Scalar> additive;
  for (int i = 0; i < 3; ++i) additive.push_back(random_scalar(rng, prod));
  auto secret = keyshare::combine_private(additive, prod);

  std::vector<GroupElement> additive_parts;
  for (auto& a : additive) additive_parts.push_back(exp(q_id, a, prod));
  auto additive_result = keyshare::combine_public(additive_parts, prod);

  auto shares = shamir_share(secret, 3, 3, prod, rng);
  std::vector<PkgShareResponse> rs;
  for (auto& s : shares) rs.push_back(pkg_extract_share(s, id, prod));
  CHECK(pkg_recombine(rs, 3, prod) == additive_result);
}

TEST_CASE("share file round trip") {
  namespace fs = std::filesystem;
  auto path = fs::temp_directory_path() / ("anonkey-share-" + std::to_string(::getpid()) + ".json");
  ShareFile f{{2, ts(9)}, 2, 3};
  save_share_file(f, path, toy_params());
  auto loaded = load_share_file(path, toy_params());
  CHECK(loaded.share == f.share);
  CHECK(loaded.t == 2);
  CHECK(loaded.n == 3);
  fs::remove(path);
}
