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

#include <filesystem>
#include <set>

#include "anonkey/error.hpp"
#include "anonkey/keyshare.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace anonkey;
using namespace anonkey::group;
using namespace anonkey::keyshare;

namespace {

MasterSecret counting_secret() {
  MasterSecret ms{};
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i] = static_cast<std::uint8_t>(i);
  return ms;
}

const IdentityRef kAlice{"mockbook", "alice"};

}  // namespace

TEST_CASE("derive_share matches the HMAC reference") {
  const auto& prod = production_params();
  auto ms = counting_secret();
  // Frozen from a Python hmac/hashlib reference.
  CHECK(to_hex(derive_share(ms, 0, kAlice, prod).x.value()) ==
        "39d77c5a5b2c62074ec81e12afb361af755910faf3296047b837f3c41235c81a");
  CHECK(to_hex(derive_share(ms, 1, kAlice, prod).x.value()) ==
        "921d1ee38c170e8ff4e0dd21e057866d5e83e237da1e4c49a253c4b3230241cc");
  CHECK(to_hex(derive_share(ms, 0, {"mockpal", "alice"}, prod).x.value()) ==
        "6110dbc30f26a1437c04884c8e08f526dbbecc70964f8310b251178690517e7a");
  CHECK(derive_share(ms, 0, kAlice, toy_params()).x.value() == 4);
  CHECK(derive_share(ms, 1, kAlice, toy_params()).x.value() == 3);
}

TEST_CASE("derive_share is a pure function") {
  const auto& prod = production_params();
  auto ms = counting_secret();
  auto first = derive_share(ms, 7, kAlice, prod, "ks1");
  CHECK(first.server_id == "ks1");
  CHECK(first.epoch == 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(derive_share(ms, 7, kAlice, prod).x == first.x);
  }
}

TEST_CASE("derive_share never yields zero on the toy field") {
  DeterministicRandom rng(30);
  for (int i = 0; i < 2000; ++i) {
    MasterSecret ms{};
    rng.fill(ms);
    auto share = derive_share(ms, i, {"p", "u" + std::to_string(i)}, toy_params());
    CHECK_FALSE(share.x.is_zero());
  }
}

TEST_CASE("identity validation") {
  CHECK_THROWS_AS(IdentityRef({"", "a"}).validate(), Error);
  CHECK_THROWS_AS(IdentityRef({"a", ""}).validate(), Error);
  CHECK_THROWS_AS(IdentityRef({"a:b", "c"}).validate(), Error);
  CHECK_NOTHROW(IdentityRef({"a", "b:c"}).validate());
  CHECK(IdentityRef::from_json(kAlice.to_json()) == kAlice);
}

TEST_CASE("public share on the toy group") {
  KeyShare share{"ks", 0, kAlice, Scalar::from_int(7, toy_params())};
  CHECK(public_share(share, toy_params()).value() == 8);
  CHECK(oracle::powmod(4, 7, 23) == 8);
}

TEST_CASE("combining shares on the toy group") {
  const auto& toy = toy_params();
  std::vector<Scalar> xs{Scalar::from_int(3, toy), Scalar::from_int(5, toy),
                         Scalar::from_int(4, toy)};
  CHECK(combine_private(xs, toy).value() == 1);
  std::vector<GroupElement> ys{GroupElement::from_int(18, toy), GroupElement::from_int(12, toy),
                               GroupElement::from_int(3, toy)};
  CHECK(combine_public(ys, toy).value() == 4);
  CHECK((18 * 12 * 3) % 23 == 4);
  CHECK(combine_private(std::vector<Scalar>{xs[0]}, toy) == xs[0]);
  CHECK(combine_public(std::vector<GroupElement>{ys[1]}, toy) == ys[1]);
  CHECK_THROWS_AS(combine_private({}, toy), Error);
  CHECK_THROWS_AS(combine_public({}, toy), Error);

  std::vector<Scalar> wrap{Scalar::from_int(3, toy), Scalar::from_int(8, toy)};
  CHECK(combine_private(wrap, toy).is_zero());
  try {
    make_composite(wrap, {kAlice}, 0, toy);
    FAIL("expected zero composite");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kZeroCompositeKey);
  }
  auto c = make_composite(xs, {kAlice}, 2, toy);
  CHECK(c.x_c.value() == 1);
  CHECK(c.y_c.value() == 4);
}

TEST_CASE("anytrust identity holds exhaustively for pairs and randomly at scale") {
  const auto& toy = toy_params();
  const auto g = generator(toy);
  for (unsigned a = 0; a < 11; ++a) {
    for (unsigned b = 0; b < 11; ++b) {
      std::vector<Scalar> xs{Scalar::from_int(a, toy), Scalar::from_int(b, toy)};
      std::vector<GroupElement> ys{exp(g, xs[0], toy), exp(g, xs[1], toy)};
      CHECK(combine_public(ys, toy) == exp(g, Scalar::reduce(a + b, toy), toy));
    }
  }
  const auto& prod = production_params();
  DeterministicRandom rng(31);
  for (std::size_t k = 1; k <= 5; ++k) {
    std::vector<Scalar> xs;
    std::vector<GroupElement> ys;
    for (std::size_t i = 0; i < k; ++i) {
      xs.push_back(random_scalar(rng, prod));
      ys.push_back(exp(generator(prod), xs.back(), prod));
    }
    CHECK(exp(generator(prod), combine_private(xs, prod), prod) == combine_public(ys, prod));
  }
}

TEST_CASE("a withheld share leaves every composite possible") {
  // Fixing the n - 1 known shares, the withheld share maps bijectively onto
  // the composite key, so the known shares say nothing about it.
  const auto& toy = toy_params();
  std::vector<Scalar> known{Scalar::from_int(2, toy), Scalar::from_int(9, toy)};
  std::set<unsigned long> composites;
  for (unsigned w = 0; w < 11; ++w) {
    auto all = known;
    all.push_back(Scalar::from_int(w, toy));
    composites.insert(combine_private(all, toy).value().get_ui());
  }
  CHECK(composites.size() == 11);
}

TEST_CASE("epoch rotation expires private shares and keeps the archive") {
  const auto& toy = toy_params();
  EpochState state(0, counting_secret());
  auto share = state.derive(kAlice, 0, toy, "ks1");
  auto y = public_share(share, toy);
  CHECK(state.record(0, kAlice, y));
  CHECK_FALSE(state.record(0, kAlice, y));
  CHECK_THROWS_AS(state.record(0, kAlice, mul(y, generator(toy), toy)), Error);
  auto before = state.archive_entries();

  MasterSecret fresh{};
  fresh.fill(0xab);
  state = rotate_epoch(std::move(state), fresh);
  CHECK(state.epoch() == 1);
  CHECK(state.master_secret() == fresh);
  try {
    state.derive(kAlice, 0, toy, "ks1");
    FAIL("expected epoch expiry");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEpochExpired);
  }
  CHECK(state.archived(0, kAlice) == y);
  CHECK_FALSE(state.archived(1, kAlice).has_value());
  auto after = state.archive_entries();
  CHECK(after.size() >= before.size());
  CHECK(after[0].y == before[0].y);
}

TEST_CASE("epoch state and archive persistence") {
  namespace fs = std::filesystem;
  const auto& prod = production_params();
  auto dir = fs::temp_directory_path() / ("anonkey-keyshare-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  EpochState state(3, counting_secret());
  save_epoch_state(state, dir / "epoch.json");
  auto perms = fs::status(dir / "epoch.json").permissions();
  CHECK((perms & (fs::perms::group_all | fs::perms::others_all)) == fs::perms::none);
  auto loaded = load_epoch_state(dir / "epoch.json");
  CHECK(loaded.epoch() == 3);
  CHECK(loaded.master_secret() == state.master_secret());

  auto y = public_share(state.derive(kAlice, 3, prod, "ks"), prod);
  append_archive_line(dir / "archive.jsonl", {3, kAlice, y}, prod);
  append_archive_line(dir / "archive.jsonl", {3, {"mockpal", "bob"}, y}, prod);
  auto entries = read_archive(dir / "archive.jsonl", prod);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].identity == kAlice);
  CHECK(entries[0].y == y);
  CHECK(read_archive(dir / "missing.jsonl", prod).empty());
  fs::remove_all(dir);
}
