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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "anonkey/auth.hpp"
#include "anonkey/client.hpp"
#include "anonkey/error.hpp"
#include "anonkey/http.hpp"
#include "anonkey/idp.hpp"
#include "anonkey/keyserver.hpp"
#include "anonkey/lrs.hpp"
#include "doctest.h"

using namespace anonkey;
using namespace anonkey::auth;
using group::GroupParams;
using group::Scalar;
using group::production_params;
using group::toy_params;

namespace fs = std::filesystem;

namespace {

// Directory with fixed keys, standing in for the key servers.
class MapDirectory final : public PublicKeyDirectory {
 public:
  std::map<IdentityRef, GroupElement> keys;
  GroupElement composite_key(const IdentityRef& id) override {
    auto it = keys.find(id);
    if (it == keys.end()) throw Error(Errc::kKeyServerUnreachable, "no key for " + id.to_string());
    return it->second;
  }
};

struct User {
  IdentityRef id;
  Scalar x;
  GroupElement y;
};

struct Fixture {
  const GroupParams& params;
  MapDirectory directory;
  std::vector<User> users;
  std::int64_t now = 1000;

  Fixture(const GroupParams& p, std::size_t n, std::uint64_t seed) : params(p) {
    DeterministicRandom rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      Scalar x = group::random_nonzero_scalar(rng, params);
      users.push_back({{"mockbook", "u" + std::to_string(i)}, x,
                       group::exp(group::generator(params), x, params)});
      directory.keys[users.back().id] = users.back().y;
    }
  }

  // Distinct keys only; callers pick users with distinct scalars on toy.
  AuthProvider provider(AuthConfig config = {}) {
    return AuthProvider(std::move(config), params, directory, system_random(),
                        [this] { return now; });
  }

  std::vector<MemberRef> members(const std::vector<std::size_t>& idx) const {
    std::vector<MemberRef> out;
    for (auto i : idx) out.push_back(MemberRef::of(users[i].id));
    return out;
  }

  lrs::Ring ring(const std::vector<std::size_t>& idx) const {
    std::vector<GroupElement> keys;
    for (auto i : idx) keys.push_back(users[i].y);
    return lrs::Ring::canonical(keys, params);
  }

  Bytes sign(AuthProvider& p, const Challenge& c, const std::vector<std::size_t>& idx,
             std::size_t signer, RandomSource& rng = system_random()) const {
    auto r = ring(idx);
    auto sig = lrs::sign(c.nonce, r, *r.index_of(users[signer].y), users[signer].x, p.scope(),
                         params, rng);
    return lrs::encode(sig, params);
  }

  AuthToken login(AuthProvider& p, const std::vector<std::size_t>& idx, std::size_t signer) const {
    auto c = p.create_challenge();
    return p.verify_login(to_hex(c.id), members(idx), sign(p, c, idx, signer));
  }
};

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::kInternal;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("anonkey-auth-" + to_hex(system_random().bytes(6)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::set<std::string> keys_of(const nlohmann::json& j) {
  std::set<std::string> out;
  for (const auto& [k, v] : j.items()) out.insert(k);
  return out;
}

}  // namespace

TEST_CASE("pseudonym is the hex SHA-256 of the encoded tag") {
  const auto& p = toy_params();
  auto tag = GroupElement::from_int(12, p);
  // sha256(b"\x0c")
  CHECK(pseudonym_of(tag, p) == "ef6cbd2161eaea7943ce8693b9824d23d1793ffb1c0fca05b600d3899b44c977");
}

TEST_CASE("challenges are fresh, readable and expire") {
  Fixture f(production_params(), 2, 1);
  AuthConfig cfg;
  cfg.challenge_ttl_seconds = 300;
  auto p = f.provider(cfg);
  auto a = p.create_challenge();
  auto b = p.create_challenge();
  CHECK(a.id.size() == 16);
  CHECK(a.nonce.size() == 32);
  CHECK(a.nonce != b.nonce);
  CHECK(a.id != b.id);
  CHECK(a.expires_at - a.issued_at == 300);
  CHECK(p.find_challenge(to_hex(a.id)).has_value());
  f.now += 300;
  CHECK_FALSE(p.find_challenge(to_hex(a.id)).has_value());
}

TEST_CASE("honest login and introspection") {
  Fixture f(production_params(), 4, 2);
  auto p = f.provider();
  CHECK(p.config().effective_scope() == "auth:service");
  auto t = f.login(p, {0, 1, 2}, 1);
  CHECK(t.token.size() == 64);
  CHECK(t.pseudonym.size() == 64);
  CHECK(t.issued_at == 1000);
  auto seen = p.introspect(t.token);
  CHECK(seen.pseudonym == t.pseudonym);
  auto expected = f.members({0, 1, 2});
  CHECK(seen.ring_identities == expected);
  CHECK(p.introspect(t.token).introspection_json() == seen.introspection_json());
  CHECK(code_of([&] { p.introspect(to_hex(system_random().bytes(32))); }) ==
        Errc::kUnknownToken);

  auto again = f.login(p, {1, 3}, 1);
  CHECK(again.pseudonym == t.pseudonym);
  CHECK(again.token != t.token);
  CHECK(f.login(p, {0, 1, 2}, 2).pseudonym != t.pseudonym);
}

TEST_CASE("challenge misuse is reported precisely") {
  Fixture f(production_params(), 2, 3);
  auto p = f.provider();
  auto c = p.create_challenge();
  auto sig = f.sign(p, c, {0, 1}, 0);
  auto members = f.members({0, 1});

  CHECK(code_of([&] { p.verify_login(to_hex(system_random().bytes(16)), members, sig); }) ==
        Errc::kUnknownChallenge);
  CHECK(code_of([&] { p.verify_login("zz", members, sig); }) == Errc::kUnknownChallenge);
  CHECK_NOTHROW(p.verify_login(to_hex(c.id), members, sig));
  CHECK(code_of([&] { p.verify_login(to_hex(c.id), members, sig); }) ==
        Errc::kChallengeConsumed);

  auto late = p.create_challenge();
  auto late_sig = f.sign(p, late, {0, 1}, 0);
  f.now += 300;
  CHECK(code_of([&] { p.verify_login(to_hex(late.id), members, late_sig); }) ==
        Errc::kChallengeExpired);
}

TEST_CASE("forged and mismatched signatures") {
  Fixture f(production_params(), 3, 4);
  auto p = f.provider();
  auto members = f.members({0, 1});

  SUBCASE("signature over another nonce") {
    auto c = p.create_challenge();
    auto other = p.create_challenge();
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), members, f.sign(p, other, {0, 1}, 0)); }) ==
          Errc::kSignatureInvalid);
  }
  SUBCASE("wrong scope") {
    auto c = p.create_challenge();
    auto r = f.ring({0, 1});
    auto sig = lrs::sign(c.nonce, r, *r.index_of(f.users[0].y), f.users[0].x,
                         as_bytes(std::string_view("auth:elsewhere")), f.params, system_random());
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), members, lrs::encode(sig, f.params)); }) ==
          Errc::kSignatureInvalid);
  }
  SUBCASE("ring of invented keys") {
    auto c = p.create_challenge();
    Scalar x = group::random_nonzero_scalar(system_random(), f.params);
    std::vector<GroupElement> fake{group::exp(group::generator(f.params), x, f.params), f.users[1].y};
    auto r = lrs::Ring::canonical(fake, f.params);
    auto sig = lrs::sign(c.nonce, r, *r.index_of(fake[0]), x, p.scope(), f.params, system_random());
    auto bytes = lrs::encode(sig, f.params);
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), members, bytes, fake); }) ==
          Errc::kRingMismatch);
    // Without the client's key list the forgery still fails verification.
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), members, bytes); }) ==
          Errc::kSignatureInvalid);
  }
  SUBCASE("signature for a differently sized ring") {
    auto c = p.create_challenge();
    auto sig = f.sign(p, c, {0, 1, 2}, 0);
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), members, sig); }) == Errc::kRingMismatch);
  }
  SUBCASE("garbage signature bytes") {
    auto c = p.create_challenge();
    Bytes junk(10, 0xab);
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), members, junk); }) ==
          Errc::kMalformedEncoding);
  }
  SUBCASE("bad anonymity sets") {
    auto c = p.create_challenge();
    auto sig = f.sign(p, c, {0, 1}, 0);
    std::vector<MemberRef> none;
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), none, sig); }) == Errc::kEmptyInput);
    auto dup = f.members({0, 0});
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), dup, sig); }) == Errc::kInvalidArgument);
    std::vector<MemberRef> unknown{MemberRef::of({"mockbook", "ghost"}), members[0]};
    CHECK(code_of([&] { p.verify_login(to_hex(c.id), unknown, sig); }) ==
          Errc::kKeyServerUnreachable);
    AuthConfig small;
    small.max_ring_size = 1;
    auto q = f.provider(small);
    auto c2 = q.create_challenge();
    CHECK(code_of([&] { q.verify_login(to_hex(c2.id), members, f.sign(q, c2, {0, 1}, 0)); }) ==
          Errc::kInvalidArgument);
  }
  // Failed attempts never consume the challenge or issue tokens.
  CHECK(p.token_count() == 0);
}

TEST_CASE("blocking a pseudonym") {
  Fixture f(production_params(), 3, 5);
  auto p = f.provider();
  auto first = f.login(p, {0, 1, 2}, 0);
  auto bystander = f.login(p, {0, 1, 2}, 1);

  p.block(first.pseudonym);
  p.block(first.pseudonym);
  CHECK(p.is_blocked(first.pseudonym));
  CHECK(code_of([&] { p.introspect(first.token); }) == Errc::kUnknownToken);
  CHECK_NOTHROW(p.introspect(bystander.token));
  CHECK(code_of([&] { f.login(p, {0, 1, 2}, 0); }) == Errc::kPseudonymBlocked);
  // Changing the anonymity set does not escape the block.
  CHECK(code_of([&] { f.login(p, {0, 2}, 0); }) == Errc::kPseudonymBlocked);
  CHECK(f.login(p, {0, 1, 2}, 2).pseudonym != first.pseudonym);

  p.unblock(first.pseudonym);
  p.unblock(first.pseudonym);
  CHECK(f.login(p, {0, 1, 2}, 0).pseudonym == first.pseudonym);

  CHECK(code_of([&] { p.block("not-hex"); }) == Errc::kInvalidArgument);
  CHECK(code_of([&] { p.block(std::string(64, 'G')); }) == Errc::kInvalidArgument);
}

TEST_CASE("pseudonym stability across 100 logins") {
  Fixture f(production_params(), 6, 6);
  auto p = f.provider();
  std::set<std::string> seen;
  DeterministicRandom pick(60);
  for (int i = 0; i < 100; ++i) {
    // User 0 plus a varying subset of the others.
    std::vector<std::size_t> idx{0};
    auto mask = pick.bytes(1)[0];
    for (std::size_t j = 1; j < f.users.size(); ++j) {
      if (mask & (1u << j)) idx.push_back(j);
    }
    seen.insert(f.login(p, idx, 0).pseudonym);
  }
  CHECK(seen.size() == 1);
}

TEST_CASE("Sybil bound, exhaustive on the toy group") {
  // Keys g^1..g^10: every non-identity element once.
  const auto& params = toy_params();
  MapDirectory dir;
  std::vector<User> users;
  for (std::uint64_t x = 1; x <= 10; ++x) {
    auto sx = Scalar::from_int(x, params);
    users.push_back({{"toy", "u" + std::to_string(x)}, sx,
                     group::exp(group::generator(params), sx, params)});
    dir.keys[users.back().id] = users.back().y;
  }
  AuthProvider p(AuthConfig{}, params, dir);
  std::map<std::size_t, std::set<std::string>> by_user;
  std::size_t rings = 0;
  DeterministicRandom rng(61);
  for (unsigned mask = 1; mask < (1u << 10); ++mask) {
    if (__builtin_popcount(mask) > 4) continue;
    ++rings;
    std::vector<std::size_t> idx;
    std::vector<MemberRef> members;
    std::vector<GroupElement> keys;
    for (std::size_t i = 0; i < 10; ++i) {
      if (mask & (1u << i)) {
        idx.push_back(i);
        members.push_back(MemberRef::of(users[i].id));
        keys.push_back(users[i].y);
      }
    }
    auto ring = lrs::Ring::canonical(keys, params);
    std::set<std::string> in_ring;
    for (auto i : idx) {
      auto c = p.create_challenge();
      auto sig = lrs::sign(c.nonce, ring, *ring.index_of(users[i].y), users[i].x, p.scope(),
                           params, rng);
      auto t = p.verify_login(to_hex(c.id), members, lrs::encode(sig, params));
      by_user[i].insert(t.pseudonym);
      in_ring.insert(t.pseudonym);
    }
    CHECK(in_ring.size() == idx.size());
  }
  CHECK(rings == 385);
  std::set<std::string> all;
  for (const auto& [i, ps] : by_user) {
    CHECK(ps.size() == 1);
    all.insert(ps.begin(), ps.end());
  }
  CHECK(all.size() == 10);
}

TEST_CASE("racing logins on one challenge: exactly one wins") {
  Fixture f(production_params(), 3, 7);
  auto p = f.provider();
  auto c = p.create_challenge();
  auto members = f.members({0, 1, 2});
  std::vector<Bytes> sigs;
  for (std::size_t i = 0; i < 8; ++i) sigs.push_back(f.sign(p, c, {0, 1, 2}, i % 3));

  std::atomic<int> wins{0}, consumed{0}, other{0};
  std::atomic<bool> go{false};
  std::vector<std::thread> threads;
  for (const auto& sig : sigs) {
    threads.emplace_back([&, sig] {
      while (!go.load()) std::this_thread::yield();
      try {
        p.verify_login(to_hex(c.id), members, sig);
        ++wins;
      } catch (const Error& e) {
        (e.code() == Errc::kChallengeConsumed ? consumed : other)++;
      }
    });
  }
  go = true;
  for (auto& t : threads) t.join();
  CHECK(wins == 1);
  CHECK(consumed == 7);
  CHECK(other == 0);
  CHECK(p.token_count() == 1);
}

TEST_CASE("stored records carry nothing beyond the pseudonym") {
  TempDir dir;
  Fixture f(production_params(), 3, 8);
  AuthConfig cfg;
  cfg.token_log_path = dir.path / "tokens.jsonl";
  cfg.blocklist_log_path = dir.path / "blocklist.jsonl";
  auto p = f.provider(cfg);

  http::Server server;
  register_routes(server, p);
  server.bind("127.0.0.1", 0);
  server.start();

  auto ch = http::get(server.url(), "/challenge");
  CHECK(keys_of(ch) ==
        std::set<std::string>{"challenge_id", "expires_at", "issued_at", "nonce", "scope"});
  CHECK(ch["scope"] == "auth:service");
  auto c = *p.find_challenge(ch["challenge_id"].get<std::string>());
  auto sig = f.sign(p, c, {0, 1, 2}, 1);
  nlohmann::json body = {{"challenge_id", ch["challenge_id"]},
                         {"identities", nlohmann::json::array()},
                         {"sig_hex", to_hex(sig)}};
  for (const auto& m : f.members({0, 1, 2})) body["identities"].push_back(m.to_json());
  auto login = http::post(server.url(), "/login", body);
  CHECK(keys_of(login) ==
        std::set<std::string>{"issued_at", "pseudonym", "ring_identities", "token"});
  auto view = http::get(server.url(), "/introspect", {{"token", login["token"]}});
  CHECK(keys_of(view) == std::set<std::string>{"issued_at", "pseudonym", "ring_identities"});

  // Signer-specific material that must never be persisted or echoed.
  const auto& signer = f.users[1];
  std::vector<std::string> secrets = {to_hex(signer.x.encode(f.params)),
                                      to_hex(signer.y.encode(f.params)), signer.id.user_id};
  auto tag = lrs::decode(sig, f.params).tag;
  secrets.push_back(to_hex(tag.encode(f.params)));
  std::ifstream in(cfg.token_log_path);
  std::string log((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (const auto& text : {login.dump(), view.dump(), log}) {
    CHECK(text.find(secrets[0]) == std::string::npos);
    CHECK(text.find(secrets[1]) == std::string::npos);
    CHECK(text.find(secrets[3]) == std::string::npos);
    CHECK(text.find("signer") == std::string::npos);
    CHECK(text.find("index") == std::string::npos);
  }
  // The signer's name appears only as one of the anonymity set, never alone.
  CHECK(login["ring_identities"].size() == 3);

  CHECK(code_of([&] { http::get(server.url(), "/introspect"); }) == Errc::kInvalidArgument);
  CHECK(code_of([&] { http::post(server.url(), "/login", {{"challenge_id", "00"}}); }) ==
        Errc::kInvalidArgument);
  server.stop();
}

TEST_CASE("logs are replayed at startup") {
  TempDir dir;
  Fixture f(production_params(), 3, 9);
  AuthConfig cfg;
  cfg.token_log_path = dir.path / "tokens.jsonl";
  cfg.blocklist_log_path = dir.path / "blocklist.jsonl";
  std::string kept, revoked, blocked_p, unblocked_p;
  {
    auto p = f.provider(cfg);
    kept = f.login(p, {0, 1, 2}, 0).token;
    auto t1 = f.login(p, {0, 1, 2}, 1);
    revoked = t1.token;
    blocked_p = t1.pseudonym;
    p.block(blocked_p);
    unblocked_p = f.login(p, {0, 1, 2}, 2).pseudonym;
    p.block(unblocked_p);
    p.unblock(unblocked_p);
  }
  auto p = f.provider(cfg);
  CHECK(p.introspect(kept).ring_identities.size() == 3);
  CHECK(code_of([&] { p.introspect(revoked); }) == Errc::kUnknownToken);
  CHECK(p.is_blocked(blocked_p));
  CHECK_FALSE(p.is_blocked(unblocked_p));
  CHECK(p.token_count() == 1);
}

TEST_CASE("server-side reconstruction from live key servers") {
  idp::ProviderSecrets ps;
  ps.add("mockbook", Bytes(32, 1));
  std::vector<std::unique_ptr<keyserver::KeyServer>> servers;
  std::vector<keyserver::KeyServer*> raw;
  for (int i = 0; i < 3; ++i) {
    keyserver::ServerConfig c;
    c.server_id = "ks" + std::to_string(i + 1);
    c.provider_secrets = ps;
    servers.push_back(std::make_unique<keyserver::KeyServer>(c, production_params()));
    raw.push_back(servers.back().get());
  }
  LocalDirectory dir(raw);
  AuthProvider p(AuthConfig{}, production_params(), dir);
  const auto& params = production_params();
  std::vector<IdentityRef> ids{{"mockbook", "alice"}, {"mockbook", "bob"}};

  // Alice collects her shares directly.
  std::vector<Scalar> xs;
  for (auto* ks : raw) {
    std::vector<idp::IdpToken> tokens{idp::issue_token(ps, "mockbook", "alice", "Alice",
                                                       ks->config().server_id, 60,
                                                       idp::unix_now())};
    xs.push_back(ks->get_private_share(tokens).shares[0].x);
  }
  auto composite = keyshare::make_composite(xs, {ids[0]}, 0, params);
  CHECK(composite.y_c == dir.composite_key(ids[0]));

  std::vector<GroupElement> keys{composite.y_c, dir.composite_key(ids[1])};
  auto ring = lrs::Ring::canonical(keys, params);
  auto c = p.create_challenge();
  auto sig = lrs::sign(c.nonce, ring, *ring.index_of(composite.y_c), composite.x_c, p.scope(),
                       params, system_random());
  std::vector<MemberRef> members{MemberRef::of(ids[0]), MemberRef::of(ids[1])};
  auto t = p.verify_login(to_hex(c.id), members, lrs::encode(sig, params), keys);
  CHECK(t.pseudonym == pseudonym_of(lrs::linkage_tag(composite.x_c, p.scope(), params), params));
}

TEST_CASE("unreachable directory surfaces as its own error") {
  Fixture f(production_params(), 2, 10);
  client::HttpDirectory dead({"http://127.0.0.1:1"}, production_params());
  AuthProvider p(AuthConfig{}, production_params(), dead);
  auto c = p.create_challenge();
  auto sig = f.sign(p, c, {0, 1}, 0);
  CHECK(code_of([&] { p.verify_login(to_hex(c.id), f.members({0, 1}), sig); }) ==
        Errc::kKeyServerUnreachable);
}

TEST_CASE("member references") {
  auto m = MemberRef::parse("mockpal:alice+mockbook:alice");
  CHECK(m.identities.size() == 2);
  CHECK(m.to_string() == "mockbook:alice+mockpal:alice");
  CHECK(MemberRef::from_json(m.to_json()) == m);
  auto single = MemberRef::parse("mockbook:bob");
  CHECK(single.to_json() == IdentityRef{"mockbook", "bob"}.to_json());
  CHECK(code_of([] { MemberRef::parse("nocolon"); }) == Errc::kInvalidIdentity);
  CHECK(code_of([] { MemberRef::parse("a:b+a:b"); }) == Errc::kInvalidIdentity);
  CHECK(code_of([] { MemberRef::from_json(nlohmann::json::array()); }) ==
        Errc::kInvalidIdentity);
}
