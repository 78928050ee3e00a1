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

#include "anonkey/client.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <iterator>

#include "anonkey/error.hpp"
#include "anonkey/http.hpp"

namespace anonkey::client {

namespace fs = std::filesystem;

namespace {

constexpr Errc kKs = Errc::kKeyServerUnreachable;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs f(i) for every index concurrently and rethrows the first failure.
template <typename F>
auto parallel_map(std::size_t n, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<std::future<R>> futures;
  futures.reserve(n);
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, f, i));
  std::vector<R> out;
  out.reserve(n);
  std::exception_ptr first_error;
  for (auto& fut : futures) {
    try {
      out.push_back(fut.get());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace

keyserver::EpochInfo KeyServerClient::epoch() const {
  return keyserver::EpochInfo::from_json(http::get(url_, "/epoch", {}, kKs));
}

GroupElement KeyServerClient::pubkey(const IdentityRef& identity, const GroupParams& params,
                                     std::optional<std::uint64_t> epoch) const {
  std::map<std::string, std::string> query{{"provider", identity.provider},
                                           {"user_id", identity.user_id}};
  if (epoch) query["epoch"] = std::to_string(*epoch);
  auto j = http::get(url_, "/pubkey", query, kKs);
  try {
    return GroupElement::decode(from_hex(j.at("y_hex").get<std::string>()), params);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("pubkey response: ") + e.what());
  }
}

keyserver::ShareResponse KeyServerClient::share(std::span<const idp::IdpToken> tokens,
                                                const GroupParams& params,
                                                std::optional<std::uint64_t> epoch) const {
  nlohmann::json body = {{"tokens", nlohmann::json::array()}};
  for (const auto& t : tokens) body["tokens"].push_back(t.to_json());
  if (epoch) body["epoch"] = *epoch;
  return keyserver::ShareResponse::from_json(http::post(url_, "/share", body, kKs), params);
}

std::string KeyServerClient::invite(std::span<const IdentityRef> identities) const {
  nlohmann::json body = {{"identities", nlohmann::json::array()}};
  for (const auto& id : identities) body["identities"].push_back(id.to_json());
  return http::post(url_, "/invitations", body, kKs).at("batch_id").get<std::string>();
}

std::uint64_t KeyServerClient::rotate() const {
  return http::post(url_, "/rotate", nlohmann::json::object(), kKs).at("epoch").get<std::uint64_t>();
}

nlohmann::json KeyServerClient::outbox() const { return http::get(url_, "/outbox", {}, kKs); }

idp::IdpToken fetch_idp_token(const std::string& idp_url, const IdentityRef& identity,
                              const std::string& audience, std::int64_t ttl_seconds) {
  nlohmann::json body = {{"provider", identity.provider},
                         {"user_id", identity.user_id},
                         {"audience", audience},
                         {"ttl", ttl_seconds}};
  return idp::IdpToken::from_json(http::post(idp_url, "/token", body));
}

nlohmann::json AuthClient::challenge() const { return http::get(url_, "/challenge"); }

auth::AuthToken AuthClient::login(const std::string& challenge_id,
                                  std::span<const MemberRef> members, ByteView sig,
                                  const lrs::Ring& ring, const GroupParams& params) const {
  nlohmann::json body = {{"challenge_id", challenge_id},
                         {"identities", nlohmann::json::array()},
                         {"ring_keys", nlohmann::json::array()},
                         {"sig_hex", to_hex(sig)}};
  for (const auto& m : members) body["identities"].push_back(m.to_json());
  for (const auto& m : ring.members()) body["ring_keys"].push_back(to_hex(m.encode(params)));
  return auth::AuthToken::from_json(http::post(url_, "/login", body));
}

auth::AuthToken AuthClient::introspect(const std::string& token) const {
  auto t = auth::AuthToken::from_json(http::get(url_, "/introspect", {{"token", token}}));
  t.token = token;
  return t;
}

void AuthClient::block(const std::string& pseudonym) const {
  http::post(url_, "/admin/block", {{"pseudonym", pseudonym}});
}

void AuthClient::unblock(const std::string& pseudonym) const {
  http::post(url_, "/admin/unblock", {{"pseudonym", pseudonym}});
}

GroupElement HttpDirectory::composite_key(const IdentityRef& identity) {
  return composite_public_key(identity, servers_, params_);
}

nlohmann::json KeyringFile::to_json(const GroupParams& params) const {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& id : identities) ids.push_back(id.to_json());
  return {{"identities", ids},
          {"epoch", epoch},
          {"x_c", to_hex(x_c.encode(params))},
          {"Y_c", to_hex(y_c.encode(params))},
          {"servers_fingerprint", servers_fingerprint}};
}

KeyringFile KeyringFile::from_json(const nlohmann::json& j, const GroupParams& params) {
  try {
    KeyringFile k;
    for (const auto& id : j.at("identities")) k.identities.push_back(IdentityRef::from_json(id));
    k.epoch = j.at("epoch").get<std::uint64_t>();
    k.x_c = Scalar::decode(from_hex(j.at("x_c").get<std::string>()), params);
    k.y_c = GroupElement::decode(from_hex(j.at("Y_c").get<std::string>()), params);
    k.servers_fingerprint = j.at("servers_fingerprint").get<std::string>();
    if (group::exp_secret(group::generator(params), k.x_c, params) != k.y_c) {
      throw Error(Errc::kMalformedEncoding, "keyring private and public keys disagree");
    }
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("keyring: ") + e.what());
  }
}

void KeyringFile::save(const fs::path& path, const GroupParams& params) const {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot write " + tmp.string());
    ::chmod(tmp.c_str(), S_IRUSR | S_IWUSR);
    out << to_json(params).dump(2) << "\n";
    if (!out) throw Error(Errc::kIoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

KeyringFile KeyringFile::load(const fs::path& path, const GroupParams& params) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in), params);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("keyring: ") + e.what());
  }
}

std::string servers_fingerprint(std::vector<std::string> server_ids) {
  std::sort(server_ids.begin(), server_ids.end());
  Bytes buf;
  for (const auto& id : server_ids) {
    append(buf, id);
    buf.push_back('\n');
  }
  return to_hex(sha256(buf));
}

KeyringFile collect_key(std::span<const Credential> credentials,
                        std::span<const std::string> servers, const GroupParams& params,
                        CollectTimings* timings) {
  if (credentials.empty()) throw Error(Errc::kEmptyInput, "no credentials");
  if (servers.empty()) throw Error(Errc::kEmptyInput, "no key servers");
  std::vector<KeyServerClient> clients(servers.begin(), servers.end());

  auto infos = parallel_map(clients.size(), [&](std::size_t i) { return clients[i].epoch(); });
  const std::string fingerprint = to_hex(params.fingerprint());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < infos.size(); ++i) {
    if (infos[i].params_fingerprint != fingerprint) {
      throw Error(Errc::kServerInconsistency,
                  infos[i].server_id + " uses different group parameters");
    }
    ids.push_back(infos[i].server_id);
  }

  // One token per (provider, server); each is bound to that server's id.
  auto token_start = std::chrono::steady_clock::now();
  std::vector<std::vector<idp::IdpToken>> tokens(clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    for (const auto& cred : credentials) {
      tokens[i].push_back(fetch_idp_token(cred.idp_url, cred.identity, infos[i].server_id));
    }
  }
  double token_seconds = seconds_since(token_start);

  auto share_start = std::chrono::steady_clock::now();
  auto responses = parallel_map(clients.size(), [&](std::size_t i) {
    return clients[i].share(tokens[i], params);
  });
  double share_seconds = seconds_since(share_start);

  std::vector<IdentityRef> identities;
  for (const auto& cred : credentials) identities.push_back(cred.identity);
  const std::uint64_t epoch = responses.front().epoch;

  std::vector<Scalar> xs;
  std::vector<GroupElement> directory_parts;
  const auto g = group::generator(params);
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const auto& r = responses[i];
    const std::string& name = infos[i].server_id;
    if (r.epoch != epoch) {
      throw Error(Errc::kServerInconsistency, name + " is on epoch " + std::to_string(r.epoch) +
                                                  ", others on " + std::to_string(epoch));
    }
    if (r.shares.size() != identities.size()) {
      throw Error(Errc::kServerInconsistency, name + " returned the wrong number of shares");
    }
    for (const auto& id : identities) {
      auto it = std::find_if(r.shares.begin(), r.shares.end(),
                             [&](const auto& s) { return s.identity == id; });
      if (it == r.shares.end()) {
        throw Error(Errc::kServerInconsistency, name + " omitted " + id.to_string());
      }
      auto published = clients[i].pubkey(id, params, epoch);
      if (group::exp_secret(g, it->x, params) != published || it->y != published) {
        throw Error(Errc::kServerInconsistency,
                    name + " served a share inconsistent with its directory for " +
                        id.to_string());
      }
      xs.push_back(it->x);
      directory_parts.push_back(published);
    }
  }

  auto composite = keyshare::make_composite(xs, identities, epoch, params);
  if (composite.y_c != keyshare::combine_public(directory_parts, params)) {
    throw Error(Errc::kServerInconsistency, "composite key disagrees with the directory");
  }
  if (timings) *timings = {token_seconds, share_seconds};
  return {identities, epoch, composite.x_c, composite.y_c, servers_fingerprint(ids)};
}

GroupElement composite_public_key(const IdentityRef& identity,
                                  std::span<const std::string> servers,
                                  const GroupParams& params,
                                  std::optional<std::uint64_t> epoch) {
  if (servers.empty()) throw Error(Errc::kEmptyInput, "no key servers");
  auto parts = parallel_map(servers.size(), [&](std::size_t i) {
    return KeyServerClient(servers[i]).pubkey(identity, params, epoch);
  });
  return keyshare::combine_public(parts, params);
}

GroupElement member_public_key(const MemberRef& member, std::span<const std::string> servers,
                               const GroupParams& params,
                               std::optional<std::uint64_t> epoch) {
  member.validate();
  std::vector<GroupElement> parts;
  for (const auto& id : member.identities) {
    parts.push_back(composite_public_key(id, servers, params, epoch));
  }
  return keyshare::combine_public(parts, params);
}

lrs::Ring build_ring(std::span<const MemberRef> members,
                     std::span<const std::string> servers, const GroupParams& params,
                     std::optional<std::uint64_t> epoch) {
  std::vector<GroupElement> keys;
  for (const auto& m : members) keys.push_back(member_public_key(m, servers, params, epoch));
  return lrs::Ring::canonical(std::move(keys), params);
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

lrs::Signature sign_document(const fs::path& document, const lrs::Ring& ring,
                             const KeyringFile& keyring, ByteView scope,
                             const GroupParams& params, RandomSource& rng) {
  auto index = ring.index_of(keyring.y_c);
  if (!index) throw Error(Errc::kNotInRing, "you are not in your own anonymity set");
  Digest digest = sha256(read_file(document));
  return lrs::sign(digest, ring, *index, keyring.x_c, scope, params, rng);
}

DocumentVerdict verify_document(const fs::path& document, const lrs::Signature& sig,
                                const lrs::Ring& ring, const GroupParams& params) {
  Digest digest = sha256(read_file(document));
  auto result = lrs::verify(digest, ring, sig, params);
  return {result.accepted, result.tag, auth::pseudonym_of(result.tag, params)};
}

void write_signature_file(const fs::path& path, const lrs::Signature& sig,
                          const GroupParams& params) {
  Bytes data = lrs::to_detached(sig, params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

lrs::Signature read_signature_file(const fs::path& path, const GroupParams& params) {
  return lrs::from_detached(read_file(path), params);
}

auth::AuthToken login(const std::string& auth_url, std::span<const MemberRef> members,
                      const KeyringFile& keyring, std::span<const std::string> servers,
                      const GroupParams& params, RandomSource& rng) {
  AuthClient client(auth_url);
  auto challenge = client.challenge();
  Bytes nonce;
  std::string challenge_id;
  std::string scope;
  try {
    nonce = from_hex(challenge.at("nonce").get<std::string>());
    challenge_id = challenge.at("challenge_id").get<std::string>();
    scope = challenge.at("scope").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("challenge: ") + e.what());
  }
  auto ring = build_ring(members, servers, params);
  auto index = ring.index_of(keyring.y_c);
  if (!index) throw Error(Errc::kNotInRing, "you are not in your own anonymity set");
  auto sig = lrs::sign(nonce, ring, *index, keyring.x_c, as_bytes(scope), params, rng);
  return client.login(challenge_id, members, lrs::encode(sig, params), ring, params);
}

}  // namespace anonkey::client
