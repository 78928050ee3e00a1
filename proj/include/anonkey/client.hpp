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

#ifndef ANONKEY_CLIENT_HPP_
#define ANONKEY_CLIENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonkey/auth.hpp"
#include "anonkey/group.hpp"
#include "anonkey/idp.hpp"
#include "anonkey/keyserver.hpp"
#include "anonkey/keyshare.hpp"
#include "anonkey/lrs.hpp"
#include "anonkey/random.hpp"
#include "json.hpp"

namespace anonkey::client {

using group::GroupElement;
using group::GroupParams;
using group::Scalar;
using keyshare::IdentityRef;
using keyshare::MemberRef;

class KeyServerClient {
 public:
  explicit KeyServerClient(std::string url) : url_(std::move(url)) {}
  const std::string& url() const { return url_; }

  keyserver::EpochInfo epoch() const;
  GroupElement pubkey(const IdentityRef& identity, const GroupParams& params,
                      std::optional<std::uint64_t> epoch = std::nullopt) const;
  keyserver::ShareResponse share(std::span<const idp::IdpToken> tokens,
                                 const GroupParams& params,
                                 std::optional<std::uint64_t> epoch = std::nullopt) const;
  std::string invite(std::span<const IdentityRef> identities) const;
  std::uint64_t rotate() const;
  nlohmann::json outbox() const;

 private:
  std::string url_;
};

idp::IdpToken fetch_idp_token(const std::string& idp_url, const IdentityRef& identity,
                              const std::string& audience, std::int64_t ttl_seconds = 600);

class AuthClient {
 public:
  explicit AuthClient(std::string url) : url_(std::move(url)) {}
  const std::string& url() const { return url_; }

  nlohmann::json challenge() const;
  auth::AuthToken login(const std::string& challenge_id,
                        std::span<const MemberRef> members, ByteView sig,
                        const lrs::Ring& ring, const GroupParams& params) const;
  auth::AuthToken introspect(const std::string& token) const;
  void block(const std::string& pseudonym) const;
  void unblock(const std::string& pseudonym) const;

 private:
  std::string url_;
};

// Directory backed by key servers over HTTP.
class HttpDirectory final : public auth::PublicKeyDirectory {
 public:
  HttpDirectory(std::vector<std::string> servers, GroupParams params)
      : servers_(std::move(servers)), params_(std::move(params)) {}
  GroupElement composite_key(const IdentityRef& identity) override;

 private:
  std::vector<std::string> servers_;
  GroupParams params_;
};

// Private composite key file. Written with mode 0600.
struct KeyringFile {
  std::vector<IdentityRef> identities;
  std::uint64_t epoch = 0;
  Scalar x_c;
  GroupElement y_c;
  std::string servers_fingerprint;

  nlohmann::json to_json(const GroupParams& params) const;
  // Throws Error(kMalformedEncoding) unless g^x_c = Y_c.
  static KeyringFile from_json(const nlohmann::json& j, const GroupParams& params);
  void save(const std::filesystem::path& path, const GroupParams& params) const;
  static KeyringFile load(const std::filesystem::path& path, const GroupParams& params);

  // The ring member this key signs as.
  MemberRef member() const { return MemberRef::combined(identities); }
};

struct Credential {
  IdentityRef identity;
  std::string idp_url;
};

struct CollectTimings {
  double token_seconds = 0;
  double share_seconds = 0;
};

// SHA-256 over the sorted server ids, hex.
std::string servers_fingerprint(std::vector<std::string> server_ids);

// One audience-bound token per (provider, server), shares fetched from every
// server concurrently, summed across servers and providers, and checked
// against the servers' public directories. Any failure aborts.
KeyringFile collect_key(std::span<const Credential> credentials,
                        std::span<const std::string> servers, const GroupParams& params,
                        CollectTimings* timings = nullptr);

GroupElement composite_public_key(const IdentityRef& identity,
                                  std::span<const std::string> servers,
                                  const GroupParams& params,
                                  std::optional<std::uint64_t> epoch = std::nullopt);

// Product over the member's identities.
GroupElement member_public_key(const MemberRef& member, std::span<const std::string> servers,
                               const GroupParams& params,
                               std::optional<std::uint64_t> epoch = std::nullopt);

lrs::Ring build_ring(std::span<const MemberRef> members,
                     std::span<const std::string> servers, const GroupParams& params,
                     std::optional<std::uint64_t> epoch = std::nullopt);

// Signs SHA-256 of the file contents. Throws Error(kNotInRing) when the
// keyring's public key is not a ring member.
lrs::Signature sign_document(const std::filesystem::path& document, const lrs::Ring& ring,
                             const KeyringFile& keyring, ByteView scope,
                             const GroupParams& params, RandomSource& rng);

struct DocumentVerdict {
  bool accepted = false;
  GroupElement tag;
  std::string pseudonym;
};

DocumentVerdict verify_document(const std::filesystem::path& document,
                                const lrs::Signature& sig, const lrs::Ring& ring,
                                const GroupParams& params);

void write_signature_file(const std::filesystem::path& path, const lrs::Signature& sig,
                          const GroupParams& params);
lrs::Signature read_signature_file(const std::filesystem::path& path,
                                   const GroupParams& params);

// Challenge, sign the nonce under the service scope, submit.
auth::AuthToken login(const std::string& auth_url, std::span<const MemberRef> members,
                      const KeyringFile& keyring, std::span<const std::string> servers,
                      const GroupParams& params, RandomSource& rng = system_random());

Bytes read_file(const std::filesystem::path& path);

}  // namespace anonkey::client

#endif  // ANONKEY_CLIENT_HPP_
