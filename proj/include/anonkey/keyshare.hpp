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

#ifndef ANONKEY_KEYSHARE_HPP_
#define ANONKEY_KEYSHARE_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anonkey/bytes.hpp"
#include "anonkey/group.hpp"
#include "json.hpp"

// Anytrust key material. Each key server derives its share of a user's key
// from an epoch master secret; the client sums the shares of all servers (and
// of all linked identity providers) into one composite key.
namespace anonkey::keyshare {

using group::GroupElement;
using group::GroupParams;
using group::Scalar;

struct IdentityRef {
  std::string provider;
  std::string user_id;

  // Throws Error(kInvalidIdentity).
  void validate() const;
  // "provider:user_id"
  std::string to_string() const { return provider + ":" + user_id; }

  nlohmann::json to_json() const { return {{"provider", provider}, {"user_id", user_id}}; }
  static IdentityRef from_json(const nlohmann::json& j);

  auto operator<=>(const IdentityRef&) const = default;
};

// One ring member: a single identity, or several identities held by one
// person whose keys are combined (exponents added, public keys multiplied).
struct MemberRef {
  // Sorted, distinct, non-empty.
  std::vector<IdentityRef> identities;

  static MemberRef of(IdentityRef identity);
  // Throws Error(kInvalidIdentity) for an empty or repeating list.
  static MemberRef combined(std::vector<IdentityRef> identities);

  void validate() const;
  // "provider:user_id", joined with '+' when combined.
  std::string to_string() const;
  static MemberRef parse(std::string_view text);
  // A lone identity is an object, a combined member an array of them.
  nlohmann::json to_json() const;
  static MemberRef from_json(const nlohmann::json& j);

  auto operator<=>(const MemberRef&) const = default;
};

using MasterSecret = std::array<std::uint8_t, 32>;

struct KeyShare {
  std::string server_id;
  std::uint64_t epoch = 0;
  IdentityRef identity;
  Scalar x;
};

struct CompositeKey {
  Scalar x_c;
  GroupElement y_c;
  std::vector<IdentityRef> identities;
  std::uint64_t epoch = 0;
};

// x = hash_to_scalar(HMAC(master, epoch || provider || ":" || user_id || ctr),
// "share"), bumping ctr until x != 0.
KeyShare derive_share(const MasterSecret& master, std::uint64_t epoch,
                      const IdentityRef& identity, const GroupParams& params,
                      std::string server_id = {});

GroupElement public_share(const KeyShare& share, const GroupParams& params);

// Sum mod q. Throws Error(kEmptyInput).
Scalar combine_private(std::span<const Scalar> shares, const GroupParams& params);
// Product mod p. Throws Error(kEmptyInput).
GroupElement combine_public(std::span<const GroupElement> shares,
                            const GroupParams& params);

// Sums the shares and rejects a zero composite with Error(kZeroCompositeKey).
CompositeKey make_composite(std::span<const Scalar> shares,
                            std::vector<IdentityRef> identities, std::uint64_t epoch,
                            const GroupParams& params);

struct ArchiveEntry {
  std::uint64_t epoch = 0;
  IdentityRef identity;
  GroupElement y;
};

// A key server's master secret for the current epoch plus the append-only
// archive of public shares it has served. Not synchronized; the key server
// guards it.
class EpochState {
 public:
  EpochState(std::uint64_t epoch, const MasterSecret& secret);
  ~EpochState();
  EpochState(const EpochState&) = delete;
  EpochState& operator=(const EpochState&) = delete;
  EpochState(EpochState&& other) noexcept;
  EpochState& operator=(EpochState&& other) noexcept;

  std::uint64_t epoch() const { return epoch_; }

  // Throws Error(kEpochExpired) unless epoch is the current one.
  KeyShare derive(const IdentityRef& identity, std::uint64_t epoch,
                  const GroupParams& params, const std::string& server_id) const;

  std::optional<GroupElement> archived(std::uint64_t epoch,
                                       const IdentityRef& identity) const;
  // Returns false if the entry was already present. A conflicting value
  // throws Error(kInternal); the archive never changes an entry.
  bool record(std::uint64_t epoch, const IdentityRef& identity, const GroupElement& y);
  std::size_t archive_size() const { return archive_.size(); }
  std::vector<ArchiveEntry> archive_entries() const;

  // Advances the epoch and wipes the old secret. The archive is kept.
  void rotate(const MasterSecret& fresh_secret);

  const MasterSecret& master_secret() const { return secret_; }

 private:
  std::uint64_t epoch_;
  MasterSecret secret_;
  std::map<std::pair<std::uint64_t, IdentityRef>, GroupElement> archive_;
};

EpochState rotate_epoch(EpochState state, const MasterSecret& fresh_secret);

// {"epoch": n, "master_secret": hex}, written with mode 0600 via rename.
void save_epoch_state(const EpochState& state, const std::filesystem::path& path);
// Loads the secret and epoch; the archive is loaded separately.
EpochState load_epoch_state(const std::filesystem::path& path);

// One JSON object per line: {"epoch", "provider", "user_id", "y_hex"}.
void append_archive_line(const std::filesystem::path& path, const ArchiveEntry& entry,
                         const GroupParams& params);
std::vector<ArchiveEntry> read_archive(const std::filesystem::path& path,
                                       const GroupParams& params);

}  // namespace anonkey::keyshare

#endif  // ANONKEY_KEYSHARE_HPP_
