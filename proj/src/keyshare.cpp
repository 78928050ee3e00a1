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

#include "anonkey/keyshare.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <fstream>

#include "anonkey/error.hpp"

namespace anonkey::keyshare {

namespace fs = std::filesystem;

void IdentityRef::validate() const {
  if (provider.empty() || user_id.empty()) {
    throw Error(Errc::kInvalidIdentity, "provider and user_id must be non-empty");
  }
  if (provider.find(':') != std::string::npos) {
    throw Error(Errc::kInvalidIdentity, "provider may not contain ':'");
  }
}

IdentityRef IdentityRef::from_json(const nlohmann::json& j) {
  IdentityRef id;
  try {
    id.provider = j.at("provider").get<std::string>();
    id.user_id = j.at("user_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidIdentity, std::string("identity json: ") + e.what());
  }
  id.validate();
  return id;
}

MemberRef MemberRef::of(IdentityRef identity) {
  identity.validate();
  return {{std::move(identity)}};
}

MemberRef MemberRef::combined(std::vector<IdentityRef> identities) {
  std::sort(identities.begin(), identities.end());
  MemberRef m{std::move(identities)};
  m.validate();
  return m;
}

void MemberRef::validate() const {
  if (identities.empty()) throw Error(Errc::kInvalidIdentity, "member has no identities");
  for (std::size_t i = 0; i < identities.size(); ++i) {
    identities[i].validate();
    if (i > 0 && !(identities[i - 1] < identities[i])) {
      throw Error(Errc::kInvalidIdentity, "member identities must be sorted and distinct");
    }
  }
}

std::string MemberRef::to_string() const {
  std::string out;
  for (const auto& id : identities) {
    if (!out.empty()) out += '+';
    out += id.to_string();
  }
  return out;
}

MemberRef MemberRef::parse(std::string_view text) {
  std::vector<IdentityRef> ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t plus = text.find('+', start);
    std::string_view piece =
        text.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
    std::size_t colon = piece.find(':');
    if (colon == std::string_view::npos) {
      throw Error(Errc::kInvalidIdentity, "expected provider:user_id, got '" + std::string(piece) + "'");
    }
    ids.push_back({std::string(piece.substr(0, colon)), std::string(piece.substr(colon + 1))});
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return combined(std::move(ids));
}

nlohmann::json MemberRef::to_json() const {
  if (identities.size() == 1) return identities.front().to_json();
  nlohmann::json a = nlohmann::json::array();
  for (const auto& id : identities) a.push_back(id.to_json());
  return a;
}

MemberRef MemberRef::from_json(const nlohmann::json& j) {
  if (!j.is_array()) return of(IdentityRef::from_json(j));
  std::vector<IdentityRef> ids;
  for (const auto& e : j) ids.push_back(IdentityRef::from_json(e));
  // Combined members travel sorted; anything else is a malformed request.
  MemberRef m{std::move(ids)};
  m.validate();
  return m;
}

KeyShare derive_share(const MasterSecret& master, std::uint64_t epoch,
                      const IdentityRef& identity, const GroupParams& params,
                      std::string server_id) {
  identity.validate();
  Bytes input;
  append_u64_be(input, epoch);
  append(input, identity.provider);
  append(input, ":");
  append(input, identity.user_id);
  input.push_back(0);
  for (int ctr = 0; ctr < 256; ++ctr) {
    input.back() = static_cast<std::uint8_t>(ctr);
    Digest mac = hmac_sha256(master, input);
    Scalar x = group::hash_to_scalar(mac, "share", params);
    secure_wipe(mac);
    if (!x.is_zero()) {
      return KeyShare{std::move(server_id), epoch, identity, x};
    }
  }
  throw Error(Errc::kHashExhausted, "share derivation produced only zero scalars");
}

GroupElement public_share(const KeyShare& share, const GroupParams& params) {
  return group::exp_secret(group::generator(params), share.x, params);
}

Scalar combine_private(std::span<const Scalar> shares, const GroupParams& params) {
  if (shares.empty()) throw Error(Errc::kEmptyInput, "no private shares to combine");
  Scalar sum;
  for (const auto& s : shares) sum = group::add(sum, s, params);
  return sum;
}

GroupElement combine_public(std::span<const GroupElement> shares,
                            const GroupParams& params) {
  if (shares.empty()) throw Error(Errc::kEmptyInput, "no public shares to combine");
  GroupElement product;
  for (const auto& y : shares) product = group::mul(product, y, params);
  return product;
}

CompositeKey make_composite(std::span<const Scalar> shares,
                            std::vector<IdentityRef> identities, std::uint64_t epoch,
                            const GroupParams& params) {
  Scalar x = combine_private(shares, params);
  if (x.is_zero()) throw Error(Errc::kZeroCompositeKey, "composite private key is zero");
  GroupElement y = group::exp_secret(group::generator(params), x, params);
  return CompositeKey{x, y, std::move(identities), epoch};
}

EpochState::EpochState(std::uint64_t epoch, const MasterSecret& secret)
    : epoch_(epoch), secret_(secret) {}

EpochState::~EpochState() { secure_wipe(secret_); }

EpochState::EpochState(EpochState&& other) noexcept
    : epoch_(other.epoch_), secret_(other.secret_), archive_(std::move(other.archive_)) {
  secure_wipe(other.secret_);
}

EpochState& EpochState::operator=(EpochState&& other) noexcept {
  if (this != &other) {
    epoch_ = other.epoch_;
    secret_ = other.secret_;
    archive_ = std::move(other.archive_);
    secure_wipe(other.secret_);
  }
  return *this;
}

KeyShare EpochState::derive(const IdentityRef& identity, std::uint64_t epoch,
                            const GroupParams& params,
                            const std::string& server_id) const {
  if (epoch != epoch_) {
    throw Error(Errc::kEpochExpired,
                "private shares are only issued for epoch " + std::to_string(epoch_));
  }
  return derive_share(secret_, epoch_, identity, params, server_id);
}

std::optional<GroupElement> EpochState::archived(std::uint64_t epoch,
                                                 const IdentityRef& identity) const {
  auto it = archive_.find({epoch, identity});
  if (it == archive_.end()) return std::nullopt;
  return it->second;
}

bool EpochState::record(std::uint64_t epoch, const IdentityRef& identity,
                        const GroupElement& y) {
  auto [it, inserted] = archive_.try_emplace({epoch, identity}, y);
  if (!inserted && it->second != y) {
    throw Error(Errc::kInternal, "archive conflict for " + identity.to_string());
  }
  return inserted;
}

std::vector<ArchiveEntry> EpochState::archive_entries() const {
  std::vector<ArchiveEntry> out;
  out.reserve(archive_.size());
  for (const auto& [key, y] : archive_) out.push_back({key.first, key.second, y});
  return out;
}

void EpochState::rotate(const MasterSecret& fresh_secret) {
  secure_wipe(secret_);
  secret_ = fresh_secret;
  ++epoch_;
}

EpochState rotate_epoch(EpochState state, const MasterSecret& fresh_secret) {
  state.rotate(fresh_secret);
  return state;
}

void save_epoch_state(const EpochState& state, const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot write " + tmp.string());
    ::chmod(tmp.c_str(), S_IRUSR | S_IWUSR);
    nlohmann::json j = {{"epoch", state.epoch()},
                        {"master_secret", to_hex(state.master_secret())}};
    out << j.dump() << "\n";
    if (!out) throw Error(Errc::kIoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

EpochState load_epoch_state(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    Bytes secret = from_hex(j.at("master_secret").get<std::string>());
    if (secret.size() != MasterSecret{}.size()) {
      throw Error(Errc::kMalformedEncoding, "master secret must be 32 bytes");
    }
    MasterSecret ms{};
    std::copy(secret.begin(), secret.end(), ms.begin());
    secure_wipe(secret);
    EpochState state(j.at("epoch").get<std::uint64_t>(), ms);
    secure_wipe(ms);
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("epoch state: ") + e.what());
  }
}

void append_archive_line(const fs::path& path, const ArchiveEntry& entry,
                         const GroupParams& params) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(Errc::kIoError, "cannot append to " + path.string());
  nlohmann::json j = {{"epoch", entry.epoch},
                      {"provider", entry.identity.provider},
                      {"user_id", entry.identity.user_id},
                      {"y_hex", to_hex(entry.y.encode(params))}};
  out << j.dump() << "\n";
  out.flush();
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

std::vector<ArchiveEntry> read_archive(const fs::path& path, const GroupParams& params) {
  std::vector<ArchiveEntry> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ArchiveEntry e;
      e.epoch = j.at("epoch").get<std::uint64_t>();
      e.identity = IdentityRef{j.at("provider").get<std::string>(),
                               j.at("user_id").get<std::string>()};
      e.y = GroupElement::decode(from_hex(j.at("y_hex").get<std::string>()), params);
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kMalformedEncoding, "archive line: " + std::string(e.what()));
    }
  }
  return out;
}

}  // namespace anonkey::keyshare
