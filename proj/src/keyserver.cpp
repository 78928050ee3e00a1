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

#include "anonkey/keyserver.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>

#include "anonkey/error.hpp"

namespace anonkey::keyserver {

namespace fs = std::filesystem;

namespace {

keyshare::MasterSecret fresh_secret(RandomSource& rng) {
  keyshare::MasterSecret ms{};
  rng.fill(ms);
  return ms;
}

keyshare::EpochState initial_state(const ServerConfig& config, RandomSource& rng) {
  if (!config.epoch_state_path.empty() && fs::exists(config.epoch_state_path)) {
    return keyshare::load_epoch_state(config.epoch_state_path);
  }
  auto ms = fresh_secret(rng);
  keyshare::EpochState state(0, ms);
  secure_wipe(ms);
  if (!config.epoch_state_path.empty()) {
    keyshare::save_epoch_state(state, config.epoch_state_path);
  }
  return state;
}

std::string scalar_hex(const Scalar& s, const GroupParams& params) {
  return to_hex(s.encode(params));
}

std::string element_hex(const GroupElement& y, const GroupParams& params) {
  return to_hex(y.encode(params));
}

}  // namespace

ServerConfig ServerConfig::from_json(const nlohmann::json& j) {
  try {
    ServerConfig c;
    c.server_id = j.at("server_id").get<std::string>();
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.params_path = j.value("params", std::string());
    if (j.contains("provider_secrets")) {
      c.provider_secrets = idp::ProviderSecrets::from_json(j.at("provider_secrets"));
    }
    c.epoch_state_path = j.value("epoch_state", std::string());
    c.archive_path = j.value("archive", std::string());
    c.outbox_path = j.value("outbox", std::string());
    c.invitation_cap = j.value("invitation_cap", c.invitation_cap);
    c.invitation_window_cap = j.value("invitation_window_cap", c.invitation_window_cap);
    c.invitation_window_seconds =
        j.value("invitation_window_seconds", c.invitation_window_seconds);
    c.require_same_display_name =
        j.value("require_same_display_name", c.require_same_display_name);
    if (c.server_id.empty()) throw Error(Errc::kInvalidArgument, "server_id is empty");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("server config: ") + e.what());
  }
}

ServerConfig ServerConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("server config: ") + e.what());
  }
}

nlohmann::json Invitation::to_json() const {
  return {{"batch_id", batch_id},
          {"provider", identity.provider},
          {"user_id", identity.user_id},
          {"url_token", to_hex(url_token)},
          {"created_at", created_at}};
}

nlohmann::json ShareResponse::to_json(const GroupParams& params) const {
  nlohmann::json shares_json = nlohmann::json::array();
  for (const auto& s : shares) {
    shares_json.push_back({{"provider", s.identity.provider},
                           {"user_id", s.identity.user_id},
                           {"x_hex", scalar_hex(s.x, params)},
                           {"y_hex", element_hex(s.y, params)}});
  }
  return {{"server_id", server_id}, {"epoch", epoch}, {"shares", shares_json}};
}

ShareResponse ShareResponse::from_json(const nlohmann::json& j, const GroupParams& params) {
  try {
    ShareResponse r;
    r.server_id = j.at("server_id").get<std::string>();
    r.epoch = j.at("epoch").get<std::uint64_t>();
    for (const auto& s : j.at("shares")) {
      r.shares.push_back(
          {IdentityRef{s.at("provider").get<std::string>(), s.at("user_id").get<std::string>()},
           Scalar::decode(from_hex(s.at("x_hex").get<std::string>()), params),
           GroupElement::decode(from_hex(s.at("y_hex").get<std::string>()), params)});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("share response: ") + e.what());
  }
}

nlohmann::json EpochInfo::to_json() const {
  return {{"server_id", server_id}, {"epoch", epoch}, {"params_fingerprint", params_fingerprint}};
}

EpochInfo EpochInfo::from_json(const nlohmann::json& j) {
  try {
    return {j.at("server_id").get<std::string>(), j.at("epoch").get<std::uint64_t>(),
            j.at("params_fingerprint").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("epoch info: ") + e.what());
  }
}

KeyServer::KeyServer(ServerConfig config, GroupParams params, RandomSource& rng,
                     idp::Clock clock)
    : config_(std::move(config)),
      params_(std::move(params)),
      fingerprint_(to_hex(params_.fingerprint())),
      rng_(rng),
      clock_(std::move(clock)),
      state_(initial_state(config_, rng)) {
  if (!config_.archive_path.empty()) {
    for (const auto& e : keyshare::read_archive(config_.archive_path, params_)) {
      state_.record(e.epoch, e.identity, e.y);
    }
  }
}

GroupElement KeyServer::record_locked(std::uint64_t epoch, const IdentityRef& identity,
                                      const GroupElement& y) {
  if (state_.record(epoch, identity, y) && !config_.archive_path.empty()) {
    keyshare::append_archive_line(config_.archive_path, {epoch, identity, y}, params_);
  }
  return y;
}

std::string KeyServer::request_invitations(std::span<const IdentityRef> identities) {
  if (identities.empty()) throw Error(Errc::kEmptyInput, "no identities to invite");
  for (const auto& id : identities) id.validate();
  if (identities.size() > config_.invitation_cap) {
    throw Error(Errc::kRateLimited, "at most " + std::to_string(config_.invitation_cap) +
                                        " invitations per request");
  }
  const std::int64_t now = clock_();
  std::unique_lock lock(mu_);
  while (!invitation_times_.empty() &&
         invitation_times_.front() <= now - config_.invitation_window_seconds) {
    invitation_times_.pop_front();
  }
  if (invitation_times_.size() + identities.size() > config_.invitation_window_cap) {
    throw Error(Errc::kRateLimited, "server invitation budget exhausted");
  }

  std::string batch_id = to_hex(rng_.bytes(16));
  std::vector<Invitation> batch;
  for (const auto& id : identities) batch.push_back({batch_id, id, rng_.bytes(16), now});
  if (!config_.outbox_path.empty()) {
    std::ofstream out(config_.outbox_path, std::ios::app);
    if (!out) throw Error(Errc::kIoError, "cannot append to outbox");
    for (const auto& inv : batch) out << inv.to_json().dump() << "\n";
    out.flush();
    if (!out) throw Error(Errc::kIoError, "short write to outbox");
  }
  for (auto& inv : batch) {
    outbox_.push_back(std::move(inv));
    invitation_times_.push_back(now);
  }
  return batch_id;
}

ShareResponse KeyServer::get_private_share(std::span<const idp::IdpToken> tokens,
                                           std::optional<std::uint64_t> epoch) {
  if (tokens.empty()) throw Error(Errc::kEmptyInput, "no identity tokens presented");
  const std::int64_t now = clock_();
  std::vector<IdentityRef> identities;
  std::set<std::string> display_names;
  for (const auto& token : tokens) {
    auto id = idp::verify_token(config_.provider_secrets, token, config_.server_id, now);
    if (std::find(identities.begin(), identities.end(), id) == identities.end()) {
      identities.push_back(id);
    }
    display_names.insert(token.display_name);
  }
  if (config_.require_same_display_name && display_names.size() > 1) {
    throw Error(Errc::kForbidden, "linked accounts carry different display names");
  }

  std::unique_lock lock(mu_);
  const std::uint64_t current = state_.epoch();
  ShareResponse response{config_.server_id, current, {}};
  for (const auto& id : identities) {
    auto share = state_.derive(id, epoch.value_or(current), params_, config_.server_id);
    response.shares.push_back({id, share.x, keyshare::public_share(share, params_)});
  }
  for (const auto& grant : response.shares) record_locked(current, grant.identity, grant.y);
  return response;
}

GroupElement KeyServer::get_public_share(const IdentityRef& identity,
                                         std::optional<std::uint64_t> epoch) {
  identity.validate();
  std::unique_lock lock(mu_);
  const std::uint64_t current = state_.epoch();
  if (epoch && *epoch != current) {
    if (auto y = state_.archived(*epoch, identity)) return *y;
    throw Error(Errc::kUnknownArchivedKey, identity.to_string() + " has no archived key for epoch " +
                                               std::to_string(*epoch));
  }
  if (auto y = state_.archived(current, identity)) return *y;
  auto share = state_.derive(identity, current, params_, config_.server_id);
  return record_locked(current, identity, keyshare::public_share(share, params_));
}

EpochInfo KeyServer::epoch_info() const {
  std::shared_lock lock(mu_);
  return {config_.server_id, state_.epoch(), fingerprint_};
}

std::uint64_t KeyServer::rotate() {
  auto ms = fresh_secret(rng_);
  std::unique_lock lock(mu_);
  state_.rotate(ms);
  secure_wipe(ms);
  if (!config_.epoch_state_path.empty()) {
    keyshare::save_epoch_state(state_, config_.epoch_state_path);
  }
  return state_.epoch();
}

std::vector<Invitation> KeyServer::outbox() const {
  std::shared_lock lock(mu_);
  return outbox_;
}

nlohmann::json KeyServer::state_snapshot() const {
  std::shared_lock lock(mu_);
  nlohmann::json archive = nlohmann::json::array();
  for (const auto& e : state_.archive_entries()) {
    archive.push_back({{"epoch", e.epoch},
                       {"provider", e.identity.provider},
                       {"user_id", e.identity.user_id},
                       {"y_hex", element_hex(e.y, params_)}});
  }
  nlohmann::json outbox = nlohmann::json::array();
  for (const auto& inv : outbox_) outbox.push_back(inv.to_json());
  return {{"server_id", config_.server_id},
          {"epoch", state_.epoch()},
          {"archive", archive},
          {"outbox", outbox}};
}

namespace {

bool is_loopback(const std::string& addr) {
  return addr == "127.0.0.1" || addr == "::1" || addr == "::ffff:127.0.0.1";
}

IdentityRef identity_param(const http::Request& req) {
  auto provider = req.param("provider");
  auto user = req.param("user_id");
  if (!provider || !user) throw Error(Errc::kInvalidArgument, "provider and user_id required");
  IdentityRef id{*provider, *user};
  id.validate();
  return id;
}

std::optional<std::uint64_t> epoch_param(const std::optional<std::string>& raw) {
  if (!raw || raw->empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    auto v = std::stoull(*raw, &used);
    if (used != raw->size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::kInvalidArgument, "epoch must be an unsigned integer");
  }
}

}  // namespace

void register_routes(http::Server& server, KeyServer& ks) {
  server.route("POST", "/invitations", [&ks](const http::Request& req) {
    auto body = req.json();
    std::vector<IdentityRef> ids;
    if (!body.contains("identities") || !body["identities"].is_array()) {
      throw Error(Errc::kInvalidArgument, "identities array required");
    }
    for (const auto& j : body["identities"]) ids.push_back(IdentityRef::from_json(j));
    return nlohmann::json{{"batch_id", ks.request_invitations(ids)}};
  });

  server.route("POST", "/share", [&ks](const http::Request& req) {
    auto body = req.json();
    if (!body.contains("tokens") || !body["tokens"].is_array()) {
      throw Error(Errc::kInvalidArgument, "tokens array required");
    }
    std::vector<idp::IdpToken> tokens;
    for (const auto& j : body["tokens"]) tokens.push_back(idp::IdpToken::from_json(j));
    std::optional<std::uint64_t> epoch;
    if (body.contains("epoch") && !body["epoch"].is_null()) {
      if (!body["epoch"].is_number_unsigned()) {
        throw Error(Errc::kInvalidArgument, "epoch must be an unsigned integer");
      }
      epoch = body["epoch"].get<std::uint64_t>();
    }
    return ks.get_private_share(tokens, epoch).to_json(ks.params());
  });

  server.route("GET", "/pubkey", [&ks](const http::Request& req) {
    auto id = identity_param(req);
    auto epoch = epoch_param(req.param("epoch"));
    auto y = ks.get_public_share(id, epoch);
    return nlohmann::json{{"provider", id.provider},
                          {"user_id", id.user_id},
                          {"epoch", epoch.value_or(ks.epoch_info().epoch)},
                          {"y_hex", element_hex(y, ks.params())}};
  });

  server.route("GET", "/epoch", [&ks](const http::Request&) { return ks.epoch_info().to_json(); });

  server.route("POST", "/rotate", [&ks](const http::Request& req) {
    if (!is_loopback(req.remote_addr)) throw Error(Errc::kForbidden, "rotate is local-only");
    return nlohmann::json{{"epoch", ks.rotate()}};
  });

  server.route("GET", "/outbox", [&ks](const http::Request& req) {
    if (!is_loopback(req.remote_addr)) throw Error(Errc::kForbidden, "outbox is local-only");
    nlohmann::json out = nlohmann::json::array();
    for (const auto& inv : ks.outbox()) out.push_back(inv.to_json());
    return out;
  });
}

}  // namespace anonkey::keyserver
