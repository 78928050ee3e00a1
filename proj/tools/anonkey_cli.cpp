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

// anonkey command-line frontend.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "anonkey/bench.hpp"
#include "anonkey/client.hpp"
#include "anonkey/error.hpp"
#include "anonkey/group.hpp"
#include "anonkey/harness.hpp"
#include "anonkey/lrs.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using anonkey::Errc;
using anonkey::Error;
using anonkey::keyshare::IdentityRef;
using anonkey::keyshare::MemberRef;
using nlohmann::json;

namespace {

// Stable exit codes, one per error class.
enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kUnreachable = 3,
  kRejected = 4,
  kAuthDenied = 5,
  kKeyMaterial = 6,
  kMalformed = 7,
  kRateLimited = 8,
};

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::kInvalidArgument:
    case Errc::kEmptyInput:
    case Errc::kInvalidIdentity:
      return kUsage;
    case Errc::kKeyServerUnreachable:
    case Errc::kServiceUnreachable:
      return kUnreachable;
    case Errc::kSignatureInvalid:
    case Errc::kRingMismatch:
    case Errc::kSignerMismatch:
    case Errc::kScopeMismatch:
      return kRejected;
    case Errc::kUnknownProvider:
    case Errc::kBadMac:
    case Errc::kAudienceMismatch:
    case Errc::kTokenExpired:
    case Errc::kUnknownChallenge:
    case Errc::kChallengeExpired:
    case Errc::kChallengeConsumed:
    case Errc::kPseudonymBlocked:
    case Errc::kUnknownToken:
    case Errc::kForbidden:
      return kAuthDenied;
    case Errc::kEpochExpired:
    case Errc::kUnknownArchivedKey:
    case Errc::kZeroCompositeKey:
    case Errc::kThresholdNotMet:
    case Errc::kServerInconsistency:
    case Errc::kNotInRing:
    case Errc::kHashExhausted:
    case Errc::kParamSearchFailed:
      return kKeyMaterial;
    case Errc::kMalformedEncoding:
    case Errc::kIoError:
    case Errc::kNotFound:
      return kMalformed;
    case Errc::kRateLimited:
      return kRateLimited;
    default:
      return kInternal;
  }
}

struct Globals {
  std::string config;
  std::string params;
  std::string servers;
  std::string scope;
  bool json = false;
};

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedEncoding, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

// Deployment file written by harness-up, or {}.
json deployment(const Globals& g) {
  return g.config.empty() ? json::object() : load_json(g.config);
}

anonkey::group::GroupParams resolve_params(const Globals& g) {
  if (!g.params.empty()) return anonkey::group::load_params(g.params);
  auto d = deployment(g);
  if (d.contains("params")) return anonkey::group::GroupParams::from_json(d.at("params"));
  return anonkey::group::production_params();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> resolve_servers(const Globals& g) {
  std::vector<std::string> servers;
  if (!g.servers.empty()) {
    servers = split_commas(g.servers);
  } else {
    auto d = deployment(g);
    if (d.contains("servers")) servers = d.at("servers").get<std::vector<std::string>>();
  }
  if (servers.empty()) throw Error(Errc::kInvalidArgument, "no key servers (use --servers or --config)");
  return servers;
}

std::string resolve_auth(const Globals& g, const std::string& flag) {
  if (!flag.empty()) return flag;
  auto d = deployment(g);
  if (d.contains("auth")) return d.at("auth").get<std::string>();
  throw Error(Errc::kInvalidArgument, "no auth provider (use --auth or --config)");
}

IdentityRef parse_identity(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw Error(Errc::kInvalidIdentity, "expected provider:user_id, got '" + s + "'");
  }
  IdentityRef id{s.substr(0, colon), s.substr(colon + 1)};
  id.validate();
  return id;
}

std::vector<IdentityRef> parse_identities(const std::vector<std::string>& raw) {
  std::vector<IdentityRef> out;
  for (const auto& r : raw) {
    for (const auto& piece : split_commas(r)) out.push_back(parse_identity(piece));
  }
  return out;
}

// Members are comma-separated; a combined member joins identities with '+'.
std::vector<MemberRef> parse_members(const std::vector<std::string>& raw) {
  std::vector<MemberRef> out;
  for (const auto& r : raw) {
    for (const auto& piece : split_commas(r)) out.push_back(MemberRef::parse(piece));
  }
  return out;
}

void warn_small_ring(std::size_t n) {
  if (n == 1) std::cerr << "warning: ring of size 1 gives no anonymity\n";
}

void emit(const Globals& g, const json& j, const std::string& human) {
  if (g.json) {
    std::cout << j.dump() << "\n";
  } else {
    std::cout << human;
  }
}

template <typename T>
std::string ring_listing(const std::vector<T>& ids) {
  std::string out = "anonymity set (" + std::to_string(ids.size()) + "):\n";
  for (const auto& id : ids) out += "  " + id.to_string() + "\n";
  return out;
}

template <typename T>
json identities_json(const std::vector<T>& ids) {
  json a = json::array();
  for (const auto& id : ids) a.push_back(id.to_string());
  return a;
}

// harness-up blocks here until SIGINT or SIGTERM.
int serve_harness(anonkey::harness::HarnessOptions opts, const anonkey::group::GroupParams& params,
                  const fs::path& out, const fs::path& pidfile, bool quiet) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  anonkey::harness::Harness h(std::move(opts), params);
  h.start();
  auto d = h.deployment();
  write_text(out, d.dump(2) + "\n");
  if (!pidfile.empty()) write_text(pidfile, std::to_string(::getpid()) + "\n");
  if (!quiet) std::cout << d.dump(2) << "\n" << std::flush;

  int sig = 0;
  sigwait(&set, &sig);
  h.stop();
  if (!pidfile.empty()) fs::remove(pidfile);
  return kOk;
}

bool process_alive(pid_t pid) { return ::kill(pid, 0) == 0; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anonkey: anonymous keys from federated identities"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Deployment JSON written by harness-up");
  app.add_option("--params", g.params, "Group parameter JSON");
  app.add_option("--servers", g.servers, "Comma-separated key server URLs");
  app.add_option("--scope", g.scope, "Linkability scope for sign/verify");
  app.add_flag("--json", g.json, "Machine-readable output");

  // params-gen
  auto* params_gen = app.add_subcommand("params-gen", "Generate or export group parameters");
  std::string pg_preset, pg_seed = std::string(anonkey::group::kProductionSeed), pg_out;
  unsigned pg_q = 256, pg_p = 2048;
  params_gen->add_option("--preset", pg_preset, "production or toy")
      ->check(CLI::IsMember({"production", "toy"}));
  params_gen->add_option("--q-bits", pg_q, "Subgroup order bits");
  params_gen->add_option("--p-bits", pg_p, "Modulus bits");
  params_gen->add_option("--seed", pg_seed, "Generation seed");
  params_gen->add_option("--out", pg_out, "Write to file instead of stdout");

  // harness-up / harness-down
  auto* harness_up = app.add_subcommand("harness-up", "Boot a local deployment");
  std::size_t hu_n = 3;
  std::vector<std::string> hu_providers{"mockbook", "mockpal"};
  std::optional<std::uint64_t> hu_seed;
  std::string hu_state, hu_out = "deployment.json", hu_pid = "harness.pid", hu_service = "demo";
  int hu_port = 0;
  bool hu_detach = false;
  harness_up->add_option("-n,--count", hu_n, "Number of key servers")->check(CLI::Range(1, 64));
  harness_up->add_option("--providers", hu_providers, "Mock provider names")->delimiter(',');
  harness_up->add_option("--epoch-seed", hu_seed, "Deterministic secrets");
  harness_up->add_option("--state-dir", hu_state, "Persist state here");
  harness_up->add_option("--out", hu_out, "Deployment JSON path");
  harness_up->add_option("--pidfile", hu_pid, "Pid file path");
  harness_up->add_option("--service", hu_service, "Auth service name");
  harness_up->add_option("--base-port", hu_port, "First port; 0 picks free ports");
  harness_up->add_flag("--detach", hu_detach, "Run in the background");

  auto* harness_down = app.add_subcommand("harness-down", "Stop a deployment");
  std::string hd_pid = "harness.pid";
  harness_down->add_option("--pidfile", hd_pid, "Pid file path");

  // invite
  auto* invite = app.add_subcommand("invite", "Queue invitations at every key server");
  std::vector<std::string> inv_ids;
  invite->add_option("--identity", inv_ids, "provider:user_id")->required();

  // collect-key
  auto* collect = app.add_subcommand("collect-key", "Fetch and combine private shares");
  std::vector<std::string> ck_ids, ck_idps;
  std::string ck_out = "keyring.json";
  collect->add_option("--identity", ck_ids, "provider:user_id, one per provider")->required();
  collect->add_option("--idp", ck_idps, "provider=url overrides");
  collect->add_option("--out", ck_out, "Keyring path");

  // pubkey
  auto* pubkey = app.add_subcommand("pubkey", "Composite public key for an identity");
  std::string pk_id;
  std::optional<std::uint64_t> pk_epoch;
  pubkey->add_option("--identity", pk_id, "provider:user_id")->required();
  pubkey->add_option("--epoch", pk_epoch, "Archived epoch");

  // ring-build
  auto* ring_build = app.add_subcommand("ring-build", "Build a canonical ring");
  std::vector<std::string> rb_ids;
  std::optional<std::uint64_t> rb_epoch;
  ring_build->add_option("--member", rb_ids, "provider:user_id[+provider:user_id]")->required();
  ring_build->add_option("--epoch", rb_epoch, "Archived epoch");

  // sign
  auto* sign = app.add_subcommand("sign", "Sign a document");
  std::string sg_file, sg_keyring = "keyring.json", sg_out;
  std::vector<std::string> sg_ids;
  sign->add_option("--file", sg_file, "Document")->required();
  sign->add_option("--keyring", sg_keyring, "Keyring path");
  sign->add_option("--member", sg_ids, "Ring member provider:user_id[+...]")->required();
  sign->add_option("--out", sg_out, "Signature path (default <file>.sig)");

  // verify
  auto* verify = app.add_subcommand("verify", "Verify a detached document signature");
  std::string vf_file, vf_sig;
  std::vector<std::string> vf_ids;
  std::optional<std::uint64_t> vf_epoch;
  verify->add_option("--file", vf_file, "Document")->required();
  verify->add_option("--sig", vf_sig, "Signature path (default <file>.sig)");
  verify->add_option("--member", vf_ids, "Ring member provider:user_id[+...]")->required();
  verify->add_option("--epoch", vf_epoch, "Verify against archived keys of this epoch");

  // login
  auto* login = app.add_subcommand("login", "Log in to the auth provider");
  std::string lg_keyring = "keyring.json", lg_auth;
  std::vector<std::string> lg_ids;
  login->add_option("--keyring", lg_keyring, "Keyring path");
  login->add_option("--member", lg_ids, "Anonymity set member provider:user_id[+...]")->required();
  login->add_option("--auth", lg_auth, "Auth provider URL");

  // introspect
  auto* introspect = app.add_subcommand("introspect", "Look up a bearer token");
  std::string is_token, is_auth;
  introspect->add_option("--token", is_token, "Bearer token")->required();
  introspect->add_option("--auth", is_auth, "Auth provider URL");

  // block
  auto* block = app.add_subcommand("block", "Block or unblock a pseudonym");
  std::string bl_pseudonym, bl_auth;
  bool bl_unblock = false;
  block->add_option("--pseudonym", bl_pseudonym, "64 hex chars")->required();
  block->add_option("--auth", bl_auth, "Auth provider URL");
  block->add_flag("--unblock", bl_unblock, "Lift the block");

  // rotate
  auto* rotate = app.add_subcommand("rotate", "Rotate every key server's epoch");

  // bench
  auto* bench = app.add_subcommand("bench", "Time sign and verify against ring size");
  std::vector<std::size_t> bn_sizes{16, 32, 64, 128, 256, 512, 1024};
  std::size_t bn_reps = 5;
  std::string bn_json, bn_csv;
  bench->add_option("--sizes", bn_sizes, "Ring sizes")->delimiter(',');
  bench->add_option("--reps", bn_reps, "Repetitions per size");
  bench->add_option("--json-out", bn_json, "Write the report JSON here");
  bench->add_option("--csv-out", bn_csv, "Write plot-ready CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*params_gen) {
      anonkey::group::GroupParams p;
      if (pg_preset == "toy") {
        p = anonkey::group::toy_params();
      } else if (pg_preset == "production") {
        p = anonkey::group::production_params();
      } else {
        p = anonkey::group::generate_params(pg_q, pg_p, anonkey::as_bytes(pg_seed));
      }
      if (pg_out.empty()) {
        std::cout << p.to_json().dump(2) << "\n";
      } else {
        anonkey::group::save_params(p, pg_out);
        emit(g, {{"fingerprint", anonkey::to_hex(p.fingerprint())}},
             "wrote " + pg_out + " (fingerprint " + anonkey::to_hex(p.fingerprint()) + ")\n");
      }
      return kOk;
    }

    if (*harness_up) {
      anonkey::harness::HarnessOptions opts;
      opts.servers = hu_n;
      opts.providers = hu_providers;
      opts.epoch_seed = hu_seed;
      opts.state_dir = hu_state;
      opts.service_name = hu_service;
      opts.base_port = hu_port;
      auto params = resolve_params(g);
      if (!hu_detach) return serve_harness(opts, params, hu_out, hu_pid, g.json);

      fs::remove(hu_pid);
      pid_t child = ::fork();
      if (child < 0) throw Error(Errc::kInternal, "fork failed");
      if (child == 0) {
        ::setsid();
        int code = kInternal;
        try {
          code = serve_harness(opts, params, hu_out, hu_pid, true);
        } catch (const Error& e) {
          std::cerr << "harness: " << e.what() << "\n";
          code = exit_code_for(e.code());
        }
        std::_Exit(code);
      }
      // The pid file appears once every service is listening.
      for (int i = 0; i < 600; ++i) {
        if (fs::exists(hu_pid)) {
          emit(g, load_json(hu_out), "harness running (pid " + std::to_string(child) +
                                         "), deployment in " + hu_out + "\n");
          return kOk;
        }
        int status = 0;
        if (::waitpid(child, &status, WNOHANG) == child) {
          return WIFEXITED(status) ? WEXITSTATUS(status) : kInternal;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
      ::kill(child, SIGTERM);
      throw Error(Errc::kServiceUnreachable, "harness did not come up");
    }

    if (*harness_down) {
      if (!fs::exists(hd_pid)) {
        emit(g, {{"stopped", false}}, "no harness running\n");
        return kOk;
      }
      std::ifstream in(hd_pid);
      long pid = 0;
      in >> pid;
      if (pid > 0 && process_alive(static_cast<pid_t>(pid))) {
        ::kill(static_cast<pid_t>(pid), SIGTERM);
        for (int i = 0; i < 200 && process_alive(static_cast<pid_t>(pid)); ++i) {
          ::waitpid(static_cast<pid_t>(pid), nullptr, WNOHANG);
          std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
      }
      fs::remove(hd_pid);
      emit(g, {{"stopped", true}}, "harness stopped\n");
      return kOk;
    }

    if (*invite) {
      auto ids = parse_identities(inv_ids);
      json batches = json::array();
      std::string human;
      for (const auto& url : resolve_servers(g)) {
        auto batch = anonkey::client::KeyServerClient(url).invite(ids);
        batches.push_back({{"server", url}, {"batch_id", batch}});
        human += url + ": batch " + batch + "\n";
      }
      emit(g, {{"batches", batches}}, human);
      return kOk;
    }

    if (*collect) {
      auto params = resolve_params(g);
      auto servers = resolve_servers(g);
      auto d = deployment(g);
      std::map<std::string, std::string> idps;
      if (d.contains("idps")) idps = d.at("idps").get<std::map<std::string, std::string>>();
      for (const auto& o : ck_idps) {
        auto eq = o.find('=');
        if (eq == std::string::npos) throw Error(Errc::kInvalidArgument, "--idp wants provider=url");
        idps[o.substr(0, eq)] = o.substr(eq + 1);
      }
      std::vector<anonkey::client::Credential> creds;
      for (const auto& id : parse_identities(ck_ids)) {
        auto it = idps.find(id.provider);
        if (it == idps.end()) throw Error(Errc::kUnknownProvider, "no URL for " + id.provider);
        creds.push_back({id, it->second});
      }
      anonkey::client::CollectTimings timings;
      auto keyring = anonkey::client::collect_key(creds, servers, params, &timings);
      keyring.save(ck_out, params);
      auto y = anonkey::to_hex(keyring.y_c.encode(params));
      emit(g,
           {{"keyring", ck_out},
            {"epoch", keyring.epoch},
            {"Y_c", y},
            {"token_seconds", timings.token_seconds},
            {"share_seconds", timings.share_seconds}},
           "wrote " + ck_out + " (epoch " + std::to_string(keyring.epoch) + ")\n" +
               "tokens: " + std::to_string(timings.token_seconds) + " s, shares: " +
               std::to_string(timings.share_seconds) + " s\n");
      return kOk;
    }

    if (*pubkey) {
      auto params = resolve_params(g);
      auto id = parse_identity(pk_id);
      auto y = anonkey::client::composite_public_key(id, resolve_servers(g), params, pk_epoch);
      auto hex = anonkey::to_hex(y.encode(params));
      emit(g, {{"identity", id.to_string()}, {"y_hex", hex}}, hex + "\n");
      return kOk;
    }

    if (*ring_build) {
      auto params = resolve_params(g);
      auto ids = parse_members(rb_ids);
      auto ring = anonkey::client::build_ring(ids, resolve_servers(g), params, rb_epoch);
      warn_small_ring(ring.size());
      json members = json::array();
      std::string human = ring_listing(ids) + "members:\n";
      for (const auto& m : ring.members()) {
        members.push_back(anonkey::to_hex(m.encode(params)));
        human += "  " + members.back().get<std::string>().substr(0, 16) + "...\n";
      }
      emit(g,
           {{"identities", identities_json(ids)},
            {"members", members},
            {"descriptor_sha256", anonkey::to_hex(anonkey::sha256(ring.descriptor()))}},
           human);
      return kOk;
    }

    if (*sign) {
      auto params = resolve_params(g);
      auto keyring = anonkey::client::KeyringFile::load(sg_keyring, params);
      auto ids = parse_members(sg_ids);
      auto ring = anonkey::client::build_ring(ids, resolve_servers(g), params, keyring.epoch);
      warn_small_ring(ring.size());
      anonkey::Bytes scope =
          g.scope.empty() ? anonkey::lrs::default_scope(ring) : anonkey::to_bytes(g.scope);
      auto sig = anonkey::client::sign_document(sg_file, ring, keyring, scope, params,
                                                anonkey::system_random());
      std::string out = sg_out.empty() ? sg_file + ".sig" : sg_out;
      anonkey::client::write_signature_file(out, sig, params);
      emit(g, {{"signature", out}, {"identities", identities_json(ids)}},
           "wrote " + out + "\n" + ring_listing(ids));
      return kOk;
    }

    if (*verify) {
      auto params = resolve_params(g);
      auto ids = parse_members(vf_ids);
      auto ring = anonkey::client::build_ring(ids, resolve_servers(g), params, vf_epoch);
      warn_small_ring(ring.size());
      std::string sig_path = vf_sig.empty() ? vf_file + ".sig" : vf_sig;
      auto sig = anonkey::client::read_signature_file(sig_path, params);
      if (!g.scope.empty() && sig.scope != anonkey::to_bytes(g.scope)) {
        throw Error(Errc::kScopeMismatch, "signature was made under a different scope");
      }
      auto verdict = anonkey::client::verify_document(vf_file, sig, ring, params);
      emit(g,
           {{"accepted", verdict.accepted},
            {"tag", anonkey::to_hex(verdict.tag.encode(params))},
            {"pseudonym", verdict.pseudonym},
            {"identities", identities_json(ids)}},
           verdict.accepted
               ? "accepted\npseudonym " + verdict.pseudonym + "\n" + ring_listing(ids)
               : std::string("rejected\n"));
      return verdict.accepted ? kOk : kRejected;
    }

    if (*login) {
      auto params = resolve_params(g);
      auto keyring = anonkey::client::KeyringFile::load(lg_keyring, params);
      auto ids = parse_members(lg_ids);
      warn_small_ring(ids.size());
      auto token = anonkey::client::login(resolve_auth(g, lg_auth), ids, keyring,
                                          resolve_servers(g), params);
      emit(g, token.to_json(), "token " + token.token + "\npseudonym " + token.pseudonym + "\n");
      return kOk;
    }

    if (*introspect) {
      auto t = anonkey::client::AuthClient(resolve_auth(g, is_auth)).introspect(is_token);
      std::string human = "pseudonym " + t.pseudonym + "\nissued_at " +
                          std::to_string(t.issued_at) + "\n" + ring_listing(t.ring_identities);
      emit(g, t.introspection_json(), human);
      return kOk;
    }

    if (*block) {
      anonkey::client::AuthClient c(resolve_auth(g, bl_auth));
      if (bl_unblock) {
        c.unblock(bl_pseudonym);
      } else {
        c.block(bl_pseudonym);
      }
      emit(g, {{"pseudonym", bl_pseudonym}, {"blocked", !bl_unblock}},
           std::string(bl_unblock ? "unblocked " : "blocked ") + bl_pseudonym + "\n");
      return kOk;
    }

    if (*rotate) {
      json epochs = json::array();
      std::string human;
      for (const auto& url : resolve_servers(g)) {
        auto e = anonkey::client::KeyServerClient(url).rotate();
        epochs.push_back({{"server", url}, {"epoch", e}});
        human += url + ": epoch " + std::to_string(e) + "\n";
      }
      emit(g, {{"epochs", epochs}}, human);
      return kOk;
    }

    if (*bench) {
      auto params = g.params.empty() ? anonkey::group::production_params()
                                     : anonkey::group::load_params(g.params);
      auto report = anonkey::bench::run_bench(bn_sizes, bn_reps, params, anonkey::system_random());
      if (!bn_json.empty()) write_text(bn_json, report.to_json().dump(2) + "\n");
      if (!bn_csv.empty()) write_text(bn_csv, report.to_csv());
      emit(g, report.to_json(),
           report.to_csv() + "sign r2 " + std::to_string(report.sign_fit.r2) + ", verify r2 " +
               std::to_string(report.verify_fit.r2) + "\n");
      return kOk;
    }
  } catch (const Error& e) {
    if (g.json) {
      std::cout << json{{"error", anonkey::errc_name(e.code())}, {"detail", e.detail()}}.dump()
                << "\n";
    }
    std::cerr << "error: " << anonkey::errc_name(e.code()) << ": " << e.detail() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
