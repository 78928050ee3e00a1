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

#include "anonkey/error.hpp"

#include <array>
#include <utility>

namespace anonkey {

namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 32> kNames = {{
    {Errc::kInvalidArgument, "invalid_argument"},
    {Errc::kMalformedEncoding, "malformed_encoding"},
    {Errc::kSignerMismatch, "signer_mismatch"},
    {Errc::kScopeMismatch, "scope_mismatch"},
    {Errc::kEpochExpired, "epoch_expired"},
    {Errc::kUnknownArchivedKey, "unknown_archived_key"},
    {Errc::kEmptyInput, "empty_input"},
    {Errc::kZeroCompositeKey, "zero_composite_key"},
    {Errc::kThresholdNotMet, "threshold_not_met"},
    {Errc::kUnknownProvider, "unknown_provider"},
    {Errc::kBadMac, "bad_mac"},
    {Errc::kAudienceMismatch, "audience_mismatch"},
    {Errc::kTokenExpired, "token_expired"},
    {Errc::kRateLimited, "rate_limited"},
    {Errc::kInvalidIdentity, "invalid_identity"},
    {Errc::kUnknownChallenge, "unknown_challenge"},
    {Errc::kChallengeExpired, "challenge_expired"},
    {Errc::kChallengeConsumed, "challenge_consumed"},
    {Errc::kSignatureInvalid, "signature_invalid"},
    {Errc::kRingMismatch, "ring_mismatch"},
    {Errc::kPseudonymBlocked, "pseudonym_blocked"},
    {Errc::kKeyServerUnreachable, "key_server_unreachable"},
    {Errc::kServiceUnreachable, "service_unreachable"},
    {Errc::kUnknownToken, "unknown_token"},
    {Errc::kServerInconsistency, "server_inconsistency"},
    {Errc::kNotInRing, "not_in_ring"},
    {Errc::kIoError, "io_error"},
    {Errc::kParamSearchFailed, "param_search_failed"},
    {Errc::kHashExhausted, "hash_exhausted"},
    {Errc::kForbidden, "forbidden"},
    {Errc::kNotFound, "not_found"},
    {Errc::kInternal, "internal"},
}};

}  // namespace

std::string_view errc_name(Errc code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "internal";
}

Errc errc_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return Errc::kInternal;
}

}  // namespace anonkey
