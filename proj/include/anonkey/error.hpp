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

#ifndef ANONKEY_ERROR_HPP_
#define ANONKEY_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace anonkey {

// Stable error codes. The string forms appear on the wire and in CLI output
// and must not change once released.
enum class Errc {
  kInvalidArgument,
  kMalformedEncoding,
  kSignerMismatch,
  kScopeMismatch,
  kEpochExpired,
  kUnknownArchivedKey,
  kEmptyInput,
  kZeroCompositeKey,
  kThresholdNotMet,
  kUnknownProvider,
  kBadMac,
  kAudienceMismatch,
  kTokenExpired,
  kRateLimited,
  kInvalidIdentity,
  kUnknownChallenge,
  kChallengeExpired,
  kChallengeConsumed,
  kSignatureInvalid,
  kRingMismatch,
  kPseudonymBlocked,
  kKeyServerUnreachable,
  kServiceUnreachable,
  kUnknownToken,
  kServerInconsistency,
  kNotInRing,
  kIoError,
  kParamSearchFailed,
  kHashExhausted,
  kForbidden,
  kNotFound,
  kInternal,
};

std::string_view errc_name(Errc code);

// Unknown names map to kInternal.
Errc errc_from_name(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace anonkey

#endif  // ANONKEY_ERROR_HPP_
