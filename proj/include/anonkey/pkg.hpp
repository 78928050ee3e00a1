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

#ifndef ANONKEY_PKG_HPP_
#define ANONKEY_PKG_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "anonkey/group.hpp"
#include "anonkey/keyshare.hpp"
#include "anonkey/random.hpp"

// Distributed identity-based private key generator. The master scalar s is
// Shamir-shared across the key servers; server i answers Q_ID^{s_i} and the
// client interpolates Q_ID^s in the exponent with Lagrange coefficients.
namespace anonkey::pkg {

using group::GroupElement;
using group::GroupParams;
using group::Scalar;
using keyshare::IdentityRef;

struct ShamirShare {
  std::uint64_t index = 0;
  Scalar value;

  bool operator==(const ShamirShare&) const = default;
};

struct PkgShareResponse {
  std::uint64_t index = 0;
  GroupElement q_priv;
};

// Random polynomial of degree t - 1 with f(0) = secret; share i is (i, f(i))
// for i = 1..n. Throws Error(kInvalidArgument) unless 1 <= t <= n < q.
std::vector<ShamirShare> shamir_share(const Scalar& secret, unsigned t, unsigned n,
                                      const GroupParams& params, RandomSource& rng);

// coefficients[k] multiplies x^k; coefficients[0] is the secret.
std::vector<ShamirShare> shamir_share_polynomial(std::span<const Scalar> coefficients,
                                                 unsigned n, const GroupParams& params);

// Interpolates f(0) from the first t distinct shares.
Scalar shamir_reconstruct(std::span<const ShamirShare> shares, unsigned t,
                          const GroupParams& params);

// prod_{j != i} j / (j - i) mod q.
Scalar lagrange_coeff(std::span<const std::uint64_t> indices, std::uint64_t i,
                      const GroupParams& params);

// Q_ID = hash_to_group(provider ":" user_id, "ibe-qid").
GroupElement identity_point(const IdentityRef& identity, const GroupParams& params);

PkgShareResponse pkg_extract_share(const ShamirShare& share, const IdentityRef& identity,
                                   const GroupParams& params);

// prod Q_priv_i^{lambda_i} over the first t distinct indices. Throws
// Error(kThresholdNotMet) with fewer.
GroupElement pkg_recombine(std::span<const PkgShareResponse> responses, unsigned t,
                           const GroupParams& params);

// {"index": i, "value_hex": s, "t": t, "n": n}
struct ShareFile {
  ShamirShare share;
  unsigned t = 0;
  unsigned n = 0;
};
void save_share_file(const ShareFile& file, const std::filesystem::path& path,
                     const GroupParams& params);
ShareFile load_share_file(const std::filesystem::path& path, const GroupParams& params);

}  // namespace anonkey::pkg

#endif  // ANONKEY_PKG_HPP_
