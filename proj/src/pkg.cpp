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

#include "anonkey/pkg.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <fstream>

#include "anonkey/error.hpp"

namespace anonkey::pkg {

namespace {

void check_sizes(unsigned t, unsigned n, const GroupParams& params) {
  if (t < 1 || t > n) throw Error(Errc::kInvalidArgument, "threshold must satisfy 1 <= t <= n");
  if (group::BigInt(n) >= params.q) {
    throw Error(Errc::kInvalidArgument, "share count must be below q");
  }
}

template <typename T>
std::vector<const T*> first_distinct(std::span<const T> items, unsigned t) {
  std::vector<const T*> picked;
  std::vector<std::uint64_t> seen;
  for (const auto& item : items) {
    if (picked.size() == t) break;
    if (std::find(seen.begin(), seen.end(), item.index) != seen.end()) continue;
    seen.push_back(item.index);
    picked.push_back(&item);
  }
  if (t == 0 || picked.size() < t) {
    throw Error(Errc::kThresholdNotMet, "need " + std::to_string(t) +
                                            " distinct shares, have " +
                                            std::to_string(picked.size()));
  }
  return picked;
}

}  // namespace

std::vector<ShamirShare> shamir_share(const Scalar& secret, unsigned t, unsigned n,
                                      const GroupParams& params, RandomSource& rng) {
  check_sizes(t, n, params);
  std::vector<Scalar> coefficients{secret};
  for (unsigned k = 1; k < t; ++k) {
    coefficients.push_back(group::random_scalar(rng, params));
  }
  return shamir_share_polynomial(coefficients, n, params);
}

std::vector<ShamirShare> shamir_share_polynomial(std::span<const Scalar> coefficients,
                                                 unsigned n, const GroupParams& params) {
  check_sizes(static_cast<unsigned>(coefficients.size()), n, params);
  std::vector<ShamirShare> shares;
  shares.reserve(n);
  for (unsigned i = 1; i <= n; ++i) {
    // Horner evaluation at x = i.
    const Scalar x = Scalar::from_int(i, params);
    Scalar acc;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      acc = group::add(group::mul(acc, x, params), *it, params);
    }
    shares.push_back({i, acc});
  }
  return shares;
}

Scalar lagrange_coeff(std::span<const std::uint64_t> indices, std::uint64_t i,
                      const GroupParams& params) {
  if (std::find(indices.begin(), indices.end(), i) == indices.end()) {
    throw Error(Errc::kInvalidArgument, "index not in the interpolation set");
  }
  Scalar num = Scalar::from_int(1, params);
  Scalar den = Scalar::from_int(1, params);
  const Scalar xi = Scalar::reduce(i, params);
  if (xi.is_zero()) throw Error(Errc::kInvalidArgument, "index is zero mod q");
  for (std::uint64_t j : indices) {
    if (j == i) continue;
    const Scalar xj = Scalar::reduce(j, params);
    const Scalar diff = group::sub(xj, xi, params);
    if (xj.is_zero() || diff.is_zero()) {
      throw Error(Errc::kInvalidArgument, "indices must be distinct and nonzero mod q");
    }
    num = group::mul(num, xj, params);
    den = group::mul(den, diff, params);
  }
  return group::mul(num, group::inverse(den, params), params);
}

Scalar shamir_reconstruct(std::span<const ShamirShare> shares, unsigned t,
                          const GroupParams& params) {
  auto picked = first_distinct(shares, t);
  std::vector<std::uint64_t> indices;
  for (const auto* s : picked) indices.push_back(s->index);
  Scalar secret;
  for (const auto* s : picked) {
    secret = group::add(
        secret, group::mul(lagrange_coeff(indices, s->index, params), s->value, params),
        params);
  }
  return secret;
}

GroupElement identity_point(const IdentityRef& identity, const GroupParams& params) {
  identity.validate();
  return group::hash_to_group(as_bytes(identity.to_string()), "ibe-qid", params);
}

PkgShareResponse pkg_extract_share(const ShamirShare& share, const IdentityRef& identity,
                                   const GroupParams& params) {
  return {share.index, group::exp_secret(identity_point(identity, params), share.value, params)};
}

GroupElement pkg_recombine(std::span<const PkgShareResponse> responses, unsigned t,
                           const GroupParams& params) {
  auto picked = first_distinct(responses, t);
  std::vector<std::uint64_t> indices;
  for (const auto* r : picked) indices.push_back(r->index);
  GroupElement out;
  for (const auto* r : picked) {
    if (!group::in_subgroup(r->q_priv.value(), params)) {
      throw Error(Errc::kInvalidArgument, "key part is not a subgroup element");
    }
    out = group::mul(
        out, group::exp(r->q_priv, lagrange_coeff(indices, r->index, params), params),
        params);
  }
  return out;
}

void save_share_file(const ShareFile& file, const std::filesystem::path& path,
                     const GroupParams& params) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  ::chmod(path.c_str(), S_IRUSR | S_IWUSR);
  nlohmann::json j = {{"index", file.share.index},
                      {"value_hex", to_hex(file.share.value.encode(params))},
                      {"t", file.t},
                      {"n", file.n}};
  out << j.dump(2) << "\n";
}

ShareFile load_share_file(const std::filesystem::path& path, const GroupParams& params) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    ShareFile f;
    f.share.index = j.at("index").get<std::uint64_t>();
    f.share.value = Scalar::decode(from_hex(j.at("value_hex").get<std::string>()), params);
    f.t = j.at("t").get<unsigned>();
    f.n = j.at("n").get<unsigned>();
    if (f.share.index < 1 || f.share.index > f.n) {
      throw Error(Errc::kMalformedEncoding, "share index outside 1..n");
    }
    check_sizes(f.t, f.n, params);
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedEncoding, std::string("share file: ") + e.what());
  }
}

}  // namespace anonkey::pkg
