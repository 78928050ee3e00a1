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

#include "anonkey/bench.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include "anonkey/bytes.hpp"
#include "anonkey/error.hpp"
#include "anonkey/lrs.hpp"

namespace anonkey::bench {

using Clock = std::chrono::steady_clock;

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(Errc::kInvalidArgument, "fit needs at least two points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw Error(Errc::kInvalidArgument, "fit needs two distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (f.slope * xs[i] + f.intercept);
    ss_res += r * r;
  }
  // A perfectly flat series is perfectly explained.
  f.r2 = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
  return f;
}

namespace {

nlohmann::json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

}  // namespace

nlohmann::json BenchReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"ring_size", p.ring_size},
                   {"sign_seconds", p.sign_seconds},
                   {"verify_seconds", p.verify_seconds},
                   {"encoded_bytes", p.encoded_bytes}});
  }
  return {{"repetitions", repetitions},
          {"params_fingerprint", params_fingerprint},
          {"points", pts},
          {"sign_fit", fit_json(sign_fit)},
          {"verify_fit", fit_json(verify_fit)},
          {"size_fit", fit_json(size_fit)}};
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out.precision(9);
  out << "ring_size,sign_seconds,verify_seconds,encoded_bytes\n";
  for (const auto& p : points) {
    out << p.ring_size << ',' << p.sign_seconds << ',' << p.verify_seconds << ','
        << p.encoded_bytes << '\n';
  }
  return out.str();
}

BenchReport run_bench(std::vector<std::size_t> sizes, std::size_t repetitions,
                      const group::GroupParams& params, RandomSource& rng) {
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 3) throw Error(Errc::kInvalidArgument, "need at least 3 ring sizes");
  if (sizes.front() == 0) throw Error(Errc::kInvalidArgument, "ring size must be positive");
  if (repetitions < 5) throw Error(Errc::kInvalidArgument, "need at least 5 repetitions");

  // Keys for the largest ring; smaller rings take a prefix.
  const std::size_t max_n = sizes.back();
  const auto g = group::generator(params);
  std::vector<group::Scalar> xs;
  std::vector<group::GroupElement> ys;
  if (group::BigInt(static_cast<unsigned long>(max_n)) >= params.q) {
    throw Error(Errc::kInvalidArgument, "ring larger than the group allows");
  }
  std::set<Bytes> seen;
  while (xs.size() < max_n) {
    auto x = group::random_nonzero_scalar(rng, params);
    auto y = group::exp_secret(g, x, params);
    if (!seen.insert(y.encode(params)).second) continue;
    xs.push_back(x);
    ys.push_back(y);
  }

  BenchReport report;
  report.repetitions = repetitions;
  report.params_fingerprint = to_hex(params.fingerprint());
  // Empty scope: the size series is then 296 + 32n on production params.
  const Bytes scope;
  for (std::size_t n : sizes) {
    std::vector<group::GroupElement> members(ys.begin(), ys.begin() + n);
    auto ring = lrs::Ring::canonical(members, params);
    BenchPoint point;
    point.ring_size = n;
    double sign_total = 0, verify_total = 0;
    for (std::size_t r = 0; r < repetitions; ++r) {
      std::size_t signer = static_cast<std::size_t>(rng.bytes(1)[0]) % n;
      std::size_t idx = *ring.index_of(ys[signer]);
      Bytes msg = rng.bytes(32);

      auto t0 = Clock::now();
      auto sig = lrs::sign(msg, ring, idx, xs[signer], scope, params, rng);
      auto t1 = Clock::now();
      auto result = lrs::verify(msg, ring, sig, params);
      auto t2 = Clock::now();

      if (!result.accepted) throw Error(Errc::kInternal, "benchmark signature rejected");
      sign_total += std::chrono::duration<double>(t1 - t0).count();
      verify_total += std::chrono::duration<double>(t2 - t1).count();
      point.encoded_bytes = lrs::encode(sig, params).size();
    }
    point.sign_seconds = sign_total / static_cast<double>(repetitions);
    point.verify_seconds = verify_total / static_cast<double>(repetitions);
    report.points.push_back(point);
  }

  std::vector<double> n, s, v, b;
  for (const auto& p : report.points) {
    n.push_back(static_cast<double>(p.ring_size));
    s.push_back(p.sign_seconds);
    v.push_back(p.verify_seconds);
    b.push_back(static_cast<double>(p.encoded_bytes));
  }
  report.sign_fit = fit_linear(n, s);
  report.verify_fit = fit_linear(n, v);
  report.size_fit = fit_linear(n, b);
  return report;
}

}  // namespace anonkey::bench
