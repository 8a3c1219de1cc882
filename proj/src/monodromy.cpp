// Copyright 2026 The klab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "klab/monodromy.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "klab/error.hpp"

namespace klab {

std::uint64_t SkMultiset::total_multiplicity() const {
  std::uint64_t total = 0;
  for (const auto& e : entries) total += e.second;
  return total;
}

int find_embedding_degree(int k, std::uint64_t q) {
  if (k < 1) throw Error(ErrorKind::OutOfRange, "k must be positive");
  if (q < 2) throw Error(ErrorKind::OutOfRange, "q must be at least 2");
  if (std::gcd(static_cast<std::uint64_t>(k), q) != 1) {
    throw Error(ErrorKind::CharDividesK, "q and k must be coprime");
  }
  if (k == 1) return 1;
  const std::uint64_t base = q % static_cast<std::uint64_t>(k);
  std::uint64_t power = base;
  int d = 1;
  while (power != 1) {
    power = power * base % static_cast<std::uint64_t>(k);
    ++d;
  }
  return d;
}

SkMultiset compute_sk(int k, ExtFieldPtr host, std::uint32_t root_exponent) {
  const ExtField& field = *host;
  if (k < 1 || field.group_order() % static_cast<std::uint32_t>(k) != 0) {
    throw Error(ErrorKind::NoKthRoots, "host field has no primitive k-th root of unity");
  }
  if (std::gcd(root_exponent, static_cast<std::uint32_t>(k)) != 1) {
    throw Error(ErrorKind::OutOfRange, "root exponent must be coprime to k");
  }
  const std::uint64_t step = static_cast<std::uint64_t>(field.group_order() / k) * root_exponent;
  std::vector<ExtElement> roots(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) roots[j] = field.exp(step * static_cast<std::uint64_t>(j));

  SkMultiset sk;
  sk.k = k;
  sk.host = std::move(host);
  std::map<std::uint32_t, std::uint64_t> counts;
  for (ExtElement z2 : roots) {
    const ExtElement head = field.add(field.one(), z2);
    for (ExtElement z3 : roots) {
      for (ExtElement z4 : roots) {
        const ExtElement v = field.sub(field.sub(head, z3), z4);
        if (v.code == 0) {
          ++sk.zero_sums;
        } else {
          ++counts[field.pow(v, k).code];
        }
      }
    }
  }
  for (const auto& [code, mult] : counts) sk.entries.push_back({{code}, mult});
  return sk;
}

std::optional<ExtElement> multiplicity_one_element(const SkMultiset& sk) {
  for (const auto& [element, mult] : sk.entries) {
    if (mult == 1) return element;
  }
  return std::nullopt;
}

bool stabilizes(const SkMultiset& sk, ExtElement mu) {
  const ExtField& field = *sk.host;
  std::vector<std::pair<ExtElement, std::uint64_t>> image;
  image.reserve(sk.entries.size());
  for (const auto& [element, mult] : sk.entries) image.push_back({field.mul(mu, element), mult});
  std::sort(image.begin(), image.end());
  return image == sk.entries;
}

std::vector<ExtElement> stabilizer_group(const SkMultiset& sk) {
  std::vector<ExtElement> out;
  if (sk.entries.empty()) return out;
  const ExtField& field = *sk.host;
  const ExtElement s0 = sk.entries.front().first;
  for (const auto& entry : sk.entries) {
    const ExtElement mu = field.div(entry.first, s0);
    if (stabilizes(sk, mu)) out.push_back(mu);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ExtElement> stabilizer_group_exhaustive(const SkMultiset& sk) {
  std::vector<ExtElement> out;
  for (std::uint32_t mu = 1; mu < sk.host->size(); ++mu) {
    if (stabilizes(sk, {mu})) out.push_back({mu});
  }
  return out;
}

SkScan sk_threshold_scan(int k, std::uint32_t q_max, std::uint64_t field_cap) {
  SkScan scan;
  scan.k = k;
  for (std::uint32_t q = static_cast<std::uint32_t>(k) + 1; q <= q_max; ++q) {
    if (!is_prime(q)) continue;
    const int d = find_embedding_degree(k, q);
    std::uint64_t size = 1;
    for (int i = 0; i < d && size <= field_cap; ++i) size *= q;
    if (size > field_cap) continue;
    const SkMultiset sk = compute_sk(k, build_extension(make_prime_field(q), d));
    const ExtField& field = *sk.host;
    std::vector<ExtElement> expected = {field.one()};
    if (k % 2 == 1) expected.push_back(field.neg(field.one()));
    std::sort(expected.begin(), expected.end());
    SkScanRow row;
    row.q = q;
    row.d = d;
    row.has_multiplicity_one = multiplicity_one_element(sk).has_value();
    row.stabilizer_expected = stabilizer_group(sk) == expected;
    scan.rows.push_back(row);
  }
  for (auto it = scan.rows.rbegin(); it != scan.rows.rend(); ++it) {
    if (!(it->has_multiplicity_one && it->stabilizer_expected)) break;
    scan.stable_from = it->q;
  }
  return scan;
}

}  // namespace klab
