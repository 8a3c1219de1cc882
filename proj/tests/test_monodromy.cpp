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

#include <gtest/gtest.h>

#include <map>

#include "klab/error.hpp"
#include "klab/monodromy.hpp"

namespace klab {
namespace {

ExtFieldPtr field(std::int64_t q, int d) { return build_extension(make_prime_field(q), d); }

TEST(MonodromyTest, SquareCaseOverF7) {
  // zeta = +-1, so 1 + z2 - z3 - z4 is one of 4 (once), 2 (three times), -2 (three times) or 0.
  const SkMultiset sk = compute_sk(2, field(7, 1));
  ASSERT_EQ(sk.entries.size(), 2u);
  EXPECT_EQ(sk.entries[0].first.code, 2u);  // 16 mod 7
  EXPECT_EQ(sk.entries[0].second, 1u);
  EXPECT_EQ(sk.entries[1].first.code, 4u);
  EXPECT_EQ(sk.entries[1].second, 4u);
  EXPECT_EQ(sk.zero_sums, 3u);
  EXPECT_EQ(sk.total_multiplicity() + sk.zero_sums, 8u);
}

TEST(MonodromyTest, MultisetMatchesDirectEnumeration) {
  for (int k : {3, 4, 5}) {
    const int d = find_embedding_degree(k, 31);
    const SkMultiset sk = compute_sk(k, field(31, d));
    const ExtField& f = *sk.host;
    // Enumerate k-th roots of unity by brute force over the whole field.
    std::vector<ExtElement> roots;
    for (std::uint32_t x = 1; x < f.size(); ++x)
      if (f.pow({x}, k) == f.one()) roots.push_back({x});
    ASSERT_EQ(roots.size(), static_cast<std::size_t>(k));
    std::map<ExtElement, std::uint64_t> expected;
    std::uint64_t zeros = 0;
    for (ExtElement z2 : roots)
      for (ExtElement z3 : roots)
        for (ExtElement z4 : roots) {
          const ExtElement s = f.sub(f.sub(f.add(f.one(), z2), z3), z4);
          if (s == f.zero()) {
            ++zeros;
            continue;
          }
          ++expected[f.pow(s, k)];
        }
    EXPECT_EQ(sk.zero_sums, zeros);
    ASSERT_EQ(sk.entries.size(), expected.size());
    std::size_t i = 0;
    for (const auto& [e, m] : expected) {
      EXPECT_EQ(sk.entries[i].first, e);
      EXPECT_EQ(sk.entries[i].second, m);
      ++i;
    }
  }
}

TEST(MonodromyTest, StabilizerMatchesExhaustiveSearch) {
  for (int k = 2; k <= 6; ++k) {
    for (std::int64_t q : {7, 11, 13, 31, 61}) {
      if (q % k == 0) continue;
      const int d = find_embedding_degree(k, static_cast<std::uint64_t>(q));
      if (std::pow(q, d) > 2e5) continue;
      const SkMultiset sk = compute_sk(k, field(q, d));
      EXPECT_EQ(stabilizer_group(sk), stabilizer_group_exhaustive(sk)) << k << " " << q;
    }
  }
}

TEST(MonodromyTest, StabilizerForLargeFields) {
  for (int k : {2, 3, 4, 5}) {
    std::int64_t q = 10007;
    while ((q - 1) % k != 0 || !is_prime(static_cast<std::uint64_t>(q))) ++q;
    const SkMultiset sk = compute_sk(k, field(q, 1));
    const auto stab = stabilizer_group(sk);
    EXPECT_EQ(stab.size(), k % 2 == 0 ? 1u : 2u);
    EXPECT_TRUE(multiplicity_one_element(sk).has_value());
    for (ExtElement mu : stab) EXPECT_TRUE(stabilizes(sk, mu));
    EXPECT_FALSE(stabilizes(sk, sk.host->from_int(2)));
  }
}

TEST(MonodromyTest, EmbeddingDegree) {
  EXPECT_EQ(find_embedding_degree(3, 7), 1);
  EXPECT_EQ(find_embedding_degree(3, 5), 2);
  EXPECT_EQ(find_embedding_degree(5, 7), 4);
  try {
    find_embedding_degree(7, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CharDividesK);
  }
}

TEST(MonodromyTest, MissingRootsRejected) {
  try {
    compute_sk(3, field(5, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoKthRoots);
  }
}

TEST(MonodromyTest, ThresholdScanRows) {
  const SkScan scan = sk_threshold_scan(3, 60);
  ASSERT_FALSE(scan.rows.empty());
  for (const auto& r : scan.rows) {
    EXPECT_NE(r.q % 3, 0u);
    EXPECT_GE(r.d, 1);
  }
  if (scan.stable_from) {
    for (const auto& r : scan.rows)
      if (r.q >= *scan.stable_from) EXPECT_TRUE(r.stabilizer_expected && r.has_multiplicity_one);
  }
}

}  // namespace
}  // namespace klab
