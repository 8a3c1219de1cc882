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

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "klab/finite_field.hpp"

namespace klab {

struct SkMultiset {
  int k = 0;
  ExtFieldPtr host;
  /// (element, multiplicity), sorted by element code.
  std::vector<std::pair<ExtElement, std::uint64_t>> entries;
  /// Number of (zeta2, zeta3, zeta4) with 1 + zeta2 - zeta3 - zeta4 = 0.
  std::uint64_t zero_sums = 0;

  std::uint64_t total_multiplicity() const;
};

/// Multiplicative order of q modulo k.
int find_embedding_degree(int k, std::uint64_t q);

/// S_k in the host field, using the primitive k-th root g^{j (q^d-1)/k} (j coprime to k).
SkMultiset compute_sk(int k, ExtFieldPtr host, std::uint32_t root_exponent = 1);

std::optional<ExtElement> multiplicity_one_element(const SkMultiset& sk);

/// Elements mu with mu S_k = S_k, sorted by code. Candidates are ratios s'/s_0 of support elements.
std::vector<ExtElement> stabilizer_group(const SkMultiset& sk);

/// Same answer by testing every nonzero mu; meant for small fields.
std::vector<ExtElement> stabilizer_group_exhaustive(const SkMultiset& sk);

/// Whether mu S_k = S_k as multisets.
bool stabilizes(const SkMultiset& sk, ExtElement mu);

struct SkScanRow {
  std::uint32_t q = 0;
  int d = 0;
  bool has_multiplicity_one = false;
  bool stabilizer_expected = false;
};

struct SkScan {
  int k = 0;
  std::vector<SkScanRow> rows;
  /// Smallest tested q from which both conclusions hold for every larger tested q.
  std::optional<std::uint32_t> stable_from;
};

/// Tests every prime k < q <= q_max whose minimal host field has at most field_cap elements.
SkScan sk_threshold_scan(int k, std::uint32_t q_max, std::uint64_t field_cap = 1'000'000);

}  // namespace klab
