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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "klab/finite_field.hpp"

namespace klab {

/// Intro: Kl_k(a) = q^{-d(k-1)/2} sum_{x_1...x_k = a} psi(x_1 + ... + x_k).
/// Sheaf: the same with the extra factor (-1)^{k-1} of the Kloosterman sheaf
/// trace function.
enum class SignConvention { Intro, Sheaf };

enum class BuildPath { Naive, DirectConvolution, FastTransform, Pullback, Cache };

std::string_view to_string(SignConvention convention);
std::string_view to_string(BuildPath path);

/// (-1)^{k-1} for Sheaf, 1 for Intro.
inline double sign_factor(int k, SignConvention convention) {
  return convention == SignConvention::Sheaf && k % 2 == 0 ? -1.0 : 1.0;
}

/// Values of Kl_k(a; F_{q^d}) for every a, indexed by element encoding.
/// values()[0] is exactly zero.
class KloostermanTable {
 public:
  KloostermanTable(int k, ExtFieldPtr field, SignConvention convention, BuildPath path,
                   Eigen::VectorXcd values, ExtElement scale = {1});

  int k() const noexcept { return k_; }
  const ExtField& field() const noexcept { return *field_; }
  const ExtFieldPtr& field_ptr() const noexcept { return field_; }
  SignConvention convention() const noexcept { return convention_; }
  BuildPath path() const noexcept { return path_; }
  /// c such that this table is [x c]^* of the untwisted sum (1 unless pulled back).
  ExtElement scale() const noexcept { return scale_; }

  std::complex<double> operator[](ExtElement a) const noexcept { return values_[a.code]; }
  const Eigen::VectorXcd& values() const noexcept { return values_; }

  /// q^{d(k-1)/2}: the factor between normalized and raw sums.
  double normalization() const noexcept;
  /// Error budget for a single entry: (number of unit terms) x 1e-15,
  /// rescaled to the normalized value.
  double tolerance() const noexcept;

 private:
  int k_;
  ExtFieldPtr field_;
  SignConvention convention_;
  BuildPath path_;
  Eigen::VectorXcd values_;
  ExtElement scale_;
};

struct KloostermanOptions {
  /// Largest q^d handled by the O((q^d)^2) schoolbook convolution.
  std::uint32_t direct_max = 5000;
  std::optional<BuildPath> force_path;
};

/// Brute-force enumeration over x_1..x_{k-1}, using polynomial arithmetic
/// only (no discrete logs). Throws ResourceLimit if q^{d(k-1)} > cap.
std::complex<double> kloosterman_naive(int k, ExtElement a, const ExtField& field,
                                       SignConvention convention = SignConvention::Intro,
                                       std::uint64_t cap = 50'000'000);

/// Full table by exact counting of all k-tuples in (F_{q^d}^x)^k by product
/// and trace of their sum. Throws ResourceLimit if (q^d-1)^k > cap.
KloostermanTable kloosterman_table_naive(int k, ExtFieldPtr field,
                                         SignConvention convention = SignConvention::Intro,
                                         std::uint64_t cap = 4'000'000'000ull);

/// Table by k-fold multiplicative convolution of psi over F_{q^d}^x, indexed
/// by discrete logarithm.
KloostermanTable kloosterman_table(int k, ExtFieldPtr field,
                                   SignConvention convention = SignConvention::Intro,
                                   const KloostermanOptions& options = {});

/// t'[a] = t[c a]. Throws ZeroScale for c = 0.
KloostermanTable pullback_scale(const KloostermanTable& table, ExtElement c);

/// max_a |conj(t[a]) - t[(-1)^k a]|.
double conjugation_symmetry_check(const KloostermanTable& table);

/// max_a |t[a]|.
double deligne_max(const KloostermanTable& table);

/// sum_{a != 0} of the raw (unnormalized, Intro-signed) sums; equals (-1)^k.
std::complex<double> raw_complete_sum(const KloostermanTable& table);

/// max_a |s[a] - t[a]|.
double max_table_deviation(const KloostermanTable& s, const KloostermanTable& t);

// Binary cache: "KLTB" magic, u32 version, k, q, d, convention, d+1 modulus
// coefficients, then little-endian f64 (re, im) per element in encoding order.
void write_table_cache(const KloostermanTable& table, const std::filesystem::path& path);
KloostermanTable read_table_cache(const std::filesystem::path& path);

/// Looks in dir for a cached table for (k, q, d, convention); builds and
/// stores it when absent.
KloostermanTable cached_kloosterman_table(const std::filesystem::path& dir, int k, ExtFieldPtr field,
                                          SignConvention convention = SignConvention::Intro);

}  // namespace klab
