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

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "klab/finite_field.hpp"
#include "klab/kloosterman.hpp"
#include "klab/random.hpp"

namespace klab {

using ShiftTuple = std::array<ExtElement, 4>;

enum class ParityClass { Sp, SL };
enum class TupleClass { Diagonal, Generic };

/// Sp for even k, SL for odd k.
inline ParityClass parity_class(int k) { return k % 2 == 0 ? ParityClass::Sp : ParityClass::SL; }

TupleClass classify_tuple(const ShiftTuple& b, int k);

/// Kloosterman table together with the [x c] twist, K_c(x) = Kl_k(c x).
class SumProductContext {
 public:
  SumProductContext(std::shared_ptr<const KloostermanTable> table, ExtElement c = {1});

  const KloostermanTable& table() const noexcept { return *table_; }
  const ExtField& field() const noexcept { return table_->field(); }
  int k() const noexcept { return table_->k(); }
  ExtElement c() const noexcept { return c_; }
  /// The twisted table as a vector indexed by element code.
  const Eigen::VectorXcd& twisted() const noexcept { return twisted_; }

  std::complex<double> K(ExtElement x) const noexcept { return twisted_[x.code]; }

  /// prod_{i=1,2} K(s(r+b_i)) conj K(s(r+b_{i+2})).
  std::complex<double> product(ExtElement r, ExtElement s, const ShiftTuple& b) const noexcept;

 private:
  std::shared_ptr<const KloostermanTable> table_;
  ExtElement c_;
  Eigen::VectorXcd twisted_;
};

std::complex<double> big_k(const SumProductContext& ctx, ExtElement r, ExtElement s, ExtElement lambda,
                           const ShiftTuple& b);

/// Sum of big_k over every s in the field (the s = 0 term vanishes).
std::complex<double> big_r(const SumProductContext& ctx, ExtElement r, ExtElement lambda, const ShiftTuple& b);

/// R(r, lambda, b) for every lambda, indexed by the code of lambda.
Eigen::VectorXcd big_r_spectrum(const SumProductContext& ctx, ExtElement r, const ShiftTuple& b);

inline constexpr std::uint64_t kDefaultSumCap = 200'000'000;

std::complex<double> sigma_incomplete(const SumProductContext& ctx, const ShiftTuple& b, std::int64_t A,
                                      std::int64_t M, std::uint64_t cap = kDefaultSumCap);

std::complex<double> sigma_neq(const SumProductContext& ctx, const ShiftTuple& b, std::int64_t AM,
                               std::uint64_t cap = kDefaultSumCap);

/// Reference evaluation of sigma_neq as the literal triple loop.
std::complex<double> sigma_neq_naive(const SumProductContext& ctx, const ShiftTuple& b, std::int64_t AM,
                                     std::uint64_t cap = kDefaultSumCap);

std::complex<double> complete_sum_over_r(const SumProductContext& ctx, ExtElement s, const ShiftTuple& b);

std::complex<double> complete_corr_over_r(const SumProductContext& ctx, ExtElement s1, ExtElement s2,
                                          const ShiftTuple& b);

std::complex<double> r_linear_sum(const SumProductContext& ctx, ExtElement lambda, const ShiftTuple& b);

std::complex<double> r_correlation(const SumProductContext& ctx, ExtElement lambda1, ExtElement lambda2,
                                   const ShiftTuple& b);

/// q^{-2d} sum_{r,lambda} |R|^2 via Plancherel.
double second_moment_r_lambda(const SumProductContext& ctx, const ShiftTuple& b);
double second_moment_r_lambda_naive(const SumProductContext& ctx, const ShiftTuple& b);

/// q^{-2d} sum_{r,lambda} R(r,lambda) conj R(r,-lambda), k odd.
std::complex<double> noncorrelation_moment(const SumProductContext& ctx, const ShiftTuple& b);
std::complex<double> noncorrelation_moment_naive(const SumProductContext& ctx, const ShiftTuple& b);

/// q^{-d} sum_b K(s b) conj K(s' b).
std::complex<double> correlation_sum(const SumProductContext& ctx, ExtElement s, ExtElement s_prime);

/// q^{-5d} sum_{r,b} |R(r,0,b)|^2 through the correlation-sum reduction.
double full_average_moment(const SumProductContext& ctx);
double full_average_moment_naive(const SumProductContext& ctx, std::uint64_t cap = 50'000'000);

enum class RatioStatistic { CompleteSumR, LinearR, OffDiagonalCorrelation, DiagonalCorrelation };

std::string_view to_string(RatioStatistic statistic);
/// Power of q divided out of the raw statistic.
double normalization_exponent(RatioStatistic statistic);

struct RatioSample {
  ShiftTuple b;
  ExtElement s_or_lambda1;
  ExtElement lambda2;
  std::complex<double> value;
  double ratio;
};

struct RatioReport {
  RatioStatistic statistic;
  std::uint32_t q = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double max_ratio = 0;
  double mean_ratio = 0;
  double exponent = 0;
  std::vector<RatioSample> rows;
};

/// Samples generic (non-diagonal) tuples b and evaluates one normalized statistic.
RatioReport ratio_report(const SumProductContext& ctx, RatioStatistic statistic, std::size_t samples,
                         std::uint64_t seed);

ShiftTuple sample_generic_tuple(const ExtField& field, int k, SeededRng& rng);

struct ScanOptions {
  std::uint32_t exhaustive_max_q = 31;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  /// Thresholds on the two statistics; unset means 3x the sample median.
  std::optional<double> linear_threshold;
  std::optional<double> correlation_threshold;
  double median_factor = 3.0;
};

struct FlaggedTuple {
  ShiftTuple b;
  TupleClass classification;
  /// "diagonal", "linear" or "correlation".
  std::string statistic;
  double value;
};

struct ScanResult {
  std::uint32_t q = 0;
  int k = 0;
  bool exhaustive = false;
  std::size_t examined = 0;
  std::size_t generic_flagged = 0;
  std::size_t diagonal = 0;
  double linear_threshold = 0;
  double correlation_threshold = 0;
  std::vector<FlaggedTuple> flagged;
  /// Fraction of examined tuples that were flagged.
  double flagged_fraction() const {
    return examined ? static_cast<double>(flagged.size()) / static_cast<double>(examined) : 0.0;
  }
};

ScanResult scan_bad_tuples(const SumProductContext& ctx, const ScanOptions& options = {});

}  // namespace klab
