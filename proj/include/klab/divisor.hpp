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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "klab/kloosterman.hpp"

namespace klab {

using int128 = __int128;

std::string int128_to_string(int128 v);

/// Hecke eigenvalues of the weight 12 level 1 cusp form, exact and normalized.
struct CuspFormCoeffs {
  std::int64_t n_max = 0;
  /// tau[n] for 0 <= n <= n_max; tau[0] = 0.
  std::vector<int128> tau;
  /// lambda[n] = tau(n) / n^{11/2}.
  std::vector<double> lambda;
  /// (tau * 1)(n) = sum_{d | n} tau(d), exact.
  std::vector<int128> tau_star;
  /// (lambda * 1)(n) = sum_{d | n} lambda(d).
  std::vector<double> lambda_star;
};

inline constexpr std::int64_t kTauTableMax = 1'000'000;

/// Coefficients of q (sum_n (-1)^n (2n+1) q^{n(n+1)/2})^8 with checked 128-bit arithmetic.
CuspFormCoeffs tau_table(std::int64_t n_max);

/// sigma_11(n) mod m for 0 <= n <= n_max.
std::vector<std::uint32_t> sigma11_mod(std::int64_t n_max, std::uint32_t m);

double lambda_star_one(const CuspFormCoeffs& coeffs, std::int64_t n);
int128 tau_star_one(const CuspFormCoeffs& coeffs, std::int64_t n);

struct ProgressionReport {
  std::int64_t x = 0;
  std::int64_t q = 0;
  std::int64_t a = 0;
  double raw = 0;
  double main = 0;
  double E = 0;
  double normalized = 0;
  /// Exact (tau * 1) progression sum and phi(q) times the exact discrepancy.
  int128 raw_exact = 0;
  int128 phi_E_exact = 0;
};

ProgressionReport discrepancy(const CuspFormCoeffs& coeffs, std::int64_t x, std::int64_t q, std::int64_t a);

struct ProgressionScan {
  std::int64_t x = 0;
  std::int64_t q = 0;
  std::vector<ProgressionReport> reports;
  /// Sum over reduced residues of phi(q) E in the exact form.
  int128 exact_total = 0;
  double float_total = 0;
  double max_normalized = 0;
};

/// Every reduced residue a mod q in one pass over n <= x.
ProgressionScan progression_scan(const CuspFormCoeffs& coeffs, std::int64_t x, std::int64_t q);

/// q^{-1/2} sum_x K(x) e(ux/q).
std::complex<double> khat(const Eigen::VectorXcd& K, std::int64_t u);

/// q^{-1/2} sum_{u != 0} K(u) Kl_3(mu; q).
std::complex<double> ktilde(const Eigen::VectorXcd& K, std::int64_t m, const KloostermanTable& kl3);

/// q^{-1/2} sum_{u != 0} khat(u) Kl_2(m / u; q); equals ktilde when K(0) = 0.
std::complex<double> ktilde_dual(const Eigen::VectorXcd& K, std::int64_t m, const KloostermanTable& kl2);

struct CombinedBounds {
  double pv = 0;
  double kl_linear = 0;
  double type_ii_pv = 0;
  double type_i_smooth = 0;
  bool type_i_applicable = false;
  std::optional<std::string> type_i_failure;
};

struct CombinedOptions {
  double Q = 1;
  double C1 = 1;
  /// ||alpha||_2 and ||beta||_2; unset means unit-modulus coefficients.
  std::optional<double> alpha2;
  std::optional<double> beta2;
  /// Throw HypothesisViolated instead of flagging when the smooth type I bound does not apply.
  bool strict = false;
};

CombinedBounds combined_bounds(double M, double N, double q, const CombinedOptions& options = {});

struct BoundExponents {
  /// pv, kl_linear, type II, type II swapped, type I.
  std::array<double, 5> tau{};
  bool type_i_applicable = false;
  double minimum() const;
  int argmin() const;
};

std::string_view bound_name(int index);

BoundExponents bound_exponents(double mu, double nu, double delta);

/// The two replaced bounds mu' + 1/2 and (mu'+nu')/2 + nu'/2 + 3/8.
std::array<double, 2> replaced_exponents(double mu, double nu);

struct ExponentConfig {
  double delta = 0.03;
  std::optional<double> eta;
  double kappa = 1e-3;
  double grid = 1e-3;
  double slack = 0;
  void validate() const;
};

double eta_from_delta(double delta);
double delta_from_eta(double eta);

struct LpPoint {
  double mu = 0;
  double nu = 0;
  double min_tau = 0;
  int case_index = 0;
};

struct LpVerdict {
  ExponentConfig config;
  bool pass = false;
  /// Largest value over the feasible region of the minimum of the five exponents.
  LpPoint worst;
  std::vector<LpPoint> witnesses;
  std::size_t points = 0;
};

/// Maximizes min_i tau_i over 1 <= mu'+nu' <= 1+delta+slack, mu', nu' >= 0, nu' <= 1+slack.
LpVerdict exponent_case_analysis(const ExponentConfig& config);

struct CriticalDelta {
  double delta_star = 0;
  double eta_star = 0;
  int iterations = 0;
};

/// Supremal delta with worst.min_tau < 1 - kappa, by bisection on [lo, hi].
CriticalDelta critical_delta(double kappa = 0, double slack = 0, double grid = 1e-3, double tol = 1e-7,
                             double lo = 0, double hi = 0.2);

}  // namespace klab
