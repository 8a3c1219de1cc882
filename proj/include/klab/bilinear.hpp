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

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "klab/kloosterman.hpp"

namespace klab {

struct BilinearInstance {
  std::int64_t M = 0;
  std::int64_t N = 0;
  /// First element of the N-interval, in [1, q-1].
  std::int64_t offset = 1;
  Eigen::VectorXcd alpha;
  Eigen::VectorXcd beta;
  std::uint32_t c = 1;
};

struct CoefficientNorms {
  double alpha1 = 0;
  double alpha2 = 0;
  double beta2 = 0;
};

CoefficientNorms norms_of(const BilinearInstance& inst);

/// Validates the interval and coefficient lengths against q.
void validate_instance(const BilinearInstance& inst, std::uint32_t q);

/// M x N matrix with entries K(c m n), m = 1..M, n = offset..offset+N-1.
Eigen::MatrixXcd kernel_matrix(const KloostermanTable& table, std::uint32_t c, std::int64_t M, std::int64_t N,
                               std::int64_t offset, std::uint64_t cap = 50'000'000);

std::complex<double> bilinear_form(const KloostermanTable& table, const BilinearInstance& inst,
                                   std::uint64_t cap = 50'000'000);

double trivial_bound(const BilinearInstance& inst);
double trivial_bound(const CoefficientNorms& norms, double M, double N);

// Bracket factors multiplying the trivial bound, one entry per term.
std::vector<double> pv_terms(double M, double N, double q);
std::vector<double> typeII_terms(double M, double N, double q);
/// (M^2 N^5 / q^3)^{-1/12}, relative to the type I trivial bound.
std::vector<double> typeI_terms(double M, double N, double q);

double pv_bound(const BilinearInstance& inst, double q);

/// Name of the first failing condition among 1 <= M <= N q^{1/4}, q^{1/4} < MN < q^{5/4}.
std::optional<std::string> typeII_hypothesis_failure(double M, double N, double q);
/// Name of the first failing condition among 1 <= M <= N^2, N < q, MN < q^{3/2}.
std::optional<std::string> typeI_hypothesis_failure(double M, double N, double q);

double typeII_bound(const BilinearInstance& inst, double q);
double typeII_bound(const CoefficientNorms& norms, double M, double N, double q);
double typeI_bound(double M, double N, double q, const CoefficientNorms& norms);
/// ||alpha||_1^{1/2} ||alpha||_2^{1/2} M^{1/4} N.
double typeI_trivial_bound(double M, double N, const CoefficientNorms& norms);

/// -log_q of the dominant bracket term.
double bracket_saving_exponent(const std::vector<double>& terms, double q);

enum class Bracket { PolyaVinogradov, TypeII, TypeI };
std::string_view to_string(Bracket bracket);

std::vector<double> bracket_terms(Bracket bracket, double M, double N, double q);

/// Exponent theta where the bracket at M = N = q^theta stops saving, by bisection on [lo, hi].
double nontrivial_threshold(Bracket bracket, double q, double lo = 0.25, double hi = 0.75, double tol = 1e-12);

struct OperatorNorm {
  double sigma = 0;
  int iterations = 0;
  double gap = 0;
  /// Top right singular vector (length N) and the matching left vector (length M).
  Eigen::VectorXcd right;
  Eigen::VectorXcd left;
};

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 10'000;
};

/// Largest singular value of a matrix by power iteration on its Gram matrix.
OperatorNorm operator_norm(const Eigen::MatrixXcd& matrix, const PowerIterationOptions& options = {});

OperatorNorm operator_norm(const KloostermanTable& table, std::uint32_t c, std::int64_t M, std::int64_t N,
                           std::int64_t offset, const PowerIterationOptions& options = {});

struct ShiftCheck {
  std::complex<double> lhs;
  std::complex<double> rhs;
  double deviation = 0;
};

/// Evaluates both sides of the shift-by-ab re-indexing with beta the indicator of the interval.
ShiftCheck shift_identity_check(const KloostermanTable& table, std::uint32_t c, const Eigen::VectorXcd& alpha,
                                std::int64_t offset, std::int64_t N, std::int64_t A, std::int64_t B);

struct ParameterPlan {
  std::int64_t A = 1;
  std::int64_t B = 1;
  double A_real = 1;
  double B_real = 1;
  bool two_b_below_q = false;
  bool ab_within_n = false;
  bool am_below_q = false;
  bool satisfied() const { return two_b_below_q && ab_within_n && am_below_q; }
};

ParameterPlan make_plan(double A_real, double B_real, double M, double N, double q);
ParameterPlan plan_parameters_typeI(double M, double N, double q);
ParameterPlan plan_parameters_typeII(double M, double N, double q);

enum class Ensemble { Steinhaus, Rademacher, AllOnes, Extremal };
std::string_view to_string(Ensemble ensemble);

Eigen::VectorXcd draw_coefficients(Ensemble ensemble, std::int64_t length, std::uint64_t seed);

struct BoundReport {
  std::uint32_t q = 0;
  int k = 0;
  std::uint32_t c = 1;
  std::int64_t M = 0;
  std::int64_t N = 0;
  std::int64_t offset = 1;
  Ensemble ensemble = Ensemble::AllOnes;
  std::uint64_t seed = 0;
  double measured = 0;
  double trivial = 0;
  double pv = 0;
  /// NaN when the bound's hypotheses fail for (M, N, q) or, for type_i, when beta is not an indicator.
  double type_ii = 0;
  double type_i = 0;
  double gamma = 0;
  std::optional<ParameterPlan> plan;
};

struct SweepSpec {
  std::uint32_t c = 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> sizes;
  std::int64_t offset = 1;
  std::vector<Ensemble> ensembles = {Ensemble::Steinhaus, Ensemble::Rademacher, Ensemble::AllOnes};
  std::size_t samples = 4;
  std::uint64_t seed = 1;
  bool include_extremal = true;
};

std::vector<BoundReport> saving_sweep(const KloostermanTable& table, const SweepSpec& spec);

}  // namespace klab
