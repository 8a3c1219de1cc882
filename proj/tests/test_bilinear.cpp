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

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "klab/bilinear.hpp"
#include "klab/error.hpp"

namespace klab {
namespace {

using cd = std::complex<double>;

KloostermanTable table(int k, std::int64_t q) { return kloosterman_table(k, build_extension(make_prime_field(q), 1)); }

BilinearInstance instance(std::int64_t M, std::int64_t N, std::int64_t offset, std::uint32_t c, std::uint64_t seed) {
  BilinearInstance inst;
  inst.M = M;
  inst.N = N;
  inst.offset = offset;
  inst.c = c;
  inst.alpha = draw_coefficients(Ensemble::Steinhaus, M, seed);
  inst.beta = draw_coefficients(Ensemble::Rademacher, N, seed + 1);
  return inst;
}

TEST(BilinearTest, FormMatchesTransposedLoop) {
  const KloostermanTable t = table(3, 97);
  const BilinearInstance inst = instance(9, 14, 30, 5, 3);
  cd expected = 0;
  for (std::int64_t j = 0; j < inst.N; ++j) {
    for (std::int64_t m = inst.M; m >= 1; --m) {
      const auto arg = static_cast<std::uint32_t>((inst.c * m % 97) * (inst.offset + j) % 97);
      expected += inst.alpha[m - 1] * inst.beta[j] * t[{arg}];
    }
  }
  EXPECT_NEAR(std::abs(bilinear_form(t, inst) - expected), 0.0, 1e-11);
}

TEST(BilinearTest, SingleTermAndZero) {
  const KloostermanTable t = table(2, 31);
  BilinearInstance inst = instance(4, 6, 3, 2, 1);
  inst.alpha.setZero();
  inst.beta.setZero();
  EXPECT_EQ(bilinear_form(t, inst), cd(0, 0));
  inst.alpha[2] = 1;  // m = 3
  inst.beta[4] = 1;   // n = 3 + 4 = 7
  EXPECT_NEAR(std::abs(bilinear_form(t, inst) - t[{(2 * 3 * 7) % 31}]), 0.0, 1e-15);
}

TEST(BilinearTest, InstanceValidation) {
  const KloostermanTable t = table(2, 31);
  BilinearInstance inst = instance(4, 6, 28, 1, 1);  // interval runs past q - 1
  EXPECT_THROW(bilinear_form(t, inst), Error);
  inst = instance(4, 6, 1, 0, 1);
  EXPECT_THROW(bilinear_form(t, inst), Error);
}

TEST(BilinearTest, TrivialBoundDominates) {
  const KloostermanTable t = table(2, 211);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BilinearInstance inst = instance(12, 17, 5, 3, seed);
    EXPECT_LE(std::abs(bilinear_form(t, inst)), 2 * trivial_bound(inst) + 1e-9);
  }
  const CoefficientNorms n = norms_of(instance(12, 17, 5, 3, 1));
  EXPECT_NEAR(n.alpha1, 12.0, 1e-12);
  EXPECT_NEAR(n.alpha2, std::sqrt(12.0), 1e-12);
  EXPECT_NEAR(n.beta2, std::sqrt(17.0), 1e-12);
}

TEST(BilinearTest, OperatorNormMatchesSvd) {
  const KloostermanTable t = table(2, 101);
  for (auto [M, N] : {std::pair{7, 7}, std::pair{5, 13}, std::pair{13, 4}}) {
    const Eigen::MatrixXcd kernel = kernel_matrix(t, 1, M, N, 2);
    const OperatorNorm op = operator_norm(kernel);
    const double svd = Eigen::JacobiSVD<Eigen::MatrixXcd>(kernel).singularValues()(0);
    EXPECT_NEAR(op.sigma, svd, 1e-7 * svd);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(kernel.adjoint() * kernel);
    EXPECT_NEAR(op.sigma * op.sigma, eig.eigenvalues().maxCoeff(), 1e-6 * svd * svd);
    EXPECT_NEAR((kernel * op.right).norm(), op.sigma, 1e-6 * svd);
  }
}

TEST(BilinearTest, OperatorNormReportsNonConvergence) {
  const KloostermanTable t = table(2, 101);
  PowerIterationOptions tight;
  tight.max_iterations = 2;
  tight.tolerance = 1e-15;
  try {
    operator_norm(t, 1, 10, 10, 1, tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
  }
}

TEST(BilinearTest, ShiftIdentityHolds) {
  const KloostermanTable t = table(2, 101);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ShiftCheck sc = shift_identity_check(t, 3, draw_coefficients(Ensemble::Steinhaus, 5, seed), 1, 20, 2, 3);
    EXPECT_LT(sc.deviation, 1e-12);
  }
}

TEST(BilinearTest, ShiftIdentityRejectsBadParameters) {
  const KloostermanTable t = table(2, 101);
  try {
    // 2B < q fails.
    shift_identity_check(t, 1, draw_coefficients(Ensemble::AllOnes, 5, 1), 1, 20, 1, 60);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolated);
  }
}

TEST(BilinearTest, BracketSavingsAtSquareRoot) {
  const double q = 2003;
  const double r = std::sqrt(q);
  EXPECT_NEAR(bracket_saving_exponent(typeII_terms(r, r, q), q), 1.0 / 64, 1e-12);
  EXPECT_NEAR(bracket_saving_exponent(typeI_terms(r, r, q), q), 1.0 / 24, 1e-12);
  // Polya-Vinogradov is trivial at the square root.
  EXPECT_LT(bracket_saving_exponent(pv_terms(r, r, q), q), 0.0);
}

TEST(BilinearTest, NontrivialThresholds) {
  for (double q : {2003.0, 1e6 + 3}) {
    EXPECT_NEAR(nontrivial_threshold(Bracket::TypeII, q), 11.0 / 24, 1e-6);
    EXPECT_NEAR(nontrivial_threshold(Bracket::TypeI, q), 3.0 / 7, 1e-6);
  }
}

TEST(BilinearTest, HypothesesAreChecked) {
  const double q = 10007;
  EXPECT_FALSE(typeII_hypothesis_failure(100, 100, q).has_value());
  EXPECT_TRUE(typeII_hypothesis_failure(1000, 1000, q).has_value());  // MN >= q^(5/4)
  EXPECT_TRUE(typeI_hypothesis_failure(1e4, 50, q).has_value());      // M > N^2
  const CoefficientNorms n{10, std::sqrt(10.0), std::sqrt(10.0)};
  EXPECT_THROW(typeII_bound(n, 1000, 1000, q), Error);
  EXPECT_THROW(typeI_bound(1e4, 50, q, n), Error);
  EXPECT_NO_THROW(typeI_bound(100, 100, q, n));
}

TEST(BilinearTest, PlansFlagConstraints) {
  const ParameterPlan p = plan_parameters_typeII(30, 60, 10007);
  EXPECT_EQ(p.two_b_below_q, 2.0 * static_cast<double>(p.B) < 10007);
  EXPECT_EQ(p.ab_within_n, p.A * p.B <= 60);
  EXPECT_EQ(p.am_below_q, p.A * 30 < 10007);
  const ParameterPlan bad = make_plan(100, 100, 200, 50, 101);
  EXPECT_FALSE(bad.satisfied());
  EXPECT_FALSE(bad.two_b_below_q);
  EXPECT_FALSE(bad.ab_within_n);
  EXPECT_FALSE(bad.am_below_q);
}

TEST(BilinearTest, CoefficientDrawsAreSeeded) {
  EXPECT_EQ(draw_coefficients(Ensemble::Steinhaus, 8, 5), draw_coefficients(Ensemble::Steinhaus, 8, 5));
  EXPECT_NE(draw_coefficients(Ensemble::Steinhaus, 8, 5), draw_coefficients(Ensemble::Steinhaus, 8, 6));
  const Eigen::VectorXcd r = draw_coefficients(Ensemble::Rademacher, 50, 1);
  for (Eigen::Index i = 0; i < r.size(); ++i) EXPECT_EQ(std::abs(r[i]), 1.0);
}

TEST(BilinearTest, SweepRowsAreConsistent) {
  const KloostermanTable t = table(2, 211);
  SweepSpec spec;
  spec.sizes = {{10, 15}, {15, 15}};
  spec.samples = 2;
  const auto rows = saving_sweep(t, spec);
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) {
    EXPECT_GE(r.trivial, r.measured - 1e-9);
    EXPECT_GE(r.pv, 0.0);
    if (r.ensemble != Ensemble::AllOnes) EXPECT_TRUE(std::isnan(r.type_i));
    if (r.measured > 0) EXPECT_NEAR(r.gamma, std::log(r.trivial / r.measured) / std::log(211.0), 1e-12);
  }
  EXPECT_EQ(saving_sweep(t, spec).size(), rows.size());
}

}  // namespace
}  // namespace klab
