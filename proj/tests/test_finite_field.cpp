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

#include <cmath>
#include <numbers>
#include <set>

#include "klab/error.hpp"
#include "klab/finite_field.hpp"

namespace klab {
namespace {

TEST(PrimeFieldTest, RejectsBadModuli) {
  EXPECT_THROW(make_prime_field(2), Error);
  EXPECT_THROW(make_prime_field(15), Error);
  try {
    make_prime_field(91);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CompositeModulus);
  }
  EXPECT_NO_THROW(make_prime_field(101));
}

TEST(PrimeFieldTest, InverseAndPow) {
  const PrimeField f = make_prime_field(97);
  for (std::uint32_t a = 1; a < 97; ++a) EXPECT_EQ(f.mul(a, f.inv(a)), 1u);
  EXPECT_EQ(f.pow(5, 96), 1u);
}

class ExtFieldTest : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(ExtFieldTest, TableArithmeticMatchesPolynomialArithmetic) {
  const auto [q, d] = GetParam();
  auto field = build_extension(make_prime_field(q), d);
  ASSERT_EQ(field->size(), static_cast<std::uint32_t>(std::pow(q, d)));
  for (std::uint32_t a = 0; a < field->size(); a += 3) {
    for (std::uint32_t b = 0; b < field->size(); b += 7) {
      EXPECT_EQ(field->mul({a}, {b}), field->mul_poly({a}, {b}));
    }
    if (a != 0) EXPECT_EQ(field->inv({a}), field->inv_poly({a}));
  }
}

TEST_P(ExtFieldTest, GeneratorHasFullOrder) {
  const auto [q, d] = GetParam();
  auto field = build_extension(make_prime_field(q), d);
  std::set<std::uint32_t> seen;
  for (std::uint32_t e = 0; e < field->group_order(); ++e) seen.insert(field->exp(e).code);
  EXPECT_EQ(seen.size(), field->group_order());
  for (std::uint32_t a = 1; a < field->size(); ++a) EXPECT_EQ(field->exp(field->log({a})).code, a);
}

TEST_P(ExtFieldTest, TraceMatchesFrobeniusSum) {
  const auto [q, d] = GetParam();
  auto field = build_extension(make_prime_field(q), d);
  for (std::uint32_t a = 0; a < field->size(); ++a) {
    EXPECT_EQ(field->trace({a}), field->trace_frobenius({a}));
  }
  // On the base field the trace is multiplication by d.
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(q); ++x) {
    EXPECT_EQ(field->trace({x}), field->base().mul(x, static_cast<std::uint32_t>(d % q)));
  }
}

TEST_P(ExtFieldTest, TraceIsAdditive) {
  const auto [q, d] = GetParam();
  auto field = build_extension(make_prime_field(q), d);
  const PrimeField& fq = field->base();
  for (std::uint32_t a = 0; a < field->size(); a += 5)
    for (std::uint32_t b = 0; b < field->size(); b += 11)
      EXPECT_EQ(field->trace(field->add({a}, {b})), fq.add(field->trace({a}), field->trace({b})));
}

TEST_P(ExtFieldTest, AdditiveCharacterSumsVanish) {
  const auto [q, d] = GetParam();
  auto field = build_extension(make_prime_field(q), d);
  for (std::uint32_t lambda : {1u, 2u, field->size() - 1}) {
    std::complex<double> total = 0;
    for (std::uint32_t x = 0; x < field->size(); ++x) total += field->psi({lambda}, {x});
    EXPECT_LT(std::abs(total), 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Fields, ExtFieldTest,
                         ::testing::Values(std::pair{7, 1}, std::pair{5, 2}, std::pair{3, 4}, std::pair{13, 2},
                                           std::pair{5, 3}));

TEST(ExtFieldTest, ModulusIsIrreducible) {
  const PrimeField f = make_prime_field(7);
  for (int d = 1; d <= 4; ++d) {
    const auto m = smallest_irreducible(f, d);
    EXPECT_EQ(m.size(), static_cast<std::size_t>(d + 1));
    EXPECT_TRUE(is_irreducible(f, m));
  }
  // x^2 + 1 splits mod 5.
  const PrimeField f5 = make_prime_field(5);
  const std::vector<std::uint32_t> split = {1, 0, 1};
  EXPECT_FALSE(is_irreducible(f5, split));
}

TEST(ExtFieldTest, CoefficientsRoundTrip) {
  auto field = build_extension(make_prime_field(5), 3);
  for (std::uint32_t a = 0; a < field->size(); ++a) {
    EXPECT_EQ(field->from_coeffs(field->coeffs({a})).code, a);
  }
}

}  // namespace
}  // namespace klab
