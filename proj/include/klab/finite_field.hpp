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
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace klab {

/// The prime field F_q for an odd prime q.
class PrimeField {
 public:
  std::uint32_t q() const noexcept { return q_; }

  std::uint32_t reduce(std::int64_t x) const noexcept {
    const std::int64_t r = x % static_cast<std::int64_t>(q_);
    return static_cast<std::uint32_t>(r < 0 ? r + q_ : r);
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
    const std::uint32_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept { return a >= b ? a - b : a + q_ - b; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % q_);
  }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept;
  /// Inverse of a nonzero residue.
  std::uint32_t inv(std::uint32_t a) const noexcept { return pow(a, q_ - 2); }

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  friend PrimeField make_prime_field(std::int64_t q);
  explicit PrimeField(std::uint32_t q) : q_(q) {}
  std::uint32_t q_;
};

/// Throws CompositeModulus / TooSmall.
PrimeField make_prime_field(std::int64_t q);

bool is_prime(std::uint64_t n);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// An element of F_{q^d}, encoded as sum_i c_i q^i where c_i is the
/// coefficient of t^i in the canonical residue modulo the defining polynomial.
struct ExtElement {
  std::uint32_t code = 0;
  friend auto operator<=>(const ExtElement&, const ExtElement&) = default;
};

/// F_{q^d} = F_q[t]/(f) with f the lexicographically smallest monic
/// irreducible of degree d. Construction also tabulates discrete logarithms
/// to a fixed generator and the absolute trace of every element, so the
/// object is O(q^d) in memory. Immutable once built.
class ExtField {
 public:
  static constexpr std::uint64_t kDefaultSizeCap = 20'000'000;

  const PrimeField& base() const noexcept { return base_; }
  std::uint32_t q() const noexcept { return base_.q(); }
  int degree() const noexcept { return d_; }
  /// q^d.
  std::uint32_t size() const noexcept { return size_; }
  /// q^d - 1, the order of the multiplicative group.
  std::uint32_t group_order() const noexcept { return size_ - 1; }
  /// Coefficients c_0..c_d of the monic modulus (c_d = 1).
  std::span<const std::uint32_t> modulus() const noexcept { return modulus_; }

  ExtElement zero() const noexcept { return {0}; }
  ExtElement one() const noexcept { return {1}; }
  /// Embeds an integer through F_q.
  ExtElement from_int(std::int64_t x) const noexcept { return {base_.reduce(x)}; }
  ExtElement from_coeffs(std::span<const std::uint32_t> coeffs) const;
  std::vector<std::uint32_t> coeffs(ExtElement x) const;
  bool in_base_field(ExtElement x) const noexcept { return x.code < q(); }

  ExtElement add(ExtElement a, ExtElement b) const noexcept;
  ExtElement sub(ExtElement a, ExtElement b) const noexcept;
  ExtElement neg(ExtElement a) const noexcept;

  // Table-driven multiplicative arithmetic.
  ExtElement mul(ExtElement a, ExtElement b) const noexcept {
    if (a.code == 0 || b.code == 0) return {0};
    std::uint32_t e = log_[a.code] + log_[b.code];
    if (e >= group_order()) e -= group_order();
    return {exp_[e]};
  }
  /// Inverse of a nonzero element.
  ExtElement inv(ExtElement a) const noexcept {
    const std::uint32_t l = log_[a.code];
    return {exp_[l == 0 ? 0 : group_order() - l]};
  }
  ExtElement div(ExtElement a, ExtElement b) const noexcept { return mul(a, inv(b)); }
  ExtElement pow(ExtElement a, std::int64_t e) const noexcept;

  /// The fixed generator of F_{q^d}^x (smallest encoding of full order).
  ExtElement generator() const noexcept { return {exp_.size() > 1 ? exp_[1] : 1}; }
  /// Discrete log of a nonzero element to the base generator().
  std::uint32_t log(ExtElement a) const noexcept { return log_[a.code]; }
  ExtElement exp(std::uint64_t e) const noexcept { return {exp_[e % group_order()]}; }

  /// Absolute trace to F_q, from the precomputed table.
  std::uint32_t trace(ExtElement x) const noexcept { return trace_[x.code]; }

  /// e(j/q) for j in [0, q).
  std::complex<double> unit_root(std::uint32_t j) const noexcept { return roots_[j]; }
  /// psi_lambda(x) = e(Tr(lambda x)/q).
  std::complex<double> psi(ExtElement lambda, ExtElement x) const noexcept {
    return roots_[trace_[mul(lambda, x).code]];
  }

  // Reference arithmetic straight from polynomial multiplication modulo the
  // defining polynomial. Independent of the log/trace tables; used by
  // construction and by the oracle code paths.
  ExtElement mul_poly(ExtElement a, ExtElement b) const;
  ExtElement pow_poly(ExtElement a, std::uint64_t e) const;
  ExtElement inv_poly(ExtElement a) const;
  /// Tr(x) = sum_{i<d} x^{q^i}, evaluated with Frobenius powers.
  std::uint32_t trace_frobenius(ExtElement x) const;

 private:
  friend std::shared_ptr<const ExtField> build_extension(const PrimeField& f, int d, std::uint64_t size_cap);
  ExtField(PrimeField base, int d, std::vector<std::uint32_t> modulus);
  void build_tables();

  PrimeField base_;
  int d_;
  std::uint32_t size_;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> trace_;
  std::vector<std::complex<double>> roots_;
};

using ExtFieldPtr = std::shared_ptr<const ExtField>;

/// Throws ResourceLimit when q^d exceeds size_cap.
ExtFieldPtr build_extension(const PrimeField& f, int d,
                            std::uint64_t size_cap = ExtField::kDefaultSizeCap);

/// Smallest monic irreducible of degree d over F_q, lexicographic on
/// (c_{d-1}, ..., c_0). Coefficients returned low to high, leading 1 included.
std::vector<std::uint32_t> smallest_irreducible(const PrimeField& f, int d);

/// Rabin's test: x^{q^d} = x mod f and gcd(x^{q^{d/p}} - x, f) = 1 for p | d.
bool is_irreducible(const PrimeField& f, std::span<const std::uint32_t> monic);

inline std::uint32_t trace(const ExtField& field, ExtElement x) { return field.trace(x); }
inline std::complex<double> psi(const ExtField& field, ExtElement lambda, ExtElement x) {
  return field.psi(lambda, x);
}
inline ExtElement mult_generator(const ExtField& field) { return field.generator(); }

}  // namespace klab
