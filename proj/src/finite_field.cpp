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

#include "klab/finite_field.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "klab/error.hpp"

namespace klab {

namespace {

using Poly = std::vector<std::uint32_t>;  // coefficients low to high

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Remainder of a modulo a monic polynomial f.
Poly poly_mod(Poly a, const Poly& f, const PrimeField& F) {
  const std::size_t df = f.size() - 1;
  trim(a);
  while (a.size() > df) {
    const std::uint32_t lead = a.back();
    const std::size_t shift = a.size() - 1 - df;
    for (std::size_t i = 0; i < df; ++i) {
      a[shift + i] = F.sub(a[shift + i], F.mul(lead, f[i]));
    }
    a.pop_back();
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, const PrimeField& F) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
  }
  return poly_mod(std::move(c), f, F);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, const PrimeField& F) {
  Poly result{1};
  base = poly_mod(std::move(base), f, F);
  while (e > 0) {
    if (e & 1) result = poly_mulmod(result, base, f, F);
    e >>= 1;
    if (e) base = poly_mulmod(base, base, f, F);
  }
  return poly_mod(std::move(result), f, F);
}

// Monic-normalised gcd.
Poly poly_gcd(Poly a, Poly b, const PrimeField& F) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    const std::uint32_t inv_lead = F.inv(b.back());
    Poly monic_b = b;
    for (auto& c : monic_b) c = F.mul(c, inv_lead);
    Poly r = poly_mod(a, monic_b, F);
    a = std::move(monic_b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const std::uint32_t inv_lead = F.inv(a.back());
    for (auto& c : a) c = F.mul(c, inv_lead);
  }
  return a;
}

// x^{q^n} mod f by repeated Frobenius.
Poly frobenius_x(std::uint64_t n, const Poly& f, const PrimeField& F) {
  Poly h{0, 1};
  h = poly_mod(std::move(h), f, F);
  for (std::uint64_t i = 0; i < n; ++i) h = poly_powmod(h, F.q(), f, F);
  return h;
}

Poly sub_x(Poly h, const PrimeField& F) {
  if (h.size() < 2) h.resize(2, 0);
  h[1] = F.sub(h[1], 1);
  trim(h);
  return h;
}

}  // namespace

std::uint32_t PrimeField::pow(std::uint32_t a, std::uint64_t e) const noexcept {
  std::uint64_t result = 1 % q_, base = a % q_;
  while (e > 0) {
    if (e & 1) result = result * base % q_;
    base = base * base % q_;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(result);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  const auto mulmod = [n](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
  };
  const auto powmod = [&](std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mulmod(r, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is deterministic for all 64-bit n.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

PrimeField make_prime_field(std::int64_t q) {
  if (q < 3) throw Error(ErrorKind::TooSmall, "modulus " + std::to_string(q) + " is below 3");
  if (q > 0xFFFFFFFFll || !is_prime(static_cast<std::uint64_t>(q))) {
    throw Error(ErrorKind::CompositeModulus, std::to_string(q) + " is not prime");
  }
  return PrimeField(static_cast<std::uint32_t>(q));
}

bool is_irreducible(const PrimeField& F, std::span<const std::uint32_t> monic) {
  Poly f(monic.begin(), monic.end());
  trim(f);
  if (f.size() < 2 || f.back() != 1) return false;
  const std::uint64_t d = f.size() - 1;
  if (d == 1) return true;
  if (sub_x(frobenius_x(d, f, F), F).size() != 0) return false;
  for (std::uint64_t p : prime_factors(d)) {
    const Poly g = poly_gcd(f, sub_x(frobenius_x(d / p, f, F), F), F);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<std::uint32_t> smallest_irreducible(const PrimeField& F, int d) {
  const std::uint32_t q = F.q();
  Poly f(static_cast<std::size_t>(d) + 1, 0);
  f[d] = 1;
  // Counter over (c_{d-1}, ..., c_0) with c_0 the fastest digit.
  for (;;) {
    if (is_irreducible(F, f)) return f;
    int i = 0;
    while (i < d) {
      if (++f[i] < q) break;
      f[i] = 0;
      ++i;
    }
    if (i == d) throw Error(ErrorKind::ResourceLimit, "no irreducible polynomial found");
  }
}

ExtField::ExtField(PrimeField base, int d, std::vector<std::uint32_t> modulus)
    : base_(base), d_(d), size_(1), modulus_(std::move(modulus)) {
  for (int i = 0; i < d; ++i) size_ *= base_.q();
}

ExtFieldPtr build_extension(const PrimeField& f, int d, std::uint64_t size_cap) {
  if (d < 1) throw Error(ErrorKind::OutOfRange, "extension degree must be >= 1");
  std::uint64_t size = 1;
  for (int i = 0; i < d; ++i) {
    size *= f.q();
    if (size > size_cap || size > 0xFFFFFFFFull) {
      throw Error(ErrorKind::ResourceLimit, "field size q^d exceeds the configured cap");
    }
  }
  auto field = std::shared_ptr<ExtField>(new ExtField(f, d, smallest_irreducible(f, d)));
  field->build_tables();
  return field;
}

ExtElement ExtField::from_coeffs(std::span<const std::uint32_t> c) const {
  std::uint32_t code = 0, mult = 1;
  for (int i = 0; i < d_; ++i) {
    const std::uint32_t ci = i < static_cast<int>(c.size()) ? c[i] % q() : 0;
    code += ci * mult;
    mult *= q();
  }
  return {code};
}

std::vector<std::uint32_t> ExtField::coeffs(ExtElement x) const {
  std::vector<std::uint32_t> c(static_cast<std::size_t>(d_));
  std::uint32_t v = x.code;
  for (int i = 0; i < d_; ++i) {
    c[i] = v % q();
    v /= q();
  }
  return c;
}

ExtElement ExtField::add(ExtElement a, ExtElement b) const noexcept {
  if (d_ == 1) return {base_.add(a.code, b.code)};
  std::uint32_t r = 0, mult = 1, x = a.code, y = b.code;
  const std::uint32_t q = base_.q();
  for (int i = 0; i < d_; ++i) {
    r += base_.add(x % q, y % q) * mult;
    x /= q;
    y /= q;
    mult *= q;
  }
  return {r};
}

ExtElement ExtField::neg(ExtElement a) const noexcept {
  if (d_ == 1) return {a.code == 0 ? 0 : base_.q() - a.code};
  std::uint32_t r = 0, mult = 1, x = a.code;
  const std::uint32_t q = base_.q();
  for (int i = 0; i < d_; ++i) {
    r += base_.sub(0, x % q) * mult;
    x /= q;
    mult *= q;
  }
  return {r};
}

ExtElement ExtField::sub(ExtElement a, ExtElement b) const noexcept { return add(a, neg(b)); }

ExtElement ExtField::pow(ExtElement a, std::int64_t e) const noexcept {
  if (a.code == 0) return {e == 0 ? 1u : 0u};
  const std::int64_t n = group_order();
  std::int64_t l = static_cast<std::int64_t>((static_cast<__int128>(log_[a.code]) * (e % n)) % n);
  if (l < 0) l += n;
  return {exp_[static_cast<std::size_t>(l)]};
}

ExtElement ExtField::mul_poly(ExtElement a, ExtElement b) const {
  if (d_ == 1) return {base_.mul(a.code, b.code)};
  const Poly pa = coeffs(a), pb = coeffs(b);
  const Poly r = poly_mulmod(pa, pb, modulus_, base_);
  return from_coeffs(r);
}

ExtElement ExtField::pow_poly(ExtElement a, std::uint64_t e) const {
  if (d_ == 1) return {base_.pow(a.code, e)};
  return from_coeffs(poly_powmod(coeffs(a), e, modulus_, base_));
}

ExtElement ExtField::inv_poly(ExtElement a) const { return pow_poly(a, size_ - 2); }

std::uint32_t ExtField::trace_frobenius(ExtElement x) const {
  ExtElement acc = zero(), power = x;
  for (int i = 0; i < d_; ++i) {
    acc = add(acc, power);
    power = pow_poly(power, q());
  }
  // The trace lies in F_q, i.e. only the constant coefficient survives.
  return coeffs(acc)[0];
}

void ExtField::build_tables() {
  const std::uint32_t n = group_order();
  const auto factors = prime_factors(n);
  ExtElement g{0};
  for (std::uint32_t c = 1; c < size_; ++c) {
    bool full_order = true;
    for (std::uint64_t p : factors) {
      if (pow_poly({c}, n / p) == one()) {
        full_order = false;
        break;
      }
    }
    if (full_order) {
      g = {c};
      break;
    }
  }

  exp_.resize(n);
  log_.assign(size_, 0);
  ExtElement cur = one();
  for (std::uint32_t i = 0; i < n; ++i) {
    exp_[i] = cur.code;
    log_[cur.code] = i;
    cur = mul_poly(cur, g);
  }

  std::vector<std::uint32_t> basis_trace(static_cast<std::size_t>(d_));
  std::uint32_t basis = 1;
  for (int i = 0; i < d_; ++i) {
    basis_trace[i] = trace_frobenius({basis});
    basis *= q();
  }
  trace_.resize(size_);
  for (std::uint32_t x = 0; x < size_; ++x) {
    std::uint32_t v = x, t = 0;
    for (int i = 0; i < d_; ++i) {
      t = base_.add(t, base_.mul(v % q(), basis_trace[i]));
      v /= q();
    }
    trace_[x] = t;
  }

  roots_.resize(q());
  for (std::uint32_t j = 0; j < q(); ++j) {
    roots_[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q()));
  }
}

}  // namespace klab
