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

#include "klab/divisor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "klab/error.hpp"
#include "klab/numeric.hpp"

namespace klab {

namespace {

using cd = std::complex<double>;

int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::ResourceLimit, "128-bit overflow");
  return r;
}

int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::ResourceLimit, "128-bit overflow");
  return r;
}

double to_double(int128 v) { return static_cast<double>(v); }

std::int64_t euler_phi(std::int64_t q) {
  std::int64_t result = q;
  for (std::uint64_t p : prime_factors(static_cast<std::uint64_t>(q))) {
    result = result / static_cast<std::int64_t>(p) * (static_cast<std::int64_t>(p) - 1);
  }
  return result;
}

std::uint32_t prime_of(const KloostermanTable& table) {
  if (table.field().degree() != 1) throw Error(ErrorKind::OutOfRange, "needs a prime field table");
  return table.field().q();
}

std::uint32_t mod(std::int64_t x, std::uint32_t q) {
  const std::int64_t r = x % static_cast<std::int64_t>(q);
  return static_cast<std::uint32_t>(r < 0 ? r + q : r);
}

}  // namespace

std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  std::string digits;
  while (v != 0) {
    const int d = static_cast<int>(v % 10);
    digits.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
    v /= 10;
  }
  if (negative) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

CuspFormCoeffs tau_table(std::int64_t n_max) {
  if (n_max < 1 || n_max > kTauTableMax) {
    throw Error(ErrorKind::ResourceLimit, "tau table size must lie in [1, 1e6]");
  }
  // tau(n) is the coefficient of q^{n-1} in J^8; only exponents up to n_max - 1 are kept.
  const std::int64_t len = n_max;
  std::vector<std::pair<std::int64_t, int128>> jacobi;
  for (std::int64_t n = 0;; ++n) {
    const std::int64_t e = n * (n + 1) / 2;
    if (e >= len) break;
    jacobi.push_back({e, static_cast<int128>((n % 2 == 0 ? 1 : -1) * (2 * n + 1))});
  }
  std::vector<int128> power(static_cast<std::size_t>(len), 0);
  for (const auto& [e, c] : jacobi) power[e] = c;
  for (int step = 1; step < 8; ++step) {
    std::vector<int128> next(static_cast<std::size_t>(len), 0);
    for (std::int64_t i = 0; i < len; ++i) {
      if (power[i] == 0) continue;
      for (const auto& [e, c] : jacobi) {
        if (i + e >= len) break;
        next[i + e] = checked_add(next[i + e], checked_mul(power[i], c));
      }
    }
    power.swap(next);
  }

  CuspFormCoeffs out;
  out.n_max = n_max;
  out.tau.assign(static_cast<std::size_t>(n_max) + 1, 0);
  out.lambda.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    out.tau[n] = power[n - 1];
    out.lambda[n] = to_double(out.tau[n]) / std::pow(static_cast<double>(n), 5.5);
  }
  out.tau_star.assign(static_cast<std::size_t>(n_max) + 1, 0);
  out.lambda_star.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (std::int64_t d = 1; d <= n_max; ++d) {
    for (std::int64_t n = d; n <= n_max; n += d) {
      out.tau_star[n] = checked_add(out.tau_star[n], out.tau[d]);
      out.lambda_star[n] += out.lambda[d];
    }
  }
  return out;
}

std::vector<std::uint32_t> sigma11_mod(std::int64_t n_max, std::uint32_t m) {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(std::max<std::int64_t>(n_max, 0)) + 1, 0);
  for (std::int64_t d = 1; d <= n_max; ++d) {
    std::uint64_t p = 1;
    for (int i = 0; i < 11; ++i) p = p * static_cast<std::uint64_t>(d % m) % m;
    for (std::int64_t n = d; n <= n_max; n += d) out[n] = static_cast<std::uint32_t>((out[n] + p) % m);
  }
  return out;
}

double lambda_star_one(const CuspFormCoeffs& coeffs, std::int64_t n) {
  if (n < 1 || n > coeffs.n_max) throw Error(ErrorKind::OutOfRange, "n outside the tau table");
  return coeffs.lambda_star[n];
}

int128 tau_star_one(const CuspFormCoeffs& coeffs, std::int64_t n) {
  if (n < 1 || n > coeffs.n_max) throw Error(ErrorKind::OutOfRange, "n outside the tau table");
  return coeffs.tau_star[n];
}

ProgressionScan progression_scan(const CuspFormCoeffs& coeffs, std::int64_t x, std::int64_t q) {
  if (q < 2) throw Error(ErrorKind::OutOfRange, "modulus must be at least 2");
  if (x < 1 || x > coeffs.n_max) throw Error(ErrorKind::OutOfRange, "x outside the tau table");
  std::vector<CompensatedSum<double>> raw(static_cast<std::size_t>(q));
  std::vector<int128> raw_exact(static_cast<std::size_t>(q), 0);
  for (std::int64_t n = 1; n <= x; ++n) {
    raw[n % q] += coeffs.lambda_star[n];
    raw_exact[n % q] = checked_add(raw_exact[n % q], coeffs.tau_star[n]);
  }
  CompensatedSum<double> coprime;
  int128 coprime_exact = 0;
  for (std::int64_t a = 0; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    coprime += raw[a].value();
    coprime_exact = checked_add(coprime_exact, raw_exact[a]);
  }
  const std::int64_t phi = euler_phi(q);

  ProgressionScan scan;
  scan.x = x;
  scan.q = q;
  CompensatedSum<double> float_total;
  for (std::int64_t a = 1; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    ProgressionReport r;
    r.x = x;
    r.q = q;
    r.a = a;
    r.raw = raw[a].value();
    r.main = coprime.value() / static_cast<double>(phi);
    r.E = r.raw - r.main;
    r.normalized = r.E * static_cast<double>(q) / static_cast<double>(x);
    r.raw_exact = raw_exact[a];
    r.phi_E_exact = checked_add(checked_mul(static_cast<int128>(phi), raw_exact[a]), -coprime_exact);
    scan.exact_total = checked_add(scan.exact_total, r.phi_E_exact);
    float_total += r.E;
    scan.max_normalized = std::max(scan.max_normalized, std::abs(r.normalized));
    scan.reports.push_back(r);
  }
  scan.float_total = float_total.value();
  return scan;
}

ProgressionReport discrepancy(const CuspFormCoeffs& coeffs, std::int64_t x, std::int64_t q, std::int64_t a) {
  if (q < 2) throw Error(ErrorKind::OutOfRange, "modulus must be at least 2");
  const std::int64_t residue = ((a % q) + q) % q;
  if (std::gcd(residue, q) != 1) throw Error(ErrorKind::BadResidue, "a must be coprime to q");
  for (const auto& r : progression_scan(coeffs, x, q).reports) {
    if (r.a == residue) return r;
  }
  throw Error(ErrorKind::BadResidue, "residue not found");
}

cd khat(const Eigen::VectorXcd& K, std::int64_t u) {
  const auto q = static_cast<std::uint32_t>(K.size());
  const std::uint32_t uu = mod(u, q);
  CompensatedSum<cd> acc;
  for (std::uint32_t x = 0; x < q; ++x) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(static_cast<std::uint64_t>(uu) * x % q) / q;
    acc += K[x] * std::polar(1.0, angle);
  }
  return acc.value() / std::sqrt(static_cast<double>(q));
}

cd ktilde(const Eigen::VectorXcd& K, std::int64_t m, const KloostermanTable& kl3) {
  const std::uint32_t q = prime_of(kl3);
  if (static_cast<std::uint32_t>(K.size()) != q) throw Error(ErrorKind::OutOfRange, "K must have length q");
  const PrimeField& f = kl3.field().base();
  const std::uint32_t mm = mod(m, q);
  CompensatedSum<cd> acc;
  for (std::uint32_t u = 1; u < q; ++u) acc += K[u] * kl3[{f.mul(mm, u)}];
  return acc.value() / std::sqrt(static_cast<double>(q));
}

cd ktilde_dual(const Eigen::VectorXcd& K, std::int64_t m, const KloostermanTable& kl2) {
  const std::uint32_t q = prime_of(kl2);
  if (static_cast<std::uint32_t>(K.size()) != q) throw Error(ErrorKind::OutOfRange, "K must have length q");
  const PrimeField& f = kl2.field().base();
  const std::uint32_t mm = mod(m, q);
  CompensatedSum<cd> acc;
  for (std::uint32_t u = 1; u < q; ++u) acc += khat(K, u) * kl2[{f.mul(mm, f.inv(u))}];
  return acc.value() / std::sqrt(static_cast<double>(q));
}

CombinedBounds combined_bounds(double M, double N, double q, const CombinedOptions& options) {
  if (!(M > 0 && N > 0 && q > 1)) throw Error(ErrorKind::HypothesisViolated, "ranges must be positive");
  const double scale = std::pow(options.Q, options.C1);
  CombinedBounds out;
  out.pv = scale * M * N * (1.0 / q + std::sqrt(q) / N);
  out.kl_linear = scale * M * (std::pow(q, -0.125) + std::pow(q, 0.375) / std::sqrt(M));
  const double a2 = options.alpha2.value_or(std::sqrt(M));
  const double b2 = options.beta2.value_or(std::sqrt(N));
  out.type_ii_pv = a2 * b2 * std::sqrt(M * N) * (1.0 / std::sqrt(M) + std::pow(q, 0.25) / std::sqrt(N));
  if (!(1.0 <= M && M <= N * N)) {
    out.type_i_failure = "1 <= M <= N^2";
  } else if (!(N < q)) {
    out.type_i_failure = "N < q";
  } else if (!(M * N <= std::pow(q, 1.5))) {
    out.type_i_failure = "MN <= q^(3/2)";
  }
  out.type_i_applicable = !out.type_i_failure;
  if (out.type_i_applicable) {
    out.type_i_smooth = scale * M * N * std::pow(q, 0.25) * std::pow(M, -1.0 / 6.0) * std::pow(N, -5.0 / 12.0);
  } else if (options.strict) {
    throw Error(ErrorKind::HypothesisViolated, "smooth type I bound needs " + *out.type_i_failure);
  } else {
    out.type_i_smooth = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double BoundExponents::minimum() const { return tau[argmin()]; }

int BoundExponents::argmin() const {
  return static_cast<int>(std::min_element(tau.begin(), tau.end()) - tau.begin());
}

std::string_view bound_name(int index) {
  static constexpr std::array<std::string_view, 5> names = {"pv", "kl-linear", "type-ii", "type-ii-swapped",
                                                            "type-i"};
  return index >= 0 && index < 5 ? names[index] : "unknown";
}

BoundExponents bound_exponents(double mu, double nu, double /*delta*/) {
  BoundExponents out;
  const double s = mu + nu;
  out.tau[0] = s + std::max(-1.0, 0.5 - nu);
  out.tau[1] = s + std::max(-0.125, 0.375 - mu / 2);
  out.tau[2] = s + std::max(-mu / 2, 0.25 - nu / 2);
  out.tau[3] = s + std::max(-nu / 2, 0.25 - mu / 2);
  out.type_i_applicable = 0 <= mu && mu <= 2 * nu;
  out.tau[4] = out.type_i_applicable ? s + 0.25 - mu / 6 - 5 * nu / 12 : std::numeric_limits<double>::infinity();
  return out;
}

std::array<double, 2> replaced_exponents(double mu, double nu) {
  return {mu + 0.5, (mu + nu) / 2 + nu / 2 + 0.375};
}

void ExponentConfig::validate() const {
  if (!(grid > 0 && grid <= 1e-3)) throw Error(ErrorKind::OutOfRange, "grid step must lie in (0, 1e-3]");
  if (slack < 0 || kappa < 0 || delta < 0) throw Error(ErrorKind::OutOfRange, "delta, kappa, slack must be >= 0");
  if (eta && std::abs(delta - delta_from_eta(*eta)) > 1e-12) {
    throw Error(ErrorKind::ConstraintViolated, "delta and eta must satisfy delta = 4 eta / (1 + 2 eta)");
  }
}

double eta_from_delta(double delta) { return delta / (4 - 2 * delta); }
double delta_from_eta(double eta) { return 4 * eta / (1 + 2 * eta); }

LpVerdict exponent_case_analysis(const ExponentConfig& config) {
  config.validate();
  LpVerdict verdict;
  verdict.config = config;
  const double threshold = 1 - config.kappa;
  const double s_max = 1 + config.delta + config.slack;
  verdict.worst.min_tau = -std::numeric_limits<double>::infinity();

  const auto evaluate = [&](double s, double mu) {
    const double nu = s - mu;
    const BoundExponents b = bound_exponents(mu, nu, config.delta);
    ++verdict.points;
    const LpPoint p{mu, nu, b.minimum(), b.argmin()};
    if (p.min_tau > verdict.worst.min_tau) verdict.worst = p;
    if (p.min_tau > threshold && verdict.witnesses.size() < 16) verdict.witnesses.push_back(p);
  };
  // Grid in (s, mu') with s = mu' + nu'; both ranges include their endpoints.
  const auto sweep = [&](double s_lo, double s_hi, double mu_lo_hint, double mu_hi_hint, double step) {
    const int ns = std::max(1, static_cast<int>(std::ceil((s_hi - s_lo) / step)));
    for (int i = 0; i <= ns; ++i) {
      const double s = s_lo + (s_hi - s_lo) * i / ns;
      const double lo = std::max({0.0, s - 1 - config.slack, mu_lo_hint});
      const double hi = std::min(s, mu_hi_hint);
      if (lo > hi) continue;
      const int nm = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
      for (int j = 0; j <= nm; ++j) evaluate(s, lo + (hi - lo) * j / nm);
    }
  };
  sweep(1.0, s_max, 0.0, s_max, config.grid);
  // Local refinement around the current maximizer.
  double step = config.grid;
  for (int round = 0; round < 3; ++round) {
    const double s0 = verdict.worst.mu + verdict.worst.nu, m0 = verdict.worst.mu;
    sweep(std::max(1.0, s0 - step), std::min(s_max, s0 + step), m0 - step, m0 + step, step / 50);
    step /= 50;
  }
  verdict.pass = verdict.worst.min_tau <= threshold;
  if (verdict.pass) verdict.witnesses.clear();
  return verdict;
}

CriticalDelta critical_delta(double kappa, double slack, double grid, double tol, double lo, double hi) {
  const auto passes = [&](double delta) {
    ExponentConfig config;
    config.delta = delta;
    config.kappa = kappa;
    config.slack = slack;
    config.grid = grid;
    return exponent_case_analysis(config).worst.min_tau < 1 - kappa;
  };
  if (!passes(lo) || passes(hi)) throw Error(ErrorKind::OutOfRange, "critical delta is not bracketed");
  CriticalDelta out;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
    ++out.iterations;
  }
  out.delta_star = 0.5 * (lo + hi);
  out.eta_star = eta_from_delta(out.delta_star);
  return out;
}

}  // namespace klab
