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

#include "klab/bilinear.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "klab/error.hpp"
#include "klab/numeric.hpp"
#include "klab/random.hpp"

namespace klab {

namespace {

using cd = std::complex<double>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint32_t prime_of(const KloostermanTable& table) {
  if (table.field().degree() != 1) throw Error(ErrorKind::OutOfRange, "bilinear forms need a prime field");
  return table.field().q();
}

std::uint32_t mod(std::int64_t x, std::uint32_t q) {
  const std::int64_t r = x % static_cast<std::int64_t>(q);
  return static_cast<std::uint32_t>(r < 0 ? r + q : r);
}

double sum_of(const std::vector<double>& terms) {
  double s = 0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

CoefficientNorms norms_of(const BilinearInstance& inst) {
  return {inst.alpha.cwiseAbs().sum(), inst.alpha.norm(), inst.beta.norm()};
}

void validate_instance(const BilinearInstance& inst, std::uint32_t q) {
  if (inst.M < 0 || inst.N < 0) throw Error(ErrorKind::OutOfRange, "M and N must be nonnegative");
  if (inst.alpha.size() != inst.M || inst.beta.size() != inst.N) {
    throw Error(ErrorKind::OutOfRange, "coefficient lengths must equal M and N");
  }
  if (inst.N > 0 && (inst.offset < 1 || inst.offset + inst.N - 1 > static_cast<std::int64_t>(q) - 1)) {
    throw Error(ErrorKind::OutOfRange, "the N-interval must lie in [1, q-1]");
  }
  if (inst.c % q == 0) throw Error(ErrorKind::ZeroScale, "c must be coprime to q");
}

Eigen::MatrixXcd kernel_matrix(const KloostermanTable& table, std::uint32_t c, std::int64_t M, std::int64_t N,
                               std::int64_t offset, std::uint64_t cap) {
  const std::uint32_t q = prime_of(table);
  if (M < 0 || N < 0 || static_cast<std::uint64_t>(M) * static_cast<std::uint64_t>(N) > cap) {
    throw Error(ErrorKind::RangeTooLarge, "MN exceeds the configured cap");
  }
  Eigen::MatrixXcd kernel(M, N);
  for (std::int64_t m = 1; m <= M; ++m) {
    const std::uint64_t cm = static_cast<std::uint64_t>(c % q) * mod(m, q) % q;
    for (std::int64_t j = 0; j < N; ++j) {
      kernel(m - 1, j) = table[{static_cast<std::uint32_t>(cm * mod(offset + j, q) % q)}];
    }
  }
  return kernel;
}

cd bilinear_form(const KloostermanTable& table, const BilinearInstance& inst, std::uint64_t cap) {
  validate_instance(inst, prime_of(table));
  const Eigen::MatrixXcd kernel = kernel_matrix(table, inst.c, inst.M, inst.N, inst.offset, cap);
  return inst.alpha.transpose() * kernel * inst.beta;
}

double trivial_bound(const CoefficientNorms& norms, double M, double N) {
  return norms.alpha2 * norms.beta2 * std::sqrt(M * N);
}

double trivial_bound(const BilinearInstance& inst) {
  return trivial_bound(norms_of(inst), static_cast<double>(inst.M), static_cast<double>(inst.N));
}

std::vector<double> pv_terms(double M, double N, double q) {
  return {std::pow(q, -0.25), std::pow(M, -0.5), std::pow(N, -0.5) * std::pow(q, 0.25) * std::log(q)};
}

std::vector<double> typeII_terms(double M, double N, double q) {
  return {std::pow(M, -0.5), std::pow(M * N, -3.0 / 16.0) * std::pow(q, 11.0 / 64.0)};
}

std::vector<double> typeI_terms(double M, double N, double q) {
  return {std::pow(M * M * std::pow(N, 5) / (q * q * q), -1.0 / 12.0)};
}

double pv_bound(const BilinearInstance& inst, double q) {
  return trivial_bound(inst) * sum_of(pv_terms(static_cast<double>(inst.M), static_cast<double>(inst.N), q));
}

std::optional<std::string> typeII_hypothesis_failure(double M, double N, double q) {
  if (!(1.0 <= M)) return "1 <= M";
  if (!(M <= N * std::pow(q, 0.25))) return "M <= N q^(1/4)";
  if (!(std::pow(q, 0.25) < M * N)) return "q^(1/4) < MN";
  if (!(M * N < std::pow(q, 1.25))) return "MN < q^(5/4)";
  return std::nullopt;
}

std::optional<std::string> typeI_hypothesis_failure(double M, double N, double q) {
  if (!(1.0 <= M)) return "1 <= M";
  if (!(M <= N * N)) return "M <= N^2";
  if (!(N < q)) return "N < q";
  if (!(M * N < std::pow(q, 1.5))) return "MN < q^(3/2)";
  return std::nullopt;
}

double typeII_bound(const CoefficientNorms& norms, double M, double N, double q) {
  if (auto failure = typeII_hypothesis_failure(M, N, q)) {
    throw Error(ErrorKind::HypothesisViolated, "general bilinear bound needs " + *failure);
  }
  return trivial_bound(norms, M, N) * sum_of(typeII_terms(M, N, q));
}

double typeII_bound(const BilinearInstance& inst, double q) {
  return typeII_bound(norms_of(inst), static_cast<double>(inst.M), static_cast<double>(inst.N), q);
}

double typeI_trivial_bound(double M, double N, const CoefficientNorms& norms) {
  return std::sqrt(norms.alpha1 * norms.alpha2) * std::pow(M, 0.25) * N;
}

double typeI_bound(double M, double N, double q, const CoefficientNorms& norms) {
  if (auto failure = typeI_hypothesis_failure(M, N, q)) {
    throw Error(ErrorKind::HypothesisViolated, "special bilinear bound needs " + *failure);
  }
  return typeI_trivial_bound(M, N, norms) * typeI_terms(M, N, q).front();
}

double bracket_saving_exponent(const std::vector<double>& terms, double q) {
  double dominant = 0;
  for (double t : terms) dominant = std::max(dominant, t);
  return -std::log(dominant) / std::log(q);
}

std::string_view to_string(Bracket bracket) {
  switch (bracket) {
    case Bracket::PolyaVinogradov: return "pv";
    case Bracket::TypeII: return "type-ii";
    case Bracket::TypeI: return "type-i";
  }
  return "unknown";
}

std::vector<double> bracket_terms(Bracket bracket, double M, double N, double q) {
  switch (bracket) {
    case Bracket::PolyaVinogradov: return pv_terms(M, N, q);
    case Bracket::TypeII: return typeII_terms(M, N, q);
    case Bracket::TypeI: return typeI_terms(M, N, q);
  }
  return {};
}

double nontrivial_threshold(Bracket bracket, double q, double lo, double hi, double tol) {
  const auto saving = [&](double theta) {
    const double size = std::pow(q, theta);
    return bracket_saving_exponent(bracket_terms(bracket, size, size, q), q);
  };
  if (saving(lo) > 0 || saving(hi) < 0) {
    throw Error(ErrorKind::OutOfRange, "threshold is not bracketed by the search interval");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (saving(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OperatorNorm operator_norm(const Eigen::MatrixXcd& matrix, const PowerIterationOptions& options) {
  OperatorNorm out;
  const Eigen::Index n = matrix.cols();
  if (matrix.rows() == 0 || n == 0) return out;
  const Eigen::MatrixXcd gram = matrix.adjoint() * matrix;
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(n));
  double previous = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXcd w = gram * v;
    const double rayleigh = v.dot(w).real();
    const double length = w.norm();
    out.iterations = it;
    if (length == 0) {
      out.sigma = 0;
      out.gap = 0;
      out.right = v;
      out.left = Eigen::VectorXcd::Zero(matrix.rows());
      return out;
    }
    v = w / length;
    out.gap = std::abs(rayleigh - previous) / std::max(rayleigh, std::numeric_limits<double>::min());
    previous = rayleigh;
    if (it > 1 && out.gap < options.tolerance) {
      out.sigma = std::sqrt(std::max(rayleigh, 0.0));
      out.right = v;
      out.left = matrix * v / out.sigma;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "power iteration stopped after " << out.iterations << " iterations with sigma "
      << std::sqrt(std::max(previous, 0.0)) << " and gap " << out.gap;
  throw Error(ErrorKind::NoConvergence, msg.str());
}

OperatorNorm operator_norm(const KloostermanTable& table, std::uint32_t c, std::int64_t M, std::int64_t N,
                           std::int64_t offset, const PowerIterationOptions& options) {
  return operator_norm(kernel_matrix(table, c, M, N, offset), options);
}

ShiftCheck shift_identity_check(const KloostermanTable& table, std::uint32_t c, const Eigen::VectorXcd& alpha,
                                std::int64_t offset, std::int64_t N, std::int64_t A, std::int64_t B) {
  const std::uint32_t q = prime_of(table);
  const std::int64_t M = alpha.size();
  const std::int64_t Q = q;
  if (A < 1 || B < 1) throw Error(ErrorKind::ConstraintViolated, "A, B must be at least 1");
  if (!(2 * B < Q)) throw Error(ErrorKind::ConstraintViolated, "2B < q fails");
  if (!(A * B <= N)) throw Error(ErrorKind::ConstraintViolated, "AB <= N fails");
  if (!(A * M < Q)) throw Error(ErrorKind::ConstraintViolated, "AM < q fails");
  for (std::int64_t a = A + 1; a <= 2 * A; ++a) {
    if (a % Q == 0) throw Error(ErrorKind::ConstraintViolated, "a = 0 mod q in the averaging range");
  }
  if (offset < 1 || offset + N - 1 > Q - 1) {
    throw Error(ErrorKind::ConstraintViolated, "the N-interval must lie in [1, q-1]");
  }
  const PrimeField& fq = table.field().base();
  const auto K = [&](std::int64_t x) { return table[{fq.mul(c % q, mod(x, q))}]; };

  ShiftCheck out;
  CompensatedSum<cd> lhs;
  for (std::int64_t m = 1; m <= M; ++m) {
    for (std::int64_t n = offset; n < offset + N; ++n) lhs += alpha[m - 1] * K(m * n);
  }
  out.lhs = lhs.value();

  // n runs over integers with n + ab in the interval; the argument a m (a^{-1} n + b) is reduced mod q.
  CompensatedSum<cd> rhs;
  for (std::int64_t a = A + 1; a <= 2 * A; ++a) {
    const std::uint32_t a_mod = mod(a, q), a_inv = fq.inv(a_mod);
    for (std::int64_t b = B + 1; b <= 2 * B; ++b) {
      for (std::int64_t m = 1; m <= M; ++m) {
        const std::uint32_t am = fq.mul(a_mod, mod(m, q));
        for (std::int64_t shifted = offset; shifted < offset + N; ++shifted) {
          const std::int64_t n = shifted - a * b;
          const std::uint32_t inner = fq.add(fq.mul(a_inv, mod(n, q)), mod(b, q));
          rhs += alpha[m - 1] * K(fq.mul(am, inner));
        }
      }
    }
  }
  out.rhs = rhs.value() / static_cast<double>(A * B);
  out.deviation = std::abs(out.lhs - out.rhs) / (std::abs(out.lhs) + 1.0);
  return out;
}

ParameterPlan make_plan(double A_real, double B_real, double M, double N, double q) {
  ParameterPlan plan;
  plan.A_real = A_real;
  plan.B_real = B_real;
  plan.A = std::max<std::int64_t>(1, std::llround(A_real));
  plan.B = std::max<std::int64_t>(1, std::llround(B_real));
  const double a = static_cast<double>(plan.A), b = static_cast<double>(plan.B);
  plan.two_b_below_q = 2 * b < q;
  plan.ab_within_n = a * b <= N;
  plan.am_below_q = a * M < q;
  return plan;
}

ParameterPlan plan_parameters_typeI(double M, double N, double q) {
  return make_plan(std::cbrt(N * N / M), std::cbrt(M * N), M, N, q);
}

ParameterPlan plan_parameters_typeII(double M, double N, double q) {
  const double root = std::sqrt(N / M) * std::pow(q, 0.125);
  return make_plan(root, std::sqrt(M * N) * std::pow(q, -0.125), M, N, q);
}

std::string_view to_string(Ensemble ensemble) {
  switch (ensemble) {
    case Ensemble::Steinhaus: return "steinhaus";
    case Ensemble::Rademacher: return "rademacher";
    case Ensemble::AllOnes: return "all-ones";
    case Ensemble::Extremal: return "extremal";
  }
  return "unknown";
}

Eigen::VectorXcd draw_coefficients(Ensemble ensemble, std::int64_t length, std::uint64_t seed) {
  Eigen::VectorXcd out(length);
  SeededRng rng(seed);
  for (std::int64_t i = 0; i < length; ++i) {
    switch (ensemble) {
      case Ensemble::Steinhaus: out[i] = rng.phase(); break;
      case Ensemble::Rademacher: out[i] = rng.sign(); break;
      case Ensemble::AllOnes:
      case Ensemble::Extremal: out[i] = 1.0; break;
    }
  }
  return out;
}

std::vector<BoundReport> saving_sweep(const KloostermanTable& table, const SweepSpec& spec) {
  const std::uint32_t q = prime_of(table);
  const double qd = q;
  std::vector<BoundReport> rows;

  const auto fill = [&](BoundReport row, const CoefficientNorms& norms, bool beta_is_indicator) {
    const double M = static_cast<double>(row.M), N = static_cast<double>(row.N);
    row.trivial = trivial_bound(norms, M, N);
    row.pv = row.trivial * sum_of(pv_terms(M, N, qd));
    row.type_ii = typeII_hypothesis_failure(M, N, qd) ? kNaN : typeII_bound(norms, M, N, qd);
    row.type_i = beta_is_indicator && !typeI_hypothesis_failure(M, N, qd) ? typeI_bound(M, N, qd, norms) : kNaN;
    row.gamma = row.measured > 0 ? std::log(row.trivial / row.measured) / std::log(qd) : kNaN;
    row.plan = plan_parameters_typeII(M, N, qd);
    rows.push_back(row);
  };

  for (const auto& [M, N] : spec.sizes) {
    const Eigen::MatrixXcd kernel = kernel_matrix(table, spec.c, M, N, spec.offset);
    for (Ensemble ensemble : spec.ensembles) {
      const std::size_t draws = ensemble == Ensemble::AllOnes ? 1 : spec.samples;
      for (std::size_t i = 0; i < draws; ++i) {
        BilinearInstance inst;
        inst.M = M;
        inst.N = N;
        inst.offset = spec.offset;
        inst.c = spec.c;
        const std::uint64_t seed = spec.seed + i;
        inst.alpha = draw_coefficients(ensemble, M, seed);
        inst.beta = draw_coefficients(ensemble, N, seed ^ 0x9E3779B97F4A7C15ull);
        validate_instance(inst, q);
        BoundReport row;
        row.q = q;
        row.k = table.k();
        row.c = spec.c;
        row.M = M;
        row.N = N;
        row.offset = spec.offset;
        row.ensemble = ensemble;
        row.seed = seed;
        row.measured = std::abs(cd(inst.alpha.transpose() * kernel * inst.beta));
        fill(row, norms_of(inst), ensemble == Ensemble::AllOnes);
      }
    }
    if (spec.include_extremal) {
      const OperatorNorm op = operator_norm(kernel);
      BoundReport row;
      row.q = q;
      row.k = table.k();
      row.c = spec.c;
      row.M = M;
      row.N = N;
      row.offset = spec.offset;
      row.ensemble = Ensemble::Extremal;
      row.seed = 0;
      row.measured = op.sigma;
      fill(row, {op.left.cwiseAbs().sum(), 1.0, 1.0}, false);
    }
  }
  return rows;
}

}  // namespace klab
