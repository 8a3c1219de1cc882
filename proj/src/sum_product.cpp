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

#include "klab/sum_product.hpp"

#include <algorithm>
#include <cmath>

#include "klab/cyclic_dft.hpp"
#include "klab/error.hpp"
#include "klab/numeric.hpp"
#include "klab/parallel.hpp"

namespace klab {

namespace {

using cd = std::complex<double>;

void require_prime_field(const ExtField& field, const char* what) {
  if (field.degree() != 1) throw Error(ErrorKind::OutOfRange, std::string(what) + " needs a prime field");
}

void require_distinct(const ShiftTuple& b) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (b[i] == b[j]) throw Error(ErrorKind::NotDistinct, "shift tuple entries must be pairwise distinct");
    }
  }
}

// P(r, s) for every s, indexed by the code of s.
Eigen::VectorXcd products_over_s(const SumProductContext& ctx, ExtElement r, const ShiftTuple& b) {
  const ExtField& field = ctx.field();
  Eigen::VectorXcd p(field.size());
  for (std::uint32_t s = 0; s < field.size(); ++s) p[s] = ctx.product(r, {s}, b);
  return p;
}

double size_of(const SumProductContext& ctx) { return static_cast<double>(ctx.field().size()); }

}  // namespace

TupleClass classify_tuple(const ShiftTuple& b, int k) {
  const auto count = [&](ExtElement v, int lo, int hi) {
    int n = 0;
    for (int j = lo; j < hi; ++j) n += b[j] == v;
    return n;
  };
  if (parity_class(k) == ParityClass::Sp) {
    for (int i = 0; i < 4; ++i) {
      if (count(b[i], 0, 4) % 2 != 0) return TupleClass::Generic;
    }
    return TupleClass::Diagonal;
  }
  for (int i = 0; i < 2; ++i) {
    if (count(b[i], 0, 2) != count(b[i], 2, 4)) return TupleClass::Generic;
  }
  return TupleClass::Diagonal;
}

SumProductContext::SumProductContext(std::shared_ptr<const KloostermanTable> table, ExtElement c)
    : table_(std::move(table)), c_(c) {
  if (c.code == 0) throw Error(ErrorKind::ZeroScale, "twist parameter c must be nonzero");
  const ExtField& f = field();
  twisted_.resize(f.size());
  for (std::uint32_t x = 0; x < f.size(); ++x) twisted_[x] = (*table_)[f.mul(c, {x})];
}

cd SumProductContext::product(ExtElement r, ExtElement s, const ShiftTuple& b) const noexcept {
  const ExtField& f = field();
  const auto at = [&](int i) { return twisted_[f.mul(s, f.add(r, b[i])).code]; };
  return at(0) * std::conj(at(2)) * at(1) * std::conj(at(3));
}

cd big_k(const SumProductContext& ctx, ExtElement r, ExtElement s, ExtElement lambda, const ShiftTuple& b) {
  return ctx.field().psi(lambda, s) * ctx.product(r, s, b);
}

cd big_r(const SumProductContext& ctx, ExtElement r, ExtElement lambda, const ShiftTuple& b) {
  const ExtField& field = ctx.field();
  CompensatedSum<cd> acc;
  for (std::uint32_t s = 0; s < field.size(); ++s) acc += big_k(ctx, r, {s}, lambda, b);
  return acc.value();
}

Eigen::VectorXcd big_r_spectrum(const SumProductContext& ctx, ExtElement r, const ShiftTuple& b) {
  const ExtField& field = ctx.field();
  const Eigen::VectorXcd p = products_over_s(ctx, r, b);
  if (field.degree() == 1) {
    // For a prime field the code of s is s itself, so R is an inverse DFT.
    return inverse_cyclic_dft(p) * static_cast<double>(field.size());
  }
  Eigen::VectorXcd out(field.size());
  for (std::uint32_t lambda = 0; lambda < field.size(); ++lambda) {
    CompensatedSum<cd> acc;
    for (std::uint32_t s = 0; s < field.size(); ++s) acc += field.psi({lambda}, {s}) * p[s];
    out[lambda] = acc.value();
  }
  return out;
}

cd sigma_incomplete(const SumProductContext& ctx, const ShiftTuple& b, std::int64_t A, std::int64_t M,
                    std::uint64_t cap) {
  const ExtField& field = ctx.field();
  require_prime_field(field, "sigma_incomplete");
  const std::int64_t range = 2 * A * M;
  if (range <= 0) return {0.0, 0.0};
  if (static_cast<std::uint64_t>(range) > cap / field.size()) {
    throw Error(ErrorKind::RangeTooLarge, "2AM q exceeds the configured cap");
  }
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < field.size(); ++r) {
    for (std::int64_t s = 1; s <= range; ++s) acc += ctx.product({r}, field.from_int(s), b);
  }
  return acc.value();
}

cd sigma_neq(const SumProductContext& ctx, const ShiftTuple& b, std::int64_t AM, std::uint64_t cap) {
  const ExtField& field = ctx.field();
  require_prime_field(field, "sigma_neq");
  if (AM <= 1) return {0.0, 0.0};
  if (static_cast<std::uint64_t>(AM) > cap / field.size()) {
    throw Error(ErrorKind::RangeTooLarge, "AM q exceeds the configured cap");
  }
  // sum_{s1 != s2 mod q} P(s1) conj P(s2) = |sum P|^2 - sum_rho n_rho^2 |P(rho)|^2.
  const std::uint32_t q = field.size();
  std::vector<double> multiplicity(q, 0.0);
  for (std::int64_t s = 1; s <= AM; ++s) multiplicity[field.from_int(s).code] += 1.0;
  CompensatedSum<double> acc;
  for (std::uint32_t r = 0; r < q; ++r) {
    CompensatedSum<cd> total;
    CompensatedSum<double> diagonal;
    for (std::uint32_t rho = 0; rho < q; ++rho) {
      if (multiplicity[rho] == 0.0) continue;
      const cd p = ctx.product({r}, {rho}, b);
      total += multiplicity[rho] * p;
      diagonal += multiplicity[rho] * multiplicity[rho] * std::norm(p);
    }
    acc += std::norm(total.value()) - diagonal.value();
  }
  return {acc.value(), 0.0};
}

cd sigma_neq_naive(const SumProductContext& ctx, const ShiftTuple& b, std::int64_t AM, std::uint64_t cap) {
  const ExtField& field = ctx.field();
  require_prime_field(field, "sigma_neq");
  if (AM <= 1) return {0.0, 0.0};
  if (static_cast<std::uint64_t>(AM) * AM > cap / field.size()) {
    throw Error(ErrorKind::RangeTooLarge, "(AM)^2 q exceeds the configured cap");
  }
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < field.size(); ++r) {
    for (std::int64_t s1 = 1; s1 <= AM; ++s1) {
      for (std::int64_t s2 = 1; s2 <= AM; ++s2) {
        const ExtElement e1 = field.from_int(s1), e2 = field.from_int(s2);
        if (e1 == e2) continue;
        acc += ctx.product({r}, e1, b) * std::conj(ctx.product({r}, e2, b));
      }
    }
  }
  return acc.value();
}

cd complete_sum_over_r(const SumProductContext& ctx, ExtElement s, const ShiftTuple& b) {
  if (s.code == 0) throw Error(ErrorKind::ZeroS, "s must be nonzero");
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < ctx.field().size(); ++r) acc += ctx.product({r}, s, b);
  return acc.value();
}

cd complete_corr_over_r(const SumProductContext& ctx, ExtElement s1, ExtElement s2, const ShiftTuple& b) {
  if (s1.code == 0 || s2.code == 0 || s1 == s2) {
    throw Error(ErrorKind::BadPair, "s1, s2 must be nonzero and distinct");
  }
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < ctx.field().size(); ++r) {
    acc += ctx.product({r}, s1, b) * std::conj(ctx.product({r}, s2, b));
  }
  return acc.value();
}

cd r_linear_sum(const SumProductContext& ctx, ExtElement lambda, const ShiftTuple& b) {
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < ctx.field().size(); ++r) acc += big_r(ctx, {r}, lambda, b);
  return acc.value();
}

cd r_correlation(const SumProductContext& ctx, ExtElement lambda1, ExtElement lambda2, const ShiftTuple& b) {
  const ExtField& field = ctx.field();
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < field.size(); ++r) {
    cd r1{}, r2{};
    for (std::uint32_t s = 0; s < field.size(); ++s) {
      const cd p = ctx.product({r}, {s}, b);
      r1 += field.psi(lambda1, {s}) * p;
      r2 += field.psi(lambda2, {s}) * p;
    }
    acc += r1 * std::conj(r2);
  }
  return acc.value();
}

double second_moment_r_lambda(const SumProductContext& ctx, const ShiftTuple& b) {
  require_distinct(b);
  const ExtField& field = ctx.field();
  CompensatedSum<double> acc;
  for (std::uint32_t r = 0; r < field.size(); ++r) {
    for (std::uint32_t s = 0; s < field.size(); ++s) acc += std::norm(ctx.product({r}, {s}, b));
  }
  return acc.value() / size_of(ctx);
}

double second_moment_r_lambda_naive(const SumProductContext& ctx, const ShiftTuple& b) {
  require_distinct(b);
  const ExtField& field = ctx.field();
  CompensatedSum<double> acc;
  for (std::uint32_t r = 0; r < field.size(); ++r) {
    for (std::uint32_t lambda = 0; lambda < field.size(); ++lambda) acc += std::norm(big_r(ctx, {r}, {lambda}, b));
  }
  return acc.value() / (size_of(ctx) * size_of(ctx));
}

cd noncorrelation_moment(const SumProductContext& ctx, const ShiftTuple& b) {
  if (ctx.k() % 2 == 0) throw Error(ErrorKind::WrongParity, "noncorrelation moment needs odd k");
  require_distinct(b);
  const ExtField& field = ctx.field();
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < field.size(); ++r) {
    for (std::uint32_t s = 0; s < field.size(); ++s) {
      acc += ctx.product({r}, {s}, b) * std::conj(ctx.product({r}, field.neg({s}), b));
    }
  }
  return acc.value() / size_of(ctx);
}

cd noncorrelation_moment_naive(const SumProductContext& ctx, const ShiftTuple& b) {
  if (ctx.k() % 2 == 0) throw Error(ErrorKind::WrongParity, "noncorrelation moment needs odd k");
  require_distinct(b);
  const ExtField& field = ctx.field();
  CompensatedSum<cd> acc;
  for (std::uint32_t r = 0; r < field.size(); ++r) {
    for (std::uint32_t lambda = 0; lambda < field.size(); ++lambda) {
      acc += big_r(ctx, {r}, {lambda}, b) * std::conj(big_r(ctx, {r}, field.neg({lambda}), b));
    }
  }
  return acc.value() / (size_of(ctx) * size_of(ctx));
}

cd correlation_sum(const SumProductContext& ctx, ExtElement s, ExtElement s_prime) {
  const ExtField& field = ctx.field();
  CompensatedSum<cd> acc;
  for (std::uint32_t b = 0; b < field.size(); ++b) {
    acc += ctx.K(field.mul(s, {b})) * std::conj(ctx.K(field.mul(s_prime, {b})));
  }
  return acc.value() / size_of(ctx);
}

double full_average_moment(const SumProductContext& ctx) {
  // C(s, s') depends only on t = s/s', and |C(s', s)| = |C(s, s')|.
  const ExtField& field = ctx.field();
  CompensatedSum<double> acc;
  for (std::uint32_t t = 1; t < field.size(); ++t) {
    acc += std::pow(std::norm(correlation_sum(ctx, {t}, field.one())), 2);
  }
  return static_cast<double>(field.group_order()) * acc.value();
}

double full_average_moment_naive(const SumProductContext& ctx, std::uint64_t cap) {
  const ExtField& field = ctx.field();
  const std::uint64_t n = field.size();
  if (n > 1000 || n * n * n * n * n * n > cap) {
    throw Error(ErrorKind::ResourceLimit, "naive full average exceeds the configured cap");
  }
  CompensatedSum<double> acc;
  ShiftTuple b;
  for (std::uint32_t r = 0; r < n; ++r) {
    for (std::uint32_t b0 = 0; b0 < n; ++b0) {
      for (std::uint32_t b1 = 0; b1 < n; ++b1) {
        for (std::uint32_t b2 = 0; b2 < n; ++b2) {
          for (std::uint32_t b3 = 0; b3 < n; ++b3) {
            b = {ExtElement{b0}, ExtElement{b1}, ExtElement{b2}, ExtElement{b3}};
            cd sum{};
            for (std::uint32_t s = 0; s < n; ++s) sum += ctx.product({r}, {s}, b);
            acc += std::norm(sum);
          }
        }
      }
    }
  }
  return acc.value() / std::pow(static_cast<double>(n), 5);
}

std::string_view to_string(RatioStatistic statistic) {
  switch (statistic) {
    case RatioStatistic::CompleteSumR: return "complete_sum_over_r";
    case RatioStatistic::LinearR: return "r_linear_sum";
    case RatioStatistic::OffDiagonalCorrelation: return "r_correlation_offdiag";
    case RatioStatistic::DiagonalCorrelation: return "r_correlation_diag";
  }
  return "unknown";
}

double normalization_exponent(RatioStatistic statistic) {
  switch (statistic) {
    case RatioStatistic::CompleteSumR: return 0.5;
    case RatioStatistic::LinearR: return 1.0;
    case RatioStatistic::OffDiagonalCorrelation:
    case RatioStatistic::DiagonalCorrelation: return 1.5;
  }
  return 0.0;
}

ShiftTuple sample_generic_tuple(const ExtField& field, int k, SeededRng& rng) {
  for (;;) {
    ShiftTuple b;
    for (auto& x : b) x = {static_cast<std::uint32_t>(rng.below(field.size()))};
    if (classify_tuple(b, k) == TupleClass::Generic) return b;
  }
}

RatioReport ratio_report(const SumProductContext& ctx, RatioStatistic statistic, std::size_t samples,
                         std::uint64_t seed) {
  const ExtField& field = ctx.field();
  RatioReport report;
  report.statistic = statistic;
  report.q = field.size();
  report.k = ctx.k();
  report.seed = seed;
  report.samples = samples;
  report.exponent = normalization_exponent(statistic);

  // Draw every sample first so the stream does not depend on the worker count.
  SeededRng rng(seed);
  report.rows.resize(samples);
  for (auto& row : report.rows) {
    row.b = sample_generic_tuple(field, ctx.k(), rng);
    if (statistic == RatioStatistic::CompleteSumR) {
      row.s_or_lambda1 = {static_cast<std::uint32_t>(1 + rng.below(field.size() - 1))};
    } else {
      row.s_or_lambda1 = {static_cast<std::uint32_t>(rng.below(field.size()))};
    }
    if (statistic == RatioStatistic::OffDiagonalCorrelation) {
      const auto shift = static_cast<std::uint32_t>(1 + rng.below(field.size() - 1));
      row.lambda2 = field.add(row.s_or_lambda1, {shift});
    } else {
      row.lambda2 = row.s_or_lambda1;
    }
  }

  const double n = static_cast<double>(field.size());
  const double scale = std::pow(n, report.exponent);
  parallel_for(samples, [&](std::size_t i) {
    RatioSample& row = report.rows[i];
    switch (statistic) {
      case RatioStatistic::CompleteSumR:
        row.value = complete_sum_over_r(ctx, row.s_or_lambda1, row.b);
        row.ratio = std::abs(row.value) / scale;
        break;
      case RatioStatistic::LinearR:
        row.value = r_linear_sum(ctx, row.s_or_lambda1, row.b);
        row.ratio = std::abs(row.value) / scale;
        break;
      case RatioStatistic::OffDiagonalCorrelation:
        row.value = r_correlation(ctx, row.s_or_lambda1, row.lambda2, row.b);
        row.ratio = std::abs(row.value) / scale;
        break;
      case RatioStatistic::DiagonalCorrelation:
        row.value = r_correlation(ctx, row.s_or_lambda1, row.s_or_lambda1, row.b);
        row.ratio = std::abs(row.value - n * n) / scale;
        break;
    }
  });

  double total = 0;
  for (const auto& row : report.rows) {
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    total += row.ratio;
  }
  report.mean_ratio = samples ? total / static_cast<double>(samples) : 0.0;
  return report;
}

ScanResult scan_bad_tuples(const SumProductContext& ctx, const ScanOptions& options) {
  const ExtField& field = ctx.field();
  require_prime_field(field, "scan_bad_tuples");
  const std::uint32_t q = field.size();

  ScanResult result;
  result.q = q;
  result.k = ctx.k();
  result.exhaustive = q <= options.exhaustive_max_q;

  // Both statistics are invariant under b -> b + (t,t,t,t), so b_1 = 0 suffices.
  std::vector<ShiftTuple> tuples;
  if (result.exhaustive) {
    tuples.reserve(static_cast<std::size_t>(q) * q * q);
    for (std::uint32_t b2 = 0; b2 < q; ++b2) {
      for (std::uint32_t b3 = 0; b3 < q; ++b3) {
        for (std::uint32_t b4 = 0; b4 < q; ++b4) tuples.push_back({ExtElement{0}, {b2}, {b3}, {b4}});
      }
    }
  } else {
    SeededRng rng(options.seed);
    tuples.reserve(options.samples);
    for (std::size_t i = 0; i < options.samples; ++i) tuples.push_back(sample_generic_tuple(field, ctx.k(), rng));
  }
  result.examined = tuples.size();

  const double n = static_cast<double>(q);
  std::vector<double> linear(tuples.size()), correlation(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t i) {
    const ShiftTuple& b = tuples[i];
    cd sum0{}, sum1{};
    double energy = 0;
    for (std::uint32_t r = 0; r < q; ++r) {
      cd r0{}, r1{};
      for (std::uint32_t s = 1; s < q; ++s) {
        const cd p = ctx.product({r}, {s}, b);
        r0 += p;
        r1 += field.unit_root(s) * p;
      }
      sum0 += r0;
      sum1 += r1;
      energy += std::norm(r0);
    }
    linear[i] = std::max(std::abs(sum0), std::abs(sum1)) / n;
    correlation[i] = std::abs(energy - n * n) / std::pow(n, 1.5);
  });

  std::vector<double> generic_linear, generic_corr;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (classify_tuple(tuples[i], ctx.k()) == TupleClass::Generic) {
      generic_linear.push_back(linear[i]);
      generic_corr.push_back(correlation[i]);
    }
  }
  result.linear_threshold = options.linear_threshold.value_or(options.median_factor * median(generic_linear));
  result.correlation_threshold =
      options.correlation_threshold.value_or(options.median_factor * median(generic_corr));

  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const TupleClass cls = classify_tuple(tuples[i], ctx.k());
    if (cls == TupleClass::Diagonal) {
      ++result.diagonal;
      result.flagged.push_back({tuples[i], cls, "diagonal", linear[i]});
    } else if (linear[i] > result.linear_threshold) {
      ++result.generic_flagged;
      result.flagged.push_back({tuples[i], cls, "linear", linear[i]});
    } else if (correlation[i] > result.correlation_threshold) {
      ++result.generic_flagged;
      result.flagged.push_back({tuples[i], cls, "correlation", correlation[i]});
    }
  }
  return result;
}

}  // namespace klab
