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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   klab_acceptance            run all nine
//   klab_acceptance 3 7        run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "klab/bilinear.hpp"
#include "klab/divisor.hpp"
#include "klab/finite_field.hpp"
#include "klab/kloosterman.hpp"
#include "klab/monodromy.hpp"
#include "klab/numeric.hpp"
#include "klab/random.hpp"
#include "klab/sum_product.hpp"

namespace {

using namespace klab;
using cd = std::complex<double>;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::shared_ptr<const KloostermanTable> make_table(int k, std::int64_t q, int d = 1) {
  return std::make_shared<const KloostermanTable>(kloosterman_table(k, build_extension(make_prime_field(q), d)));
}

bool pairwise_distinct(const ShiftTuple& b) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (b[i] == b[j]) return false;
  return true;
}

ShiftTuple distinct_generic_tuple(const ExtField& field, int k, SeededRng& rng) {
  ShiftTuple b;
  do {
    b = sample_generic_tuple(field, k, rng);
  } while (!pairwise_distinct(b));
  return b;
}

std::vector<std::int64_t> primes_between(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = lo; p <= hi; ++p)
    if (is_prime(static_cast<std::uint64_t>(p))) out.push_back(p);
  return out;
}

// 1. Exact identities.
void criterion1(Verdict& v) {
  auto t101 = make_table(2, 101);
  double shift_worst = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Eigen::VectorXcd alpha = draw_coefficients(Ensemble::Steinhaus, 5, seed);
    const ShiftCheck sc = shift_identity_check(*t101, 1, alpha, 1, 20, 2, 3);
    shift_worst = std::max(shift_worst, relative_deviation(sc.lhs, sc.rhs));
  }
  v.require(shift_worst <= 1e-9, "shift-by-ab identity");

  double plancherel_worst = 0;
  for (int k : {2, 3}) {
    SumProductContext ctx(make_table(k, 53));
    const ExtField& f = ctx.field();
    SeededRng rng(1);
    for (int t = 0; t < 20; ++t) {
      const ShiftTuple b = sample_generic_tuple(f, k, rng);
      for (std::uint32_t r = 0; r < f.size(); ++r) {
        const Eigen::VectorXcd spectrum = big_r_spectrum(ctx, {r}, b);
        double direct = 0;
        for (std::uint32_t s = 0; s < f.size(); ++s) direct += std::norm(ctx.product({r}, {s}, b));
        plancherel_worst =
            std::max(plancherel_worst, relative_deviation(spectrum.squaredNorm(), f.size() * direct));
      }
    }
  }
  v.require(plancherel_worst <= 1e-9, "Plancherel link");

  // Kl_3 from the counting oracle, then K = delta_a through both routes.
  double delta_worst = 0;
  for (std::int64_t q : {7, 53, 101}) {
    auto field = build_extension(make_prime_field(q), 1);
    const KloostermanTable kl3 = kloosterman_table(3, field);
    const KloostermanTable kl2 = kloosterman_table(2, field);
    std::vector<cd> oracle(static_cast<std::size_t>(q));
    for (std::int64_t x = 0; x < q; ++x) oracle[x] = kloosterman_naive(3, field->from_int(x), *field);
    const double root = std::sqrt(static_cast<double>(q));
    for (std::int64_t a = 1; a < q; ++a) {
      Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(q);
      delta[a] = 1;
      for (std::int64_t m = 0; m < q; ++m) {
        const cd expected = oracle[(a * m) % q] / root;
        delta_worst = std::max(delta_worst, std::abs(ktilde(delta, m, kl3) - expected) / std::max(1.0, std::abs(expected)));
        delta_worst =
            std::max(delta_worst, std::abs(ktilde_dual(delta, m, kl2) - expected) / std::max(1.0, std::abs(expected)));
      }
    }
  }
  v.require(delta_worst <= 1e-9, "delta identity");
  v.detail << "shift " << shift_worst << ", plancherel " << plancherel_worst << ", delta " << delta_worst;
}

// 2. Kloosterman tables.
void criterion2(Verdict& v) {
  double worst = 0;
  int compared = 0;
  const auto compare = [&](std::int64_t q, int d, int k) {
    auto field = build_extension(make_prime_field(q), d);
    const KloostermanTable fast = kloosterman_table(k, field);
    const KloostermanTable naive = kloosterman_table_naive(k, field);
    const double dev = max_table_deviation(fast, naive);
    worst = std::max(worst, dev / k);
    ++compared;
    v.require(dev <= 1e-8 * k, "naive agreement q=" + std::to_string(q) + " d=" + std::to_string(d) +
                                   " k=" + std::to_string(k));
    v.require(conjugation_symmetry_check(fast) <= 1e-9, "conjugation symmetry");
    const cd collapse = raw_complete_sum(fast);
    const double scale = std::pow(static_cast<double>(field->size()), 0.5 * (k + 1));
    v.require(std::abs(collapse - cd(k % 2 == 0 ? 1.0 : -1.0, 0)) <= 1e-12 * scale, "complete-sum collapse");
  };
  for (std::int64_t q : primes_between(3, 199))
    for (int k = 2; k <= 4; ++k) compare(q, 1, k);
  for (std::int64_t q : primes_between(3, 13))
    for (int k = 2; k <= 4; ++k) compare(q, 2, k);

  double deligne = 0;
  for (std::int64_t q : {101, 499, 997}) {
    for (int k = 2; k <= 4; ++k) {
      const double m = deligne_max(*make_table(k, q));
      deligne = std::max(deligne, m / k);
      v.require(m <= k + 1e-9, "Deligne bound");
    }
  }
  v.detail << compared << " tables, worst deviation/k " << worst << ", max |Kl|/k " << deligne;
}

// 3. Square-root cancellation stability.
void criterion3(Verdict& v) {
  const std::vector<double> qs = {53, 101, 151, 199};
  for (int k : {2, 3}) {
    std::map<RatioStatistic, std::vector<double>> maxima;
    for (double q : qs) {
      SumProductContext ctx(make_table(k, static_cast<std::int64_t>(q)));
      for (RatioStatistic st : {RatioStatistic::CompleteSumR, RatioStatistic::LinearR,
                                RatioStatistic::OffDiagonalCorrelation, RatioStatistic::DiagonalCorrelation}) {
        maxima[st].push_back(ratio_report(ctx, st, 500, 1).max_ratio);
      }
    }
    for (const auto& [st, ys] : maxima) {
      const double slope = log_log_slope(qs, ys);
      v.detail << "k=" << k << " " << to_string(st) << " slope " << slope << "; ";
      v.require(slope <= 0.1, "k=" + std::to_string(k) + " " + std::string(to_string(st)));
    }
  }
}

// 4. Second moments.
void criterion4(Verdict& v) {
  for (int k : {2, 3}) {
    std::vector<double> sizes, constants;
    for (auto [q, d] : std::vector<std::pair<std::int64_t, int>>{{53, 1}, {101, 1}, {151, 1}, {11, 2}, {13, 2}}) {
      SumProductContext ctx(make_table(k, q, d));
      const double n = ctx.field().size();
      SeededRng rng(1);
      double c = 0;
      for (int t = 0; t < 20; ++t) {
        const ShiftTuple b = distinct_generic_tuple(ctx.field(), k, rng);
        c = std::max(c, std::abs(second_moment_r_lambda(ctx, b) - n) / std::sqrt(n));
      }
      sizes.push_back(n);
      constants.push_back(c);
    }
    const double slope = log_log_slope(sizes, constants);
    v.detail << "k=" << k << " C max " << *std::max_element(constants.begin(), constants.end()) << " slope "
             << slope << "; ";
    v.require(slope <= 0.1, "second-moment constant drifts for k=" + std::to_string(k));

    SumProductContext small(make_table(k, 11));
    const double rel = relative_deviation(full_average_moment(small), full_average_moment_naive(small));
    v.detail << "full average rel " << rel << "; ";
    v.require(rel <= 1e-6, "full average reduction k=" + std::to_string(k));
  }
}

// 5. S_k.
void criterion5(Verdict& v) {
  auto f = build_extension(make_prime_field(999983), 1);
  const SkMultiset s2 = compute_sk(2, f);
  const bool exact = s2.entries.size() == 2 && s2.entries[0].first == f->from_int(4) &&
                     s2.entries[0].second == 4 && s2.entries[1].first == f->from_int(16) && s2.entries[1].second == 1;
  v.require(exact, "S_2 = {4:4, 16:1}");
  for (int k = 2; k <= 7; ++k) {
    std::int64_t q = 1'000'000;
    while (!(is_prime(static_cast<std::uint64_t>(q)) && (q - 1) % k == 0)) --q;
    std::vector<std::pair<std::int64_t, int>> hosts = {{q, 1}};
    // A second host where the k-th roots only live in the quadratic extension.
    for (std::int64_t p = 1000; p > 2; --p) {
      if (is_prime(static_cast<std::uint64_t>(p)) && (p - 1) % k != 0 && p % k != 0 &&
          find_embedding_degree(k, static_cast<std::uint64_t>(p)) == 2) {
        hosts.push_back({p, 2});
        break;
      }
    }
    for (auto [p, d] : hosts) {
      const SkMultiset sk = compute_sk(k, build_extension(make_prime_field(p), d));
      const auto stab = stabilizer_group(sk);
      const ExtField& h = *sk.host;
      std::vector<ExtElement> expected = {h.one()};
      if (k % 2 == 1) expected.push_back(h.neg(h.one()));
      std::sort(expected.begin(), expected.end());
      v.require(multiplicity_one_element(sk).has_value(), "multiplicity one k=" + std::to_string(k));
      v.require(stab == expected, "stabilizer k=" + std::to_string(k) + " q=" + std::to_string(p));
      v.detail << "k=" << k << "@" << p << "^" << d << " |Stab|=" << stab.size() << " ";
    }
  }
}

// 6. Bound brackets.
void criterion6(Verdict& v) {
  const double q = 2003;
  const double root = std::sqrt(q);
  const double s11 = bracket_saving_exponent(typeII_terms(root, root, q), q);
  const double s12 = bracket_saving_exponent(typeI_terms(root, root, q), q);
  const double t11 = nontrivial_threshold(Bracket::TypeII, q);
  const double t12 = nontrivial_threshold(Bracket::TypeI, q);
  v.require(std::abs(s11 - 1.0 / 64) <= 0.01, "type II saving");
  v.require(std::abs(s12 - 1.0 / 24) <= 0.01, "type I saving");
  v.require(std::abs(t11 - 11.0 / 24) <= 0.01, "type II threshold");
  v.require(std::abs(t12 - 3.0 / 7) <= 0.01, "type I threshold");
  v.detail << "savings " << s11 << ", " << s12 << "; thresholds " << t11 << ", " << t12;
}

// 7. Extremal envelope.
void criterion7(Verdict& v) {
  auto table = make_table(2, 499);
  const Eigen::MatrixXcd kernel = kernel_matrix(*table, 1, 22, 22, 1);
  const OperatorNorm op = operator_norm(*table, 1, 22, 22, 1);
  const double dense = Eigen::JacobiSVD<Eigen::MatrixXcd>(kernel).singularValues()(0);
  const double rel = std::abs(op.sigma - dense) / dense;
  v.require(op.gap < 1e-10, "power iteration gap");
  v.require(rel <= 1e-6, "dense eigensolve agreement");
  const double trivial = 22.0 * 22.0;
  v.require(op.sigma * 22.0 <= trivial * 2, "sigma sqrt(MN) <= k * trivial");
  v.detail << "sigma " << op.sigma << " after " << op.iterations << " iterations, gap " << op.gap
           << ", dense rel " << rel << ", sigma*sqrt(MN)/trivial " << op.sigma * 22.0 / trivial;
}

// 8. Exponent LP.
void criterion8(Verdict& v) {
  const CriticalDelta cd = critical_delta();
  v.require(std::abs(cd.delta_star - 1.0 / 26) <= 1e-3, "delta*");
  v.require(std::abs(cd.eta_star - 1.0 / 102) <= 1e-3, "eta*");
  ExponentConfig ok;
  ok.delta = 0.03;
  ExponentConfig bad;
  bad.delta = 0.05;
  const LpVerdict pass = exponent_case_analysis(ok);
  const LpVerdict fail = exponent_case_analysis(bad);
  v.require(pass.pass, "delta=0.03 passes");
  v.require(!fail.pass && !fail.witnesses.empty(), "delta=0.05 fails with a witness");
  v.detail << "delta* " << cd.delta_star << ", eta* " << cd.eta_star;
  if (!fail.witnesses.empty()) {
    const LpPoint& w = fail.witnesses.front();
    v.detail << "; witness mu=" << w.mu << " nu=" << w.nu << " min_tau=" << w.min_tau;
  }
}

// 9. Divisor application.
void criterion9(Verdict& v) {
  constexpr std::int64_t kMax = 100'000;
  const CuspFormCoeffs c = tau_table(kMax);
  const auto& tau = c.tau;
  bool hecke = true;
  for (std::int64_t m = 2; m * m <= kMax && hecke; ++m)
    for (std::int64_t n = m + 1; m * n <= kMax; ++n)
      if (std::gcd(m, n) == 1 && tau[m * n] != tau[m] * tau[n]) hecke = false;
  for (std::int64_t p = 2; p * p <= kMax && hecke; ++p) {
    if (!is_prime(static_cast<std::uint64_t>(p))) continue;
    int128 p11 = 1;
    for (int i = 0; i < 11; ++i) p11 *= p;
    for (std::int64_t pr = p; pr * p * p <= kMax; pr *= p)
      if (tau[pr * p * p] != tau[p] * tau[pr * p] - p11 * tau[pr]) hecke = false;
  }
  v.require(hecke, "Hecke relations");

  bool deligne = true;
  const auto sig = sigma11_mod(kMax, 691);
  bool congruence = true;
  for (std::int64_t n = 1; n <= kMax; ++n) {
    std::int64_t d2 = 0;
    for (std::int64_t d = 1; d * d <= n; ++d)
      if (n % d == 0) d2 += d * d == n ? 1 : 2;
    if (std::abs(c.lambda[n]) > d2 * (1 + 1e-12)) deligne = false;
    int128 r = tau[n] % 691;
    if (r < 0) r += 691;
    if (static_cast<std::uint32_t>(r) != sig[n]) congruence = false;
  }
  v.require(deligne, "|lambda| <= d2");
  v.require(congruence, "tau = sigma_11 mod 691");

  const CuspFormCoeffs big = tau_table(50'000);
  std::vector<double> qs, maxima;
  bool exact = true;
  for (std::int64_t q : {53, 101, 199}) {
    const ProgressionScan scan = progression_scan(big, 50'000, q);
    exact = exact && scan.exact_total == 0;
    qs.push_back(static_cast<double>(q));
    maxima.push_back(scan.max_normalized);
  }
  v.require(exact, "sum of E vanishes");
  const double slope = log_log_slope(qs, maxima);
  v.require(slope <= 0.2, "max |E| q/x slope");
  v.detail << "max |E|q/x " << maxima[0] << ", " << maxima[1] << ", " << maxima[2] << "; slope " << slope;
}

struct Criterion {
  const char* name;
  double budget_seconds;
  void (*run)(Verdict&);
};

constexpr Criterion kCriteria[] = {
    {"exact identities", 60, criterion1},         {"kloosterman correctness", 120, criterion2},
    {"square-root stability", 600, criterion3},   {"second moments", 300, criterion4},
    {"S_k suite", 60, criterion5},                {"bound brackets", 1, criterion6},
    {"extremal envelope", 60, criterion7},        {"exponent LP", 30, criterion8},
    {"divisor application", 300, criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    selected.resize(std::size(kCriteria));
    std::iota(selected.begin(), selected.end(), 1);
  }
  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(std::size(kCriteria))) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    const Criterion& c = kCriteria[id - 1];
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(seconds < c.budget_seconds, "runtime budget");
    if (!v.pass) ++failures;
    std::printf("%s %d %s (%.2fs): %s\n", v.pass ? "PASS" : "FAIL", id, c.name, seconds, v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
