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

#include "klab/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "klab/bilinear.hpp"
#include "klab/divisor.hpp"
#include "klab/error.hpp"
#include "klab/kloosterman.hpp"
#include "klab/monodromy.hpp"
#include "klab/numeric.hpp"
#include "klab/parallel.hpp"
#include "klab/report.hpp"
#include "klab/sum_product.hpp"

namespace klab {

namespace {

struct Args {
  std::vector<std::int64_t> q;
  std::vector<int> k;
  int d = 1;
  std::int64_t c = 1;
  std::vector<std::int64_t> M;
  std::vector<std::int64_t> N;
  std::int64_t A = 1;
  std::int64_t B = 1;
  std::int64_t offset = 1;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 0;
  double threshold = 3.0;
  double grid = 1e-3;
  double delta = 0.03;
  double kappa = 1e-3;
  double slack = 0;
  bool search = false;
  std::string convention = "intro";
  std::vector<std::int64_t> b = {1, 2, 3, 5};
  std::int64_t x = 50000;
  std::int64_t nmax = 0;
  std::uint32_t scan_qmax = 0;
  std::size_t scan_samples = 2000;
  std::uint32_t exhaustive_max = 31;
  double Q = 1;
  double C1 = 1;
};

struct Outcome {
  Report report;
  bool hypothesis_violated = false;
};

std::int64_t first_or(const std::vector<std::int64_t>& v, std::int64_t fallback) {
  return v.empty() ? fallback : v.front();
}

SignConvention parse_convention(const std::string& s) {
  if (s == "intro") return SignConvention::Intro;
  if (s == "sheaf") return SignConvention::Sheaf;
  throw Error(ErrorKind::UsageError, "convention must be intro or sheaf");
}

ExtFieldPtr field_for(std::int64_t q, int d) { return build_extension(make_prime_field(q), d); }

std::shared_ptr<const KloostermanTable> table_for(int k, ExtFieldPtr field, SignConvention convention) {
  if (const char* dir = std::getenv("KLAB_CACHE_DIR"); dir && *dir) {
    return std::make_shared<const KloostermanTable>(cached_kloosterman_table(dir, k, std::move(field), convention));
  }
  return std::make_shared<const KloostermanTable>(kloosterman_table(k, std::move(field), convention));
}

std::uint64_t require_seed(const Args& a) {
  if (!a.seed) throw Error(ErrorKind::UsageError, "--seed is required for sampled runs");
  return *a.seed;
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

ShiftTuple tuple_from(const Args& a, const ExtField& field) {
  if (a.b.size() != 4) throw Error(ErrorKind::UsageError, "--b needs four entries");
  return {field.from_int(a.b[0]), field.from_int(a.b[1]), field.from_int(a.b[2]), field.from_int(a.b[3])};
}

Outcome cmd_kl_table(const Args& a) {
  const std::int64_t q = first_or(a.q, 7);
  const int k = a.k.empty() ? 2 : a.k.front();
  const SignConvention conv = parse_convention(a.convention);
  auto table = table_for(k, field_for(q, a.d), conv);
  const ExtField& field = table->field();
  const ExtElement c = field.from_int(a.c);
  KloostermanTable view = c == field.one() ? *table : pullback_scale(*table, c);

  Outcome o;
  o.report.command = "kl-table";
  o.report.config = {{"q", q}, {"k", k}, {"d", a.d}, {"c", a.c}, {"convention", a.convention}};
  o.report.summary = {{"path", std::string(to_string(table->path()))},
                      {"deligne_max", deligne_max(view)},
                      {"conjugation_symmetry", conjugation_symmetry_check(view)},
                      {"raw_complete_sum", complex_json(raw_complete_sum(*table))},
                      {"tolerance", view.tolerance()}};
  o.report.columns = {"a", "re", "im", "abs"};
  for (std::uint32_t x = 0; x < field.size(); ++x) {
    const auto v = view[{x}];
    o.report.rows.push_back({std::int64_t{x}, v.real(), v.imag(), std::abs(v)});
  }
  return o;
}

Outcome cmd_kl_check(const Args& a) {
  const std::vector<std::int64_t> qs = a.q.empty() ? std::vector<std::int64_t>{7, 11, 13} : a.q;
  const std::vector<int> ks = a.k.empty() ? std::vector<int>{2, 3} : a.k;
  Outcome o;
  o.report.command = "kl-check";
  o.report.config = {{"q", qs}, {"k", ks}, {"d", a.d}};
  o.report.columns = {"q", "k", "d", "naive_deviation", "tolerance", "deligne_max", "symmetry", "complete_sum_re",
                      "complete_sum_im", "pass"};
  bool all = true;
  for (std::int64_t q : qs) {
    auto field = field_for(q, a.d);
    for (int k : ks) {
      const KloostermanTable fast = kloosterman_table(k, field);
      const KloostermanTable naive = kloosterman_table_naive(k, field);
      const double dev = max_table_deviation(fast, naive);
      const double del = deligne_max(fast);
      const double sym = conjugation_symmetry_check(fast);
      const auto cs = raw_complete_sum(fast);
      const double expected = k % 2 == 0 ? 1.0 : -1.0;
      const bool pass = dev <= 1e-8 * k && del <= k + 1e-9 && sym <= 1e-9 &&
                        std::abs(cs - expected) <= 1e-9 * static_cast<double>(field->size());
      all = all && pass;
      o.report.rows.push_back({q, std::int64_t{k}, std::int64_t{a.d}, dev, fast.tolerance(), del, sym, cs.real(),
                               cs.imag(), std::string(pass ? "true" : "false")});
    }
  }
  o.report.summary = {{"all_pass", all}};
  return o;
}

Outcome cmd_sumprod_scan(const Args& a) {
  const std::uint64_t seed = require_seed(a);
  const std::vector<std::int64_t> qs = a.q.empty() ? std::vector<std::int64_t>{53} : a.q;
  const std::vector<int> ks = a.k.empty() ? std::vector<int>{2} : a.k;
  const std::size_t samples = a.samples ? a.samples : 500;
  Outcome o;
  o.report.command = "sumprod-scan";
  o.report.config = {{"q", qs},       {"k", ks},           {"c", a.c},
                     {"seed", seed},  {"samples", samples}, {"threshold", a.threshold},
                     {"scan_samples", a.scan_samples}, {"exhaustive_max_q", a.exhaustive_max}};
  o.report.columns = {"q",  "k",  "c",       "b1",      "b2",        "b3",   "b4",
                      "s_or_lambda1", "lambda2", "statistic", "value", "normalized_ratio"};
  Json stats = Json::array();
  Json scans = Json::array();
  for (int k : ks) {
    std::map<RatioStatistic, std::pair<std::vector<double>, std::vector<double>>> series;
    for (std::int64_t q : qs) {
      auto field = field_for(q, 1);
      SumProductContext ctx(table_for(k, field, SignConvention::Intro), field->from_int(a.c));
      for (RatioStatistic st : {RatioStatistic::CompleteSumR, RatioStatistic::LinearR,
                                RatioStatistic::OffDiagonalCorrelation, RatioStatistic::DiagonalCorrelation}) {
        const RatioReport rep = ratio_report(ctx, st, samples, seed);
        series[st].first.push_back(static_cast<double>(q));
        series[st].second.push_back(rep.max_ratio);
        stats.push_back({{"q", q}, {"k", k}, {"statistic", std::string(to_string(st))},
                         {"exponent", rep.exponent}, {"max_ratio", rep.max_ratio}, {"mean_ratio", rep.mean_ratio}});
        for (const auto& row : rep.rows) {
          o.report.rows.push_back({q, std::int64_t{k}, a.c, std::int64_t{row.b[0].code}, std::int64_t{row.b[1].code},
                                   std::int64_t{row.b[2].code}, std::int64_t{row.b[3].code},
                                   std::int64_t{row.s_or_lambda1.code}, std::int64_t{row.lambda2.code},
                                   std::string(to_string(st)), std::abs(row.value), row.ratio});
        }
      }
      ScanOptions so;
      so.seed = seed;
      so.samples = a.scan_samples;
      so.exhaustive_max_q = a.exhaustive_max;
      so.median_factor = a.threshold;
      const ScanResult scan = scan_bad_tuples(ctx, so);
      scans.push_back({{"q", q},
                       {"k", k},
                       {"exhaustive", scan.exhaustive},
                       {"examined", scan.examined},
                       {"diagonal", scan.diagonal},
                       {"generic_flagged", scan.generic_flagged},
                       {"flagged_fraction", scan.flagged_fraction()},
                       {"linear_threshold", scan.linear_threshold},
                       {"correlation_threshold", scan.correlation_threshold},
                       {"reference_1_over_q", 1.0 / static_cast<double>(q)}});
      for (const auto& f : scan.flagged) {
        if (f.classification == TupleClass::Diagonal) continue;
        o.report.rows.push_back({q, std::int64_t{k}, a.c, std::int64_t{f.b[0].code}, std::int64_t{f.b[1].code},
                                 std::int64_t{f.b[2].code}, std::int64_t{f.b[3].code}, std::int64_t{0},
                                 std::int64_t{1}, "flagged:" + f.statistic, f.value, f.value});
      }
    }
    if (qs.size() > 1) {
      for (const auto& [st, xy] : series) {
        stats.push_back({{"k", k}, {"statistic", std::string(to_string(st))},
                         {"log_log_slope", log_log_slope(xy.first, xy.second)}});
      }
    }
  }
  o.report.summary = {{"ratios", stats}, {"scans", scans}};
  return o;
}

Outcome cmd_moments(const Args& a) {
  const std::int64_t q = first_or(a.q, 53);
  const int k = a.k.empty() ? 2 : a.k.front();
  auto field = field_for(q, a.d);
  SumProductContext ctx(table_for(k, field, SignConvention::Intro), field->from_int(a.c));
  const ShiftTuple b = tuple_from(a, *field);
  const double n = static_cast<double>(field->size());
  Outcome o;
  o.report.command = "moments";
  o.report.config = {{"q", q}, {"k", k}, {"d", a.d}, {"c", a.c}, {"b", a.b}};
  const double second = second_moment_r_lambda(ctx, b);
  const double full = full_average_moment(ctx);
  Json s = {{"second_moment", second},
            {"second_moment_ratio", std::abs(second - n) / std::sqrt(n)},
            {"full_average", full},
            {"full_average_ratio", std::abs(full - n) / std::sqrt(n)}};
  if (k % 2 == 1) {
    const auto nc = noncorrelation_moment(ctx, b);
    s["noncorrelation"] = complex_json(nc);
    s["noncorrelation_ratio"] = std::abs(nc) / std::sqrt(n);
  }
  if (n <= 13) s["full_average_naive"] = full_average_moment_naive(ctx);
  o.report.summary = s;
  o.report.columns = {"q", "k", "d", "statistic", "value", "normalized_ratio"};
  o.report.rows.push_back({q, std::int64_t{k}, std::int64_t{a.d}, "second_moment", second,
                           std::abs(second - n) / std::sqrt(n)});
  o.report.rows.push_back({q, std::int64_t{k}, std::int64_t{a.d}, "full_average", full,
                           std::abs(full - n) / std::sqrt(n)});
  return o;
}

Outcome cmd_bilinear_sweep(const Args& a) {
  const std::uint64_t seed = require_seed(a);
  const std::int64_t q = first_or(a.q, 2003);
  const int k = a.k.empty() ? 2 : a.k.front();
  SweepSpec spec;
  spec.c = static_cast<std::uint32_t>(a.c);
  spec.offset = a.offset;
  spec.seed = seed;
  spec.samples = a.samples ? a.samples : 4;
  const auto root = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(q))));
  const std::vector<std::int64_t> Ms = a.M.empty() ? std::vector<std::int64_t>{root} : a.M;
  const std::vector<std::int64_t> Ns = a.N.empty() ? Ms : a.N;
  if (Ms.size() != Ns.size()) throw Error(ErrorKind::UsageError, "--M and --N must have equal lengths");
  for (std::size_t i = 0; i < Ms.size(); ++i) spec.sizes.push_back({Ms[i], Ns[i]});
  auto table = table_for(k, field_for(q, 1), SignConvention::Intro);
  const auto rows = saving_sweep(*table, spec);

  Outcome o;
  o.report.command = "bilinear-sweep";
  o.report.config = {{"q", q}, {"k", k}, {"c", a.c}, {"M", Ms}, {"N", Ns},
                     {"offset", a.offset}, {"seed", seed}, {"samples", spec.samples}};
  o.report.columns = {"q", "k", "c", "M", "N", "offset", "ensemble", "seed", "measured", "trivial", "pv",
                      "type_ii", "type_i", "gamma"};
  Json maxima = Json::object();
  for (const auto& r : rows) {
    o.report.rows.push_back({std::int64_t{r.q}, std::int64_t{r.k}, std::int64_t{r.c}, r.M, r.N, r.offset,
                             std::string(to_string(r.ensemble)), static_cast<std::int64_t>(r.seed), r.measured,
                             r.trivial, r.pv, r.type_ii, r.type_i, r.gamma});
    if (std::isnan(r.type_ii)) o.hypothesis_violated = true;
    const std::string key(to_string(r.ensemble));
    const double ratio = r.measured / r.trivial;
    if (!maxima.contains(key) || maxima[key].get<double>() < ratio) maxima[key] = ratio;
  }
  o.report.summary = {{"max_measured_over_trivial", maxima}};
  return o;
}

Outcome cmd_opnorm(const Args& a) {
  const std::int64_t q = first_or(a.q, 499);
  const int k = a.k.empty() ? 2 : a.k.front();
  const std::int64_t M = first_or(a.M, 22), N = first_or(a.N, M);
  auto table = table_for(k, field_for(q, 1), SignConvention::Intro);
  const OperatorNorm op = operator_norm(*table, static_cast<std::uint32_t>(a.c), M, N, a.offset);
  const double md = static_cast<double>(M), nd = static_cast<double>(N), qd = static_cast<double>(q);
  Outcome o;
  o.report.command = "opnorm";
  o.report.config = {{"q", q}, {"k", k}, {"c", a.c}, {"M", M}, {"N", N}, {"offset", a.offset}};
  const auto failure = typeII_hypothesis_failure(md, nd, qd);
  const double bracket = failure ? std::nan("") : typeII_bound({std::sqrt(md), 1.0, 1.0}, md, nd, qd) / std::sqrt(md);
  o.hypothesis_violated = failure.has_value();
  o.report.summary = {{"sigma", op.sigma},
                      {"iterations", op.iterations},
                      {"gap", op.gap},
                      {"trivial_unit", std::sqrt(md * nd)},
                      {"type_ii_bracket_unit", bracket},
                      {"sigma_over_type_ii", op.sigma / bracket},
                      {"hypothesis_failure", failure ? Json(*failure) : Json(nullptr)}};
  o.report.columns = {"q", "k", "M", "N", "sigma", "iterations", "gap"};
  o.report.rows.push_back({q, std::int64_t{k}, M, N, op.sigma, std::int64_t{op.iterations}, op.gap});
  return o;
}

Outcome cmd_shift_check(const Args& a) {
  const std::uint64_t seed = require_seed(a);
  const std::int64_t q = first_or(a.q, 101);
  const int k = a.k.empty() ? 2 : a.k.front();
  const std::int64_t M = first_or(a.M, 5), N = first_or(a.N, 20);
  const std::size_t samples = a.samples ? a.samples : 100;
  auto table = table_for(k, field_for(q, 1), SignConvention::Intro);
  Outcome o;
  o.report.command = "shift-check";
  o.report.config = {{"q", q}, {"k", k}, {"c", a.c}, {"M", M}, {"N", N}, {"A", a.A}, {"B", a.B},
                     {"offset", a.offset}, {"seed", seed}, {"samples", samples}};
  o.report.columns = {"seed", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "deviation"};
  double worst = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Eigen::VectorXcd alpha = draw_coefficients(Ensemble::Steinhaus, M, seed + i);
    const ShiftCheck sc = shift_identity_check(*table, static_cast<std::uint32_t>(a.c), alpha, a.offset, N, a.A, a.B);
    worst = std::max(worst, sc.deviation);
    o.report.rows.push_back({static_cast<std::int64_t>(seed + i), sc.lhs.real(), sc.lhs.imag(), sc.rhs.real(),
                             sc.rhs.imag(), sc.deviation});
  }
  o.report.summary = {{"max_deviation", worst}, {"pass", worst < 1e-9}};
  return o;
}

Outcome cmd_sk(const Args& a) {
  const int k = a.k.empty() ? 2 : a.k.front();
  Outcome o;
  o.report.command = "sk";
  if (a.scan_qmax > 0) {
    const SkScan scan = sk_threshold_scan(k, a.scan_qmax);
    o.report.config = {{"k", k}, {"scan_qmax", a.scan_qmax}};
    o.report.columns = {"q", "d", "multiplicity_one", "stabilizer_expected"};
    for (const auto& r : scan.rows) {
      o.report.rows.push_back({std::int64_t{r.q}, std::int64_t{r.d}, std::string(r.has_multiplicity_one ? "true" : "false"),
                               std::string(r.stabilizer_expected ? "true" : "false")});
    }
    o.report.summary = {{"stable_from", scan.stable_from ? Json(*scan.stable_from) : Json(nullptr)}};
    return o;
  }
  const std::int64_t q = first_or(a.q, 7);
  const int d = a.d > 1 ? a.d : find_embedding_degree(k, static_cast<std::uint64_t>(q));
  const SkMultiset sk = compute_sk(k, field_for(q, d));
  const ExtField& field = *sk.host;
  const auto coeff_string = [&](ExtElement e) {
    std::string s;
    for (std::uint32_t c : field.coeffs(e)) s += (s.empty() ? "" : " ") + std::to_string(c);
    return s;
  };
  o.report.config = {{"k", k}, {"q", q}, {"d", d}};
  o.report.columns = {"element", "coefficients", "multiplicity"};
  Json entries = Json::array();
  for (const auto& [e, mult] : sk.entries) {
    o.report.rows.push_back({std::int64_t{e.code}, coeff_string(e), static_cast<std::int64_t>(mult)});
    entries.push_back(Json::array({e.code, mult}));
  }
  const auto one = multiplicity_one_element(sk);
  Json stab = Json::array();
  for (ExtElement mu : stabilizer_group(sk)) stab.push_back(mu.code);
  o.report.summary = {{"entries", entries},
                      {"total_multiplicity", sk.total_multiplicity()},
                      {"zero_sums", sk.zero_sums},
                      {"multiplicity_one", one ? Json(one->code) : Json(nullptr)},
                      {"stabilizer", stab}};
  return o;
}

Outcome cmd_progression(const Args& a) {
  const std::vector<std::int64_t> qs = a.q.empty() ? std::vector<std::int64_t>{53, 101, 199} : a.q;
  const std::int64_t nmax = a.nmax > 0 ? a.nmax : a.x;
  const CuspFormCoeffs coeffs = tau_table(nmax);
  Outcome o;
  o.report.command = "progression";
  o.report.config = {{"x", a.x}, {"q", qs}, {"nmax", nmax}};
  o.report.columns = {"x", "q", "a", "raw", "main", "E", "normalized"};
  Json per_q = Json::array();
  std::vector<double> xs, ys;
  for (std::int64_t q : qs) {
    const ProgressionScan scan = progression_scan(coeffs, a.x, q);
    for (const auto& r : scan.reports) o.report.rows.push_back({r.x, r.q, r.a, r.raw, r.main, r.E, r.normalized});
    per_q.push_back({{"q", q},
                     {"max_normalized", scan.max_normalized},
                     {"exact_phi_E_total", int128_to_string(scan.exact_total)},
                     {"float_E_total", scan.float_total}});
    xs.push_back(static_cast<double>(q));
    ys.push_back(scan.max_normalized);
  }
  o.report.summary = {{"per_q", per_q}};
  if (qs.size() > 1) o.report.summary["log_log_slope"] = log_log_slope(xs, ys);
  return o;
}

Json verdict_json(const LpVerdict& v) {
  Json w = Json::array();
  for (const auto& p : v.witnesses) {
    w.push_back({{"mu", p.mu}, {"nu", p.nu}, {"min_tau", p.min_tau}, {"case", std::string(bound_name(p.case_index))}});
  }
  return {{"delta", v.config.delta},
          {"kappa", v.config.kappa},
          {"slack", v.config.slack},
          {"grid", v.config.grid},
          {"pass", v.pass},
          {"worst", {{"mu", v.worst.mu}, {"nu", v.worst.nu}, {"min_tau", v.worst.min_tau},
                     {"case", std::string(bound_name(v.worst.case_index))}}},
          {"witnesses", w},
          {"points", v.points}};
}

Outcome cmd_exponent_lp(const Args& a) {
  Outcome o;
  o.report.command = "exponent-lp";
  o.report.config = {{"delta", a.delta}, {"kappa", a.kappa}, {"slack", a.slack}, {"grid", a.grid}, {"search", a.search}};
  ExponentConfig config;
  config.delta = a.delta;
  config.kappa = a.kappa;
  config.slack = a.slack;
  config.grid = a.grid;
  o.report.summary["verdict"] = verdict_json(exponent_case_analysis(config));
  o.report.columns = {"slack", "delta_star", "eta_star"};
  if (a.search) {
    // The critical delta is the supremum with kappa -> 0; see the README.
    const CriticalDelta cd = critical_delta(0.0, a.slack, a.grid);
    o.report.summary["delta_star"] = cd.delta_star;
    o.report.summary["eta_star"] = cd.eta_star;
    Json sweep = Json::array();
    for (double slack : {0.0, 1e-3, 1e-2}) {
      const CriticalDelta s = critical_delta(0.0, slack, a.grid);
      sweep.push_back({{"slack", slack}, {"delta_star", s.delta_star}, {"eta_star", s.eta_star}});
      o.report.rows.push_back({slack, s.delta_star, s.eta_star});
    }
    o.report.summary["slack_sensitivity"] = sweep;
  }
  return o;
}

Outcome cmd_report(const Args& a) {
  const double q = static_cast<double>(first_or(a.q, 2003));
  const double root = std::ceil(std::sqrt(q));
  Outcome o;
  o.report.command = "report";
  o.report.config = {{"q", first_or(a.q, 2003)}};
  const CriticalDelta cd = critical_delta();
  const CombinedBounds cb = combined_bounds(std::sqrt(q), std::sqrt(q), q);
  const SkMultiset s2 = compute_sk(2, field_for(101, 1));
  Json s2_entries = Json::array();
  for (const auto& [e, m] : s2.entries) s2_entries.push_back(Json::array({e.code, m}));
  o.report.summary = {
      {"type_ii_saving_at_sqrt_q", bracket_saving_exponent(typeII_terms(root, root, q), q)},
      {"type_i_saving_at_sqrt_q", bracket_saving_exponent(typeI_terms(root, root, q), q)},
      {"type_ii_threshold", nontrivial_threshold(Bracket::TypeII, q)},
      {"type_i_threshold", nontrivial_threshold(Bracket::TypeI, q)},
      {"type_i_smooth_over_MN_at_sqrt_q", cb.type_i_smooth / q},
      {"delta_star", cd.delta_star},
      {"eta_star", cd.eta_star},
      {"s2_at_q101", s2_entries}};
  o.report.columns = {"quantity", "value"};
  for (const auto& [key, value] : o.report.summary.items()) {
    if (value.is_number()) o.report.rows.push_back({key, value.get<double>()});
  }
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"klab: hyper-Kloosterman sums, sum-products, bilinear forms and bound calculators", "klab"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file with a section per subcommand; flags override it");
  app.set_version_flag("--version", artifact_version());

  Args a;
  std::string format = "json";
  std::string out_path;
  unsigned workers = 1;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "Write output to this file instead of stdout");
  app.add_option("--workers", workers, "Worker threads for parallel scans")->check(CLI::Range(1u, 1024u));

  std::function<Outcome(const Args&)> handler;
  const auto sub = [&](const char* name, const char* help, Outcome (*fn)(const Args&)) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    s->callback([&handler, fn] { handler = fn; });
    return s;
  };
  const auto opt_q = [&](CLI::App* s) { s->add_option("--q", a.q, "Prime modulus (comma-separated list allowed)")->delimiter(','); };
  const auto opt_k = [&](CLI::App* s) { s->add_option("--k", a.k, "Rank k (comma-separated list allowed)")->delimiter(','); };
  const auto opt_d = [&](CLI::App* s) { s->add_option("--d", a.d, "Extension degree")->check(CLI::Range(1, 32)); };
  const auto opt_c = [&](CLI::App* s) { s->add_option("--c", a.c, "Twist parameter c"); };
  const auto opt_mn = [&](CLI::App* s) {
    s->add_option("--M", a.M, "M (comma-separated list allowed)")->delimiter(',');
    s->add_option("--N", a.N, "N (comma-separated list allowed)")->delimiter(',');
    s->add_option("--offset", a.offset, "First element of the N-interval");
  };
  const auto opt_seed = [&](CLI::App* s) {
    s->add_option("--seed", a.seed, "Seed for sampled quantities");
    s->add_option("--samples", a.samples, "Number of samples");
  };

  auto* kl_table = sub("kl-table", "Tabulate Kl_k over F_{q^d}", cmd_kl_table);
  opt_q(kl_table), opt_k(kl_table), opt_d(kl_table), opt_c(kl_table);
  kl_table->add_option("--convention", a.convention, "intro or sheaf")->check(CLI::IsMember({"intro", "sheaf"}));

  auto* kl_check = sub("kl-check", "Compare convolution tables with the counting oracle", cmd_kl_check);
  opt_q(kl_check), opt_k(kl_check), opt_d(kl_check);

  auto* scan = sub("sumprod-scan", "Normalized sum-product ratios and the bad-tuple scan", cmd_sumprod_scan);
  opt_q(scan), opt_k(scan), opt_c(scan), opt_seed(scan);
  scan->add_option("--threshold", a.threshold, "Flag threshold as a multiple of the sample median");
  scan->add_option("--scan-samples", a.scan_samples, "Sampled tuples when q exceeds the exhaustive limit");
  scan->add_option("--exhaustive-max", a.exhaustive_max, "Largest q scanned exhaustively");

  auto* moments = sub("moments", "Second moments and the full average", cmd_moments);
  opt_q(moments), opt_k(moments), opt_d(moments), opt_c(moments);
  moments->add_option("--b", a.b, "Shift tuple b1,b2,b3,b4")->delimiter(',')->expected(4);

  auto* sweep = sub("bilinear-sweep", "Measured bilinear forms against the bound brackets", cmd_bilinear_sweep);
  opt_q(sweep), opt_k(sweep), opt_c(sweep), opt_mn(sweep), opt_seed(sweep);

  auto* opnorm = sub("opnorm", "Largest singular value of the Kloosterman kernel", cmd_opnorm);
  opt_q(opnorm), opt_k(opnorm), opt_c(opnorm), opt_mn(opnorm);

  auto* shift = sub("shift-check", "Both sides of the shift-by-ab re-indexing", cmd_shift_check);
  opt_q(shift), opt_k(shift), opt_c(shift), opt_mn(shift), opt_seed(shift);
  shift->add_option("--A", a.A, "Averaging length A");
  shift->add_option("--B", a.B, "Averaging length B");

  auto* sk = sub("sk", "The multiset S_k and its stabilizer", cmd_sk);
  opt_q(sk), opt_k(sk), opt_d(sk);
  sk->add_option("--scan", a.scan_qmax, "Scan every prime up to this bound instead");

  auto* prog = sub("progression", "Discrepancy of (lambda_f * 1) in progressions", cmd_progression);
  opt_q(prog);
  prog->add_option("--x", a.x, "Summation length x");
  prog->add_option("--nmax", a.nmax, "Size of the tau table (defaults to x)");

  auto* lp = sub("exponent-lp", "Exponent-of-distribution case analysis", cmd_exponent_lp);
  lp->add_option("--delta", a.delta, "delta with x = q^{2-delta}");
  lp->add_option("--kappa", a.kappa, "Required margin below 1");
  lp->add_option("--slack", a.slack, "Slack for o(1) terms");
  lp->add_option("--grid", a.grid, "Grid step");
  lp->add_flag("--search", a.search, "Bisect for the critical delta");

  auto* rep = sub("report", "Headline numbers: bracket savings, thresholds, critical exponent", cmd_report);
  opt_q(rep);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << artifact_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << to_string(ErrorKind::UsageError) << ": " << e.what() << '\n';
    return kExitError;
  }

  try {
    set_worker_count(workers);
    const Outcome outcome = handler(a);
    const OutputFormat fmt = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    if (out_path.empty()) {
      emit_report(outcome.report, fmt, out);
    } else {
      std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
      if (!file) throw Error(ErrorKind::IoError, "cannot open " + out_path);
      emit_report(outcome.report, fmt, file);
    }
    return outcome.hypothesis_violated ? kExitHypothesis : kExitOk;
  } catch (const Error& e) {
    err << e.what() << '\n';
    const bool hypothesis = e.kind() == ErrorKind::HypothesisViolated || e.kind() == ErrorKind::ConstraintViolated;
    return hypothesis ? kExitHypothesis : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace klab
