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

#include "klab/kloosterman.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "klab/cyclic_dft.hpp"
#include "klab/error.hpp"
#include "klab/numeric.hpp"

namespace klab {

namespace {

using cd = std::complex<double>;

void require_k(int k) {
  if (k < 2) throw Error(ErrorKind::OutOfRange, "Kloosterman rank k must be >= 2");
}

std::uint64_t checked_power(std::uint64_t base, int e, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > cap / std::max<std::uint64_t>(base, 1)) return cap + 1;
    r *= base;
  }
  return r;
}

// Traces of all elements from the Frobenius traces of the monomial basis.
std::vector<std::uint32_t> reference_traces(const ExtField& field) {
  const std::uint32_t q = field.q();
  std::vector<std::uint32_t> basis(static_cast<std::size_t>(field.degree()));
  std::uint32_t code = 1;
  for (int i = 0; i < field.degree(); ++i) {
    basis[i] = field.trace_frobenius({code});
    code *= q;
  }
  std::vector<std::uint32_t> tr(field.size());
  for (std::uint32_t x = 0; x < field.size(); ++x) {
    std::uint64_t v = x, t = 0;
    for (int i = 0; i < field.degree(); ++i) {
      t += (v % q) * basis[i];
      v /= q;
    }
    tr[x] = static_cast<std::uint32_t>(t % q);
  }
  return tr;
}

cd weighted_roots(const ExtField& field, const std::uint64_t* counts) {
  CompensatedSum<cd> acc;
  for (std::uint32_t j = 0; j < field.q(); ++j) {
    if (counts[j]) acc += static_cast<double>(counts[j]) * field.unit_root(j);
  }
  return acc.value();
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorKind::IoError, "truncated table cache");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorKind::IoError, "truncated table cache");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

constexpr char kMagic[4] = {'K', 'L', 'T', 'B'};
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

std::string_view to_string(SignConvention convention) {
  return convention == SignConvention::Intro ? "intro" : "sheaf";
}

std::string_view to_string(BuildPath path) {
  switch (path) {
    case BuildPath::Naive: return "naive";
    case BuildPath::DirectConvolution: return "direct-convolution";
    case BuildPath::FastTransform: return "fast-transform";
    case BuildPath::Pullback: return "pullback";
    case BuildPath::Cache: return "cache";
  }
  return "unknown";
}

KloostermanTable::KloostermanTable(int k, ExtFieldPtr field, SignConvention convention, BuildPath path,
                                   Eigen::VectorXcd values, ExtElement scale)
    : k_(k),
      field_(std::move(field)),
      convention_(convention),
      path_(path),
      values_(std::move(values)),
      scale_(scale) {
  values_[0] = cd{0.0, 0.0};
}

double KloostermanTable::normalization() const noexcept {
  return std::pow(static_cast<double>(field_->size()), 0.5 * (k_ - 1));
}

double KloostermanTable::tolerance() const noexcept {
  const double terms = std::pow(static_cast<double>(field_->size()), k_ - 1);
  return terms * 1e-15 / normalization();
}

cd kloosterman_naive(int k, ExtElement a, const ExtField& field, SignConvention convention,
                     std::uint64_t cap) {
  require_k(k);
  if (a.code == 0) return {0.0, 0.0};
  const std::uint32_t units = field.size() - 1;
  if (checked_power(units, k - 1, cap) > cap) {
    throw Error(ErrorKind::ResourceLimit, "naive Kloosterman enumeration exceeds the configured cap");
  }
  const std::vector<std::uint32_t> tr = reference_traces(field);
  std::vector<std::uint64_t> counts(field.q(), 0);

  // Odometer over (x_1, ..., x_{k-1}) in (F^x)^{k-1}; x_k = a / (x_1 ... x_{k-1}).
  std::function<void(int, ExtElement, ExtElement)> walk = [&](int level, ExtElement prod, ExtElement sum) {
    if (level == k - 1) {
      const ExtElement last = field.mul_poly(a, field.inv_poly(prod));
      ++counts[tr[field.add(sum, last).code]];
      return;
    }
    for (std::uint32_t x = 1; x < field.size(); ++x) {
      walk(level + 1, field.mul_poly(prod, {x}), field.add(sum, {x}));
    }
  };
  walk(0, field.one(), field.zero());

  const double norm = std::pow(static_cast<double>(field.size()), 0.5 * (k - 1));
  return sign_factor(k, convention) * weighted_roots(field, counts.data()) / norm;
}

KloostermanTable kloosterman_table_naive(int k, ExtFieldPtr field_ptr, SignConvention convention,
                                         std::uint64_t cap) {
  require_k(k);
  const ExtField& field = *field_ptr;
  const std::uint32_t size = field.size(), q = field.q();
  if (checked_power(size - 1, k, cap) > cap) {
    throw Error(ErrorKind::ResourceLimit, "naive Kloosterman table exceeds the configured cap");
  }
  const std::vector<std::uint32_t> tr = reference_traces(field);

  // Local multiplication/addition tables from polynomial arithmetic.
  constexpr std::uint32_t kTableMax = 4096;
  std::vector<std::uint32_t> mul_table, add_table;
  const bool tabulate = size <= kTableMax;
  if (tabulate) {
    mul_table.resize(static_cast<std::size_t>(size) * size);
    add_table.resize(static_cast<std::size_t>(size) * size);
    for (std::uint32_t x = 0; x < size; ++x) {
      for (std::uint32_t y = 0; y < size; ++y) {
        mul_table[static_cast<std::size_t>(x) * size + y] = field.mul_poly({x}, {y}).code;
        add_table[static_cast<std::size_t>(x) * size + y] = field.add({x}, {y}).code;
      }
    }
  }
  const auto mul = [&](std::uint32_t x, std::uint32_t y) {
    return tabulate ? mul_table[static_cast<std::size_t>(x) * size + y] : field.mul_poly({x}, {y}).code;
  };
  const auto add = [&](std::uint32_t x, std::uint32_t y) {
    return tabulate ? add_table[static_cast<std::size_t>(x) * size + y] : field.add({x}, {y}).code;
  };

  // counts[a * q + j] = #{(x_1..x_k) in (F^x)^k : prod = a, Tr(sum) = j}.
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(size) * q, 0);
  std::function<void(int, std::uint32_t, std::uint32_t)> walk = [&](int level, std::uint32_t prod,
                                                                    std::uint32_t sum) {
    if (level == k - 1) {
      for (std::uint32_t x = 1; x < size; ++x) {
        ++counts[static_cast<std::size_t>(mul(prod, x)) * q + tr[add(sum, x)]];
      }
      return;
    }
    for (std::uint32_t x = 1; x < size; ++x) walk(level + 1, mul(prod, x), add(sum, x));
  };
  walk(0, 1, 0);

  const double scale = sign_factor(k, convention) / std::pow(static_cast<double>(size), 0.5 * (k - 1));
  Eigen::VectorXcd values = Eigen::VectorXcd::Zero(size);
  for (std::uint32_t a = 1; a < size; ++a) {
    values[a] = scale * weighted_roots(field, counts.data() + static_cast<std::size_t>(a) * q);
  }
  return {k, std::move(field_ptr), convention, BuildPath::Naive, std::move(values)};
}

KloostermanTable kloosterman_table(int k, ExtFieldPtr field_ptr, SignConvention convention,
                                   const KloostermanOptions& options) {
  require_k(k);
  const ExtField& field = *field_ptr;
  const std::uint32_t n = field.group_order();

  BuildPath path = field.size() <= options.direct_max ? BuildPath::DirectConvolution : BuildPath::FastTransform;
  if (options.force_path) {
    if (*options.force_path == BuildPath::Naive) return kloosterman_table_naive(k, field_ptr, convention);
    if (*options.force_path == BuildPath::DirectConvolution || *options.force_path == BuildPath::FastTransform) {
      path = *options.force_path;
    }
  }

  // f[t] = psi(g^t); the raw sum at g^t is the k-fold cyclic convolution of f.
  Eigen::VectorXcd f(n);
  for (std::uint32_t t = 0; t < n; ++t) f[t] = field.unit_root(field.trace(field.exp(t)));

  Eigen::VectorXcd raw;
  if (path == BuildPath::DirectConvolution) {
    raw = f;
    for (int i = 1; i < k; ++i) raw = cyclic_convolution_direct(raw, f);
  } else {
    Eigen::VectorXcd spectrum = cyclic_dft(f);
    Eigen::VectorXcd powered = spectrum;
    for (int i = 1; i < k; ++i) powered = powered.cwiseProduct(spectrum);
    raw = inverse_cyclic_dft(powered);
  }

  const double scale = sign_factor(k, convention) / std::pow(static_cast<double>(field.size()), 0.5 * (k - 1));
  Eigen::VectorXcd values = Eigen::VectorXcd::Zero(field.size());
  for (std::uint32_t t = 0; t < n; ++t) values[field.exp(t).code] = scale * raw[t];
  return {k, std::move(field_ptr), convention, path, std::move(values)};
}

KloostermanTable pullback_scale(const KloostermanTable& table, ExtElement c) {
  if (c.code == 0) throw Error(ErrorKind::ZeroScale, "pullback by zero");
  const ExtField& field = table.field();
  Eigen::VectorXcd values(field.size());
  for (std::uint32_t a = 0; a < field.size(); ++a) values[a] = table[field.mul(c, {a})];
  return {table.k(), table.field_ptr(), table.convention(), BuildPath::Pullback, std::move(values),
          field.mul(table.scale(), c)};
}

double conjugation_symmetry_check(const KloostermanTable& table) {
  const ExtField& field = table.field();
  double worst = 0.0;
  for (std::uint32_t a = 0; a < field.size(); ++a) {
    const ExtElement image = table.k() % 2 == 0 ? ExtElement{a} : field.neg({a});
    worst = std::max(worst, std::abs(std::conj(table[{a}]) - table[image]));
  }
  return worst;
}

double deligne_max(const KloostermanTable& table) { return table.values().cwiseAbs().maxCoeff(); }

cd raw_complete_sum(const KloostermanTable& table) {
  const double scale = table.normalization() * sign_factor(table.k(), table.convention());
  CompensatedSum<cd> acc;
  for (Eigen::Index a = 1; a < table.values().size(); ++a) acc += table.values()[a];
  return acc.value() * scale;
}

double max_table_deviation(const KloostermanTable& s, const KloostermanTable& t) {
  return (s.values() - t.values()).cwiseAbs().maxCoeff();
}

void write_table_cache(const KloostermanTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put_u32(out, kCacheVersion);
  put_u32(out, static_cast<std::uint32_t>(table.k()));
  put_u32(out, table.field().q());
  put_u32(out, static_cast<std::uint32_t>(table.field().degree()));
  put_u32(out, table.convention() == SignConvention::Intro ? 0u : 1u);
  for (std::uint32_t c : table.field().modulus()) put_u32(out, c);
  for (Eigen::Index a = 0; a < table.values().size(); ++a) {
    put_f64(out, table.values()[a].real());
    put_f64(out, table.values()[a].imag());
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

KloostermanTable read_table_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorKind::IoError, path.string() + " is not a table cache");
  }
  if (get_u32(in) != kCacheVersion) throw Error(ErrorKind::IoError, "unsupported cache version");
  const int k = static_cast<int>(get_u32(in));
  const std::uint32_t q = get_u32(in);
  const int d = static_cast<int>(get_u32(in));
  const SignConvention convention = get_u32(in) == 0 ? SignConvention::Intro : SignConvention::Sheaf;
  auto field = build_extension(make_prime_field(q), d);
  for (std::uint32_t c : field->modulus()) {
    if (get_u32(in) != c) throw Error(ErrorKind::IoError, "cache modulus does not match this build");
  }
  Eigen::VectorXcd values(field->size());
  for (Eigen::Index a = 0; a < values.size(); ++a) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    values[a] = {re, im};
  }
  return {k, std::move(field), convention, BuildPath::Cache, std::move(values)};
}

KloostermanTable cached_kloosterman_table(const std::filesystem::path& dir, int k, ExtFieldPtr field,
                                          SignConvention convention) {
  const auto file = dir / ("kl_k" + std::to_string(k) + "_q" + std::to_string(field->q()) + "_d" +
                           std::to_string(field->degree()) + "_" + std::string(to_string(convention)) + ".bin");
  if (std::filesystem::exists(file)) return read_table_cache(file);
  KloostermanTable table = kloosterman_table(k, field, convention);
  std::filesystem::create_directories(dir);
  write_table_cache(table, file);
  return table;
}

}  // namespace klab
