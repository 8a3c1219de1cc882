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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace klab {

/// Neumaier (improved Kahan-Babuska) accumulator. Works for real scalars and
/// for std::complex, in which case the two components are compensated
/// independently.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) { add_impl(x); }
  CompensatedSum& operator+=(Scalar x) {
    add_impl(x);
    return *this;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  template <typename T>
  static void two_sum(T& sum, T& comp, T x) {
    const T t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  template <typename T>
  void add_impl(std::complex<T> x) {
    T sr = sum_.real(), si = sum_.imag(), cr = comp_.real(), ci = comp_.imag();
    two_sum(sr, cr, x.real());
    two_sum(si, ci, x.imag());
    sum_ = {sr, si};
    comp_ = {cr, ci};
  }
  template <typename T>
  void add_impl(T x) {
    two_sum(sum_, comp_, x);
  }

  Scalar sum_{};
  Scalar comp_{};
};

template <typename Scalar>
Scalar compensated_sum(std::span<const Scalar> xs) {
  CompensatedSum<Scalar> acc;
  for (const Scalar& x : xs) acc += x;
  return acc.value();
}

/// Least-squares slope of log(ys) against log(xs).
inline double log_log_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
  std::nth_element(xs.begin(), mid, xs.end());
  if (xs.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(xs.begin(), mid);
  return 0.5 * (lo + hi);
}

/// |a - b| / max(|a|, |b|, floor).
template <typename Scalar>
double relative_deviation(Scalar a, Scalar b, double floor = 1e-300) {
  const double scale = std::max({static_cast<double>(std::abs(a)), static_cast<double>(std::abs(b)), floor});
  return static_cast<double>(std::abs(a - b)) / scale;
}

}  // namespace klab
