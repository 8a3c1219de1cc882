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

#include "klab/cyclic_dft.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "klab/finite_field.hpp"
#include "klab/numeric.hpp"

namespace klab {

namespace {

using cd = std::complex<double>;

bool is_smooth(std::uint64_t n) {
  for (std::uint64_t p : {2u, 3u, 5u}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

std::vector<cd> to_std(const Eigen::VectorXcd& x) { return {x.data(), x.data() + x.size()}; }

Eigen::VectorXcd to_eigen(const std::vector<cd>& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

// Forward transform with kernel exp(sign * 2 pi i j t / n), unscaled.
std::vector<cd> dft(const std::vector<cd>& x, int sign) {
  const std::size_t n = x.size();
  if (n <= 1) return x;
  Eigen::FFT<double> fft;
  if (is_smooth(n)) {
    std::vector<cd> out;
    if (sign < 0) {
      fft.fwd(out, x);
    } else {
      fft.SetFlag(Eigen::FFT<double>::Unscaled);
      fft.inv(out, x);
    }
    return out;
  }

  // Bluestein: j t = (j^2 + t^2 - (j - t)^2) / 2.
  std::size_t len = 1;
  while (len < 2 * n - 1) len <<= 1;
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
  std::vector<cd> chirp(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::uint64_t sq = static_cast<std::uint64_t>(static_cast<unsigned __int128>(t) * t % two_n);
    chirp[t] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n));
  }
  std::vector<cd> a(len, cd{}), b(len, cd{});
  for (std::size_t t = 0; t < n; ++t) a[t] = x[t] * chirp[t];
  b[0] = std::conj(chirp[0]);
  for (std::size_t t = 1; t < n; ++t) b[t] = b[len - t] = std::conj(chirp[t]);

  std::vector<cd> fa, fb, prod(len), conv;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  for (std::size_t i = 0; i < len; ++i) prod[i] = fa[i] * fb[i];
  fft.inv(conv, prod);
  std::vector<cd> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = conv[j] * chirp[j];
  return out;
}

}  // namespace

Eigen::VectorXcd cyclic_dft(const Eigen::VectorXcd& x) { return to_eigen(dft(to_std(x), -1)); }

Eigen::VectorXcd inverse_cyclic_dft(const Eigen::VectorXcd& x) {
  Eigen::VectorXcd out = to_eigen(dft(to_std(x), +1));
  if (x.size() > 0) out /= static_cast<double>(x.size());
  return out;
}

Eigen::VectorXcd cyclic_convolution(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const Eigen::VectorXcd fa = cyclic_dft(a), fb = cyclic_dft(b);
  return inverse_cyclic_dft(fa.cwiseProduct(fb));
}

Eigen::VectorXcd cyclic_convolution_direct(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const Eigen::Index n = a.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    CompensatedSum<cd> acc;
    for (Eigen::Index t = 0; t < n; ++t) {
      Eigen::Index u = j - t;
      if (u < 0) u += n;
      acc += a[t] * b[u];
    }
    out[j] = acc.value();
  }
  return out;
}

}  // namespace klab
