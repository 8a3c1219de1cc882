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

#include <Eigen/Dense>

namespace klab {

/// X_j = sum_t x_t exp(-2 pi i j t / n) for any length n. Lengths whose prime
/// factors are all <= 5 go straight to Eigen's FFT; other lengths use
/// Bluestein's chirp-z reduction to a power-of-two transform.
Eigen::VectorXcd cyclic_dft(const Eigen::VectorXcd& x);

/// Inverse of cyclic_dft, including the 1/n factor.
Eigen::VectorXcd inverse_cyclic_dft(const Eigen::VectorXcd& x);

/// (a * b)_j = sum_t a_t b_{j - t mod n}, computed in O(n log n).
Eigen::VectorXcd cyclic_convolution(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// Schoolbook O(n^2) cyclic convolution with compensated accumulation.
Eigen::VectorXcd cyclic_convolution_direct(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace klab
