// Copyright 2026 The entnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "entnas/rng.hpp"

namespace entnas {

enum class SpectrumMethod {
  gram_eigen,      // eigenvalues of W W^T on the short side; production kernel
  bidiagonal_svd,  // Eigen::BDCSVD singular values; reference
};

/// Squared singular values of `w` (length min(rows, cols)), ascending order
/// not guaranteed. Throws DecompositionError on non-convergence.
Eigen::VectorXd squared_singular_values(const Eigen::MatrixXd& w,
                                        SpectrumMethod method = SpectrumMethod::gram_eigen);

/// i.i.d. N(0, variance) entries, column-major fill order.
Eigen::MatrixXd gaussian_matrix(int rows, int cols, double variance, Rng& rng);

}  // namespace entnas
