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

#include "entnas/spectrum.hpp"

#include <random>

#include "entnas/errors.hpp"

namespace entnas {

Eigen::VectorXd squared_singular_values(const Eigen::MatrixXd& w, SpectrumMethod method) {
  if (w.size() == 0) return Eigen::VectorXd();
  if (method == SpectrumMethod::bidiagonal_svd) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
    if (svd.info() != Eigen::Success) throw DecompositionError("BDCSVD did not converge");
    return svd.singularValues().array().square();
  }

  // Gram matrix on the short side; only the lower triangle is formed.
  const bool tall = w.rows() > w.cols();
  const Eigen::Index n = tall ? w.cols() : w.rows();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  if (tall) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(w.transpose());
  } else {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(w);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw DecompositionError("symmetric eigensolver did not converge");
  return eig.eigenvalues().cwiseMax(0.0);
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, double variance, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Eigen::MatrixXd w(rows, cols);
  double* data = w.data();
  for (Eigen::Index i = 0; i < w.size(); ++i) data[i] = normal(rng);
  return w;
}

}  // namespace entnas
