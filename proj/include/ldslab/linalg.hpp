/*
 Copyright 2026 The ldslab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef LDSLAB_LINALG_HPP
#define LDSLAB_LINALG_HPP

#include <vector>

#include <Eigen/Dense>

namespace ldslab {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thin SVD with a deterministic sign convention: the largest-magnitude entry
/// of every left singular vector is positive (the matching right vector is
/// flipped with it). Singular values are in descending order.
struct Svd {
    MatrixXd u;
    VectorXd sigma;
    MatrixXd v;
};

Svd thin_svd(const MatrixXd& a);

/// Best rank-r approximation (Eckart-Young) via SVD truncation.
MatrixXd truncate_rank(const MatrixXd& a, Index r);

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max
/// are treated as zero.
MatrixXd pinv(const MatrixXd& a, double rel_tol = 1e-12);

/// Number of singular values above rel_tol * sigma_max.
Index numerical_rank(const MatrixXd& a, double rel_tol);

double spectral_norm(const MatrixXd& a);

/// Smallest of the min(rows, cols) singular values; 0 for empty matrices.
double smallest_singular_value(const MatrixXd& a);

/// The r-th largest singular value (1-based), 0 if r exceeds the count.
double singular_value(const MatrixXd& a, Index r);

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<int> min_cost_assignment(const MatrixXd& cost);

}  // namespace ldslab

#endif  // LDSLAB_LINALG_HPP
