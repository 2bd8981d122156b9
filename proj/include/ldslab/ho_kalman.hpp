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

#ifndef LDSLAB_HO_KALMAN_HPP
#define LDSLAB_HO_KALMAN_HPP

#include "ldslab/lds.hpp"

namespace ldslab {

/// Block Hankel matrix of shape ms x p(s+1); block (i, j) holds X_{i+j+1}.
struct HankelMatrix {
    MatrixXd data;
    Index s = 0;
    Index m = 0;
    Index p = 0;

    /// First ps columns.
    MatrixXd past() const { return data.leftCols(s * p); }
    /// Last ps columns (shifted by one block).
    MatrixXd future() const { return data.rightCols(s * p); }
};

HankelMatrix build_hankel(const MarkovMatrix& g, Index s);

struct Realization {
    LdsParams params;
    /// Factors of the rank-n approximation of the past Hankel block.
    MatrixXd observability;    // ms x n
    MatrixXd controllability;  // n x ps
    VectorXd hankel_singular_values;
    /// True when n exceeds the numerical rank of the past block at the 1e-10
    /// relative threshold. The realization is still computed.
    bool rank_deficient = false;
};

/// Stable Ho-Kalman realization of order n from G = [X_0, ..., X_{2s}]:
/// D = X_0; L = rank-n truncation of the past block = U S V^T;
/// O = U S^{1/2}, Q = S^{1/2} V^T; C = O[:m], B = Q[:, :p];
/// A = O^+ H_future Q^+.
Realization ho_kalman(const MarkovMatrix& g, Index s, Index n);

/// ||g - markov_matrix(params, blocks-1)||_F, invariant under similarity.
double realization_residual(const MarkovMatrix& g, const LdsParams& params);

/// Numerical rank of the past Hankel block, for callers without a known n.
Index estimate_order(const MarkovMatrix& g, Index s, double rel_tol = 1e-6);

}  // namespace ldslab

#endif  // LDSLAB_HO_KALMAN_HPP
