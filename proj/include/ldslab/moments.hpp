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

#ifndef LDSLAB_MOMENTS_HPP
#define LDSLAB_MOMENTS_HPP

#include <vector>

#include "ldslab/lds.hpp"
#include "ldslab/tensor.hpp"

namespace ldslab {

// Moment statistics.
//
// With 0-based time, the sixth-moment block (k1, k2, k3) averages
//
//   y[k1+k2+k3+2] (x) u[k1+k2+2] (x) y[k1+k2+1] (x) u[k1+1] (x) y[k1] (x) u[0]
//
// whose expectation under a mixture is sum_i w_i X_{k3} (x) X_{k2} (x) X_{k1}
// with X_j the j-th Markov parameter of component i. The cross-covariance
// R_{k1} averages y[k1] u[0]^T and has expectation sum_i w_i X_{k1}.
//
// Flattening convention v(.) for an m x (2s+1)p Markov matrix G:
//   v(G)[j*m*p + row*p + col] = G(row, j*p + col)
// i.e. block index major, then row, then column.

/// One order-6 block of shape m x p x m x p x m x p, stored row-major with
/// index order (y_far, u, y_mid, u, y_near, u_0).
struct Block6 {
    Index m = 0;
    Index p = 0;
    std::vector<double> data;

    Index pair_size() const { return m * p; }
    /// (a3, a2, a1) are pair indices row*p + col for the far, mid and near pair.
    double at(Index a3, Index a2, Index a1) const {
        const Index q = pair_size();
        return data[static_cast<std::size_t>((a3 * q + a2) * q + a1)];
    }
};

/// All (2s+1)^3 sixth-moment blocks, optionally with per-entry Monte-Carlo
/// standard errors.
struct MomentTensor6 {
    Index s = 0;
    Index m = 0;
    Index p = 0;
    std::vector<Block6> blocks;        // index (k1*(2s+1) + k2)*(2s+1) + k3
    std::vector<Block6> std_errors;    // empty unless requested
    std::size_t samples = 0;

    Index grid() const { return 2 * s + 1; }
    std::size_t block_index(Index k1, Index k2, Index k3) const {
        return static_cast<std::size_t>((k1 * grid() + k2) * grid() + k3);
    }
    const Block6& block(Index k1, Index k2, Index k3) const {
        return blocks.at(block_index(k1, k2, k3));
    }
};

/// Order-3 tensor of side q = (2s+1)mp obtained by flattening pairs of modes.
struct FlatTensor3 {
    Index s = 0;
    Index m = 0;
    Index p = 0;
    Tensor3 tensor;
};

/// R_0 .. R_{2s}, each m x p, and the assembled m x (2s+1)p matrix.
struct CrossCovarianceStack {
    std::vector<MatrixXd> blocks;
    MarkovMatrix assembled() const;
};

/// Minimum trajectory length (0-based indexing) for horizon s: 6s + 3.
inline std::size_t min_trajectory_length(Index s) { return static_cast<std::size_t>(6 * s + 3); }

MatrixXd estimate_cross_covariance(const Dataset& data, Index k1);
MatrixXd exact_cross_covariance(const MixtureSpec& mix, Index k1);

CrossCovarianceStack estimate_cross_covariance_stack(const Dataset& data, Index s);
CrossCovarianceStack exact_cross_covariance_stack(const MixtureSpec& mix, Index s);

Block6 estimate_sixth_moment_block(const Dataset& data, Index k1, Index k2, Index k3);
Block6 exact_sixth_moment_block(const MixtureSpec& mix, Index k1, Index k2, Index k3);

struct MomentOptions {
    bool with_std_error = false;
};

/// Single streaming pass estimating every block for 0 <= k1, k2, k3 <= 2s.
/// Accumulation is compensated and sharded by trajectory index; the result
/// does not depend on the worker thread count.
MomentTensor6 estimate_sixth_moments(const Dataset& data, Index s, MomentOptions opts = {});
MomentTensor6 exact_sixth_moments(const MixtureSpec& mix, Index s);

/// Places block (k1,k2,k3) so that mode 1 carries the (k3, far pair) index,
/// mode 2 the (k2, mid pair) and mode 3 the (k1, near pair), each through v(.).
/// Exact blocks give sum_i w_i v(G_i) (x) v(G_i) (x) v(G_i).
FlatTensor3 assemble_pi(const MomentTensor6& moments);

VectorXd flatten_markov(const MarkovMatrix& g);
MarkovMatrix unflatten_markov(const VectorXd& v, Index m, Index p);

}  // namespace ldslab

#endif  // LDSLAB_MOMENTS_HPP
