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

#ifndef LDSLAB_TENSOR_HPP
#define LDSLAB_TENSOR_HPP

#include <complex>
#include <vector>

#include "ldslab/error.hpp"
#include "ldslab/linalg.hpp"
#include "ldslab/rng.hpp"

namespace ldslab {

/// Dense cubic order-3 tensor, entry (i, j, z) at (i*q + j)*q + z.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(Index q) : q_(q), data_(static_cast<std::size_t>(q * q * q), 0.0) {}

    Index dim() const { return q_; }
    double& operator()(Index i, Index j, Index z) { return data_[offset(i, j, z)]; }
    double operator()(Index i, Index j, Index z) const { return data_[offset(i, j, z)]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double norm() const;
    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator-=(const Tensor3& other);
    Tensor3& operator*=(double s);

    /// Adds scale * x (x) y (x) z.
    void add_outer(const VectorXd& x, const VectorXd& y, const VectorXd& z, double scale = 1.0);

    /// q^2 x q matrix with row i*q + j and column z.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
    unfold_mode3() const {
        return {data_.data(), q_ * q_, q_};
    }
    /// q x q^2 matrix: row i, column j*q + z.
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
    unfold_mode1() const {
        return {data_.data(), q_, q_ * q_};
    }

private:
    std::size_t offset(Index i, Index j, Index z) const {
        return static_cast<std::size_t>((i * q_ + j) * q_ + z);
    }

    Index q_ = 0;
    std::vector<double> data_;
};

Tensor3 operator-(Tensor3 lhs, const Tensor3& rhs);

/// f1 (x) f2 (x) f3. Only the outer product is meaningful; the split of scale
/// between factors is arbitrary.
struct RankOneComponent {
    VectorXd f1;
    VectorXd f2;
    VectorXd f3;

    Tensor3 tensor() const;
};

/// T^(a)_{ij} = sum_z T_{ijz} a_z.
MatrixXd contract_mode3(const Tensor3& t, const VectorXd& a);

/// sum_i f1_i (x) f2_i (x) f3_i; `dim` is used for the empty list.
Tensor3 reconstruct(const std::vector<RankOneComponent>& components, Index dim = 0);

/// Average of the six mode permutations of t.
Tensor3 symmetrize(const Tensor3& t);

struct JennrichOptions {
    /// Matched eigenvalue pairs must satisfy |lambda*mu - 1| <= pairing_tol.
    double pairing_tol = 0.1;
    /// Imaginary parts above imag_tol * spectral radius are rejected.
    double imag_tol = 1e-6;
    /// Pseudoinverse cutoff relative to the largest singular value.
    double pinv_rel_tol = 1e-12;
    /// Independent (a, b) draws. Draws that fail pairing or produce complex
    /// eigenvalues are discarded; among the rest the one with the smallest
    /// reconstruction residual wins. The last failure is rethrown if none
    /// succeed.
    int attempts = 1;
};

/// Thrown when the reciprocal-eigenvalue pairing fails.
class PairingError : public Error {
public:
    PairingError(const std::string& what, std::vector<std::complex<double>> unmatched)
        : Error(ErrorCode::kNumerical, what), unmatched_(std::move(unmatched)) {}
    const std::vector<std::complex<double>>& unmatched() const { return unmatched_; }

private:
    std::vector<std::complex<double>> unmatched_;
};

/// Jennrich's simultaneous-diagonalization decomposition into `rank`
/// components:
///  1. random unit a, b;
///  2. contractions T^(a), T^(b) along mode 3;
///  3. rank-r truncations;
///  4. eigendecompositions of T_r^(a) (T_r^(b))^+ and ((T_r^(a))^+ T_r^(b))^T,
///     restricted to their rank-r ranges;
///  5-6. pairing of eigenvectors by reciprocal eigenvalues;
///  7. least squares for the mode-3 factors.
/// Repeated opts.attempts times when requested; see JennrichOptions.
std::vector<RankOneComponent> jennrich_decompose(const Tensor3& t, Index rank, Engine& eng,
                                                 const JennrichOptions& opts = {},
                                                 int* successful_attempts = nullptr);

}  // namespace ldslab

#endif  // LDSLAB_TENSOR_HPP
