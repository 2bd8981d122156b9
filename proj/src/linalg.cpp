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

#include "ldslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldslab/error.hpp"

namespace ldslab {

Svd thin_svd(const MatrixXd& a) {
    Svd out;
    if (a.size() == 0) {
        out.u = MatrixXd::Zero(a.rows(), 0);
        out.sigma = VectorXd::Zero(0);
        out.v = MatrixXd::Zero(a.cols(), 0);
        return out;
    }
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
    for (Index j = 0; j < out.u.cols(); ++j) {
        Index imax = 0;
        out.u.col(j).cwiseAbs().maxCoeff(&imax);
        if (out.u(imax, j) < 0.0) {
            out.u.col(j) *= -1.0;
            out.v.col(j) *= -1.0;
        }
    }
    return out;
}

MatrixXd truncate_rank(const MatrixXd& a, Index r) {
    const Svd s = thin_svd(a);
    const Index keep = std::min<Index>(r, s.sigma.size());
    return s.u.leftCols(keep) * s.sigma.head(keep).asDiagonal() *
           s.v.leftCols(keep).transpose();
}

MatrixXd pinv(const MatrixXd& a, double rel_tol) {
    const Svd s = thin_svd(a);
    MatrixXd out = MatrixXd::Zero(a.cols(), a.rows());
    if (s.sigma.size() == 0) return out;
    const double cutoff = rel_tol * s.sigma(0);
    for (Index j = 0; j < s.sigma.size(); ++j) {
        if (s.sigma(j) <= cutoff || s.sigma(j) == 0.0) break;
        out.noalias() += (s.v.col(j) / s.sigma(j)) * s.u.col(j).transpose();
    }
    return out;
}

Index numerical_rank(const MatrixXd& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<MatrixXd> svd(a);
    const VectorXd& sv = svd.singularValues();
    if (sv(0) == 0.0) return 0;
    Index r = 0;
    while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
    return r;
}

double spectral_norm(const MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<MatrixXd>(a).singularValues()(0);
}

double smallest_singular_value(const MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(a).singularValues();
    return sv(sv.size() - 1);
}

double singular_value(const MatrixXd& a, Index r) {
    if (a.size() == 0 || r < 1) return 0.0;
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(a).singularValues();
    return r <= sv.size() ? sv(r - 1) : 0.0;
}

std::vector<int> min_cost_assignment(const MatrixXd& cost) {
    if (cost.rows() != cost.cols()) throw_usage("min_cost_assignment: cost matrix must be square");
    const int n = static_cast<int>(cost.rows());
    if (n == 0) return {};
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // Potentials formulation with 1-based sentinel column 0.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
    return assignment;
}

}  // namespace ldslab
