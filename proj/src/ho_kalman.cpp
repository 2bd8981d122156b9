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

#include "ldslab/ho_kalman.hpp"

#include <cmath>

#include "ldslab/error.hpp"

namespace ldslab {

HankelMatrix build_hankel(const MarkovMatrix& g, Index s) {
    require(s >= 1, "build_hankel: s must be positive");
    require(g.p >= 1, "build_hankel: Markov matrix has no input dimension");
    if (g.data.cols() != (2 * s + 1) * g.p)
        throw_usage("build_hankel: Markov matrix width " + std::to_string(g.data.cols()) +
                    " does not match (2s+1)p = " + std::to_string((2 * s + 1) * g.p));
    const Index m = g.m();
    const Index p = g.p;
    HankelMatrix h;
    h.s = s;
    h.m = m;
    h.p = p;
    h.data.resize(m * s, p * (s + 1));
    for (Index i = 0; i < s; ++i)
        for (Index j = 0; j <= s; ++j) h.data.block(i * m, j * p, m, p) = g.block(i + j + 1);
    return h;
}

Realization ho_kalman(const MarkovMatrix& g, Index s, Index n) {
    const HankelMatrix h = build_hankel(g, s);
    const Index m = h.m;
    const Index p = h.p;
    require(n >= 1, "ho_kalman: state dimension must be positive");
    require(n <= std::min(m * s, p * s),
            "ho_kalman: n=" + std::to_string(n) + " exceeds min(ms, ps)");

    const MatrixXd past = h.past();
    const Svd svd = thin_svd(past);

    Realization out;
    out.hankel_singular_values = svd.sigma;
    const double top = svd.sigma.size() > 0 ? svd.sigma(0) : 0.0;
    Index rank = 0;
    while (rank < svd.sigma.size() && top > 0.0 && svd.sigma(rank) > kRankRelTol * top) ++rank;
    out.rank_deficient = n > rank;

    const VectorXd root = svd.sigma.head(n).cwiseSqrt();
    out.observability = svd.u.leftCols(n) * root.asDiagonal();
    out.controllability = root.asDiagonal() * svd.v.leftCols(n).transpose();

    LdsParams& est = out.params;
    est.d = g.block(0);
    est.c = out.observability.topRows(m);
    est.b = out.controllability.leftCols(p);
    est.a = pinv(out.observability) * h.future() * pinv(out.controllability);
    return out;
}

double realization_residual(const MarkovMatrix& g, const LdsParams& params) {
    require(g.blocks() >= 1, "realization_residual: empty Markov matrix");
    const MarkovMatrix model = markov_matrix(params, g.blocks() - 1);
    if (model.data.rows() != g.data.rows() || model.data.cols() != g.data.cols())
        throw_usage("realization_residual: shape mismatch");
    return (g.data - model.data).norm();
}

Index estimate_order(const MarkovMatrix& g, Index s, double rel_tol) {
    return numerical_rank(build_hankel(g, s).past(), rel_tol);
}

}  // namespace ldslab
