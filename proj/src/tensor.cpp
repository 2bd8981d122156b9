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

#include "ldslab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <tuple>

namespace ldslab {

double Tensor3::norm() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return std::sqrt(acc);
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
    require(other.q_ == q_, "tensor dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
    require(other.q_ == q_, "tensor dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Tensor3& Tensor3::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Tensor3 operator-(Tensor3 lhs, const Tensor3& rhs) {
    lhs -= rhs;
    return lhs;
}

void Tensor3::add_outer(const VectorXd& x, const VectorXd& y, const VectorXd& z, double scale) {
    require(x.size() == q_ && y.size() == q_ && z.size() == q_, "factor length mismatch");
    std::size_t idx = 0;
    for (Index i = 0; i < q_; ++i) {
        for (Index j = 0; j < q_; ++j) {
            const double xy = scale * x(i) * y(j);
            for (Index k = 0; k < q_; ++k) data_[idx++] += xy * z(k);
        }
    }
}

Tensor3 RankOneComponent::tensor() const {
    Tensor3 t(f1.size());
    t.add_outer(f1, f2, f3);
    return t;
}

MatrixXd contract_mode3(const Tensor3& t, const VectorXd& a) {
    const Index q = t.dim();
    require(a.size() == q, "contract_mode3: vector length must match tensor dimension");
    const VectorXd flat = t.unfold_mode3() * a;
    // flat(i*q + j) -> (i, j)
    MatrixXd out(q, q);
    for (Index i = 0; i < q; ++i)
        for (Index j = 0; j < q; ++j) out(i, j) = flat(i * q + j);
    return out;
}

Tensor3 reconstruct(const std::vector<RankOneComponent>& components, Index dim) {
    const Index q = components.empty() ? dim : components.front().f1.size();
    Tensor3 t(q);
    for (const auto& c : components) t.add_outer(c.f1, c.f2, c.f3);
    return t;
}

Tensor3 symmetrize(const Tensor3& t) {
    const Index q = t.dim();
    Tensor3 out(q);
    for (Index i = 0; i < q; ++i)
        for (Index j = 0; j < q; ++j)
            for (Index z = 0; z < q; ++z)
                out(i, j, z) = (t(i, j, z) + t(i, z, j) + t(j, i, z) + t(j, z, i) + t(z, i, j) +
                                t(z, j, i)) /
                               6.0;
    return out;
}

namespace {

struct RealEigen {
    VectorXd values;
    MatrixXd vectors;  // columns
};

RealEigen real_eigen(const MatrixXd& m, double imag_tol, const char* which) {
    Eigen::EigenSolver<MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw_numerical(std::string("jennrich: eigendecomposition of ") + which + " failed");
    const Eigen::VectorXcd vals = es.eigenvalues();
    const double radius = vals.cwiseAbs().maxCoeff();
    for (Index i = 0; i < vals.size(); ++i) {
        if (std::abs(vals(i).imag()) > imag_tol * radius) {
            std::ostringstream os;
            os << "jennrich: complex eigenvalue " << vals(i) << " of " << which
               << " exceeds the imaginary-part tolerance";
            throw_numerical(os.str());
        }
    }
    RealEigen out;
    out.values = vals.real();
    out.vectors = es.eigenvectors().real();
    for (Index j = 0; j < out.vectors.cols(); ++j) {
        const double nrm = out.vectors.col(j).norm();
        if (nrm > 0.0) out.vectors.col(j) /= nrm;
    }
    return out;
}

std::vector<RankOneComponent> jennrich_once(const Tensor3& t, Index rank, Engine& eng,
                                           const JennrichOptions& opts) {
    const Index q = t.dim();
    const VectorXd a = random_unit_vector(eng, q);
    const VectorXd b = random_unit_vector(eng, q);
    const MatrixXd ta = contract_mode3(t, a);
    const MatrixXd tb = contract_mode3(t, b);

    const Svd sa = thin_svd(ta);
    const Svd sb = thin_svd(tb);
    const MatrixXd ua = sa.u.leftCols(rank);
    const MatrixXd vb = sb.v.leftCols(rank);
    const MatrixXd ta_r = ua * sa.sigma.head(rank).asDiagonal() * sa.v.leftCols(rank).transpose();
    const MatrixXd tb_r = sb.u.leftCols(rank) * sb.sigma.head(rank).asDiagonal() * vb.transpose();

    const MatrixXd u_mat = ta_r * pinv(tb_r, opts.pinv_rel_tol);
    const MatrixXd v_mat = (pinv(ta_r, opts.pinv_rel_tol) * tb_r).transpose();

    // range(U) lies in span(ua) and range(V) in span(vb), so the nonzero
    // eigenpairs are those of the r x r compressions.
    const RealEigen eu = real_eigen(ua.transpose() * u_mat * ua, opts.imag_tol, "U");
    const RealEigen ev = real_eigen(vb.transpose() * v_mat * vb, opts.imag_tol, "V");

    // Greedy matching on |lambda * mu - 1|.
    std::vector<std::tuple<double, Index, Index>> candidates;
    candidates.reserve(static_cast<std::size_t>(rank * rank));
    for (Index i = 0; i < rank; ++i)
        for (Index j = 0; j < rank; ++j)
            candidates.emplace_back(std::abs(eu.values(i) * ev.values(j) - 1.0), i, j);
    std::sort(candidates.begin(), candidates.end());
    std::vector<Index> partner(static_cast<std::size_t>(rank), -1);
    std::vector<char> v_used(static_cast<std::size_t>(rank), 0);
    std::vector<std::complex<double>> unmatched;
    for (const auto& [cost, i, j] : candidates) {
        if (partner[i] >= 0 || v_used[j]) continue;
        if (cost > opts.pairing_tol) {
            unmatched.emplace_back(eu.values(i), 0.0);
            unmatched.emplace_back(ev.values(j), 0.0);
        }
        partner[i] = j;
        v_used[j] = 1;
    }
    if (!unmatched.empty()) {
        std::ostringstream os;
        os << "jennrich: no reciprocal eigenvalue partner within " << opts.pairing_tol
           << " for eigenvalues";
        for (const auto& z : unmatched) os << ' ' << z.real();
        throw PairingError(os.str(), unmatched);
    }

    std::vector<RankOneComponent> comps(static_cast<std::size_t>(rank));
    MatrixXd design(q * q, rank);
    for (Index i = 0; i < rank; ++i) {
        RankOneComponent& c = comps[static_cast<std::size_t>(i)];
        c.f1 = ua * eu.vectors.col(i);
        c.f2 = vb * ev.vectors.col(partner[i]);
        c.f1.normalize();
        c.f2.normalize();
        for (Index r = 0; r < q; ++r)
            for (Index s = 0; s < q; ++s) design(r * q + s, i) = c.f1(r) * c.f2(s);
    }

    const Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
    if (qr.rank() < rank)
        throw_numerical("jennrich: least-squares system for the mode-3 factors is rank deficient");
    const MatrixXd w = qr.solve(MatrixXd(t.unfold_mode3()));  // rank x q
    for (Index i = 0; i < rank; ++i) comps[static_cast<std::size_t>(i)].f3 = w.row(i).transpose();
    return comps;
}

}  // namespace

std::vector<RankOneComponent> jennrich_decompose(const Tensor3& t, Index rank, Engine& eng,
                                                 const JennrichOptions& opts,
                                                 int* successful_attempts) {
    const Index q = t.dim();
    require(rank >= 1, "jennrich_decompose: rank must be at least 1");
    require(rank <= q, "jennrich_decompose: rank " + std::to_string(rank) +
                           " exceeds tensor dimension " + std::to_string(q));
    require(opts.attempts >= 1, "jennrich_decompose: attempts must be at least 1");
    for (double v : t.data())
        if (!std::isfinite(v)) throw_data("jennrich_decompose: tensor has non-finite entries");

    std::vector<RankOneComponent> best;
    double best_residual = std::numeric_limits<double>::infinity();
    std::exception_ptr last_failure;
    int ok = 0;
    for (int attempt = 0; attempt < opts.attempts; ++attempt) {
        try {
            std::vector<RankOneComponent> comps = jennrich_once(t, rank, eng, opts);
            const double res = (t - reconstruct(comps)).norm();
            ++ok;
            if (res < best_residual) {
                best_residual = res;
                best = std::move(comps);
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kNumerical) throw;
            last_failure = std::current_exception();
        }
    }
    if (successful_attempts) *successful_attempts = ok;
    if (ok == 0) std::rethrow_exception(last_failure);
    return best;
}

}  // namespace ldslab
