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

#include "ldslab/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "ldslab/error.hpp"
#include "ldslab/parallel.hpp"

namespace ldslab {

MixtureSpec LearnedMixture::to_mixture() const {
    MixtureSpec mix;
    for (const auto& c : components) {
        mix.components.push_back(c.params);
        mix.weights.push_back(c.weight);
    }
    return mix;
}

std::vector<MatrixXd> learn_markov_components(const FlatTensor3& flat, Index k, Engine& eng,
                                              const JennrichOptions& opts,
                                              double* tensor_residual,
                                              int* successful_attempts) {
    const Index q = flat.tensor.dim();
    require(q == (2 * flat.s + 1) * flat.m * flat.p,
            "learn_markov_components: tensor side does not match (2s+1)mp");
    require(k >= 1 && k <= q, "learn_markov_components: k=" + std::to_string(k) +
                                  " exceeds the tensor rank capacity " + std::to_string(q));

    const std::vector<RankOneComponent> comps = jennrich_decompose(flat.tensor, k, eng, opts, successful_attempts);
    if (tensor_residual) {
        const double total = flat.tensor.norm();
        const double res = (flat.tensor - reconstruct(comps)).norm();
        *tensor_residual = total > 0.0 ? res / total : res;
    }

    std::vector<MatrixXd> out;
    out.reserve(comps.size());
    for (const RankOneComponent& c : comps) {
        // Mode-1 slice j of f1 (x) f2 (x) f3 has Frobenius norm |f1_j| ||f2|| ||f3||.
        const double scale = c.f2.norm() * c.f3.norm();
        Index j2 = 0, j3 = 0;
        c.f2.cwiseAbs().maxCoeff(&j2);
        c.f3.cwiseAbs().maxCoeff(&j3);
        const double pivot = c.f2(j2) * c.f3(j3);

        VectorXd v(q);
        for (Index j = 0; j < q; ++j) {
            const double fiber = c.f1(j) * pivot;
            v(j) = std::copysign(std::abs(c.f1(j)) * scale, fiber);
        }
        const double nrm = v.norm();
        if (!(nrm > 0.0)) throw_numerical("learn_markov_components: zero-norm component");
        VectorXd g = v / std::cbrt(nrm * nrm);

        // Odd order: g (x) g (x) g has the sign of g, so the implied weight
        // <T_i, g (x) g (x) g> must come out positive.
        if (c.f1.dot(g) * c.f2.dot(g) * c.f3.dot(g) < 0.0) g = -g;
        out.push_back(unflatten_markov(g, flat.m, flat.p).data);
    }
    return out;
}

WeightFit recover_weights(const std::vector<MatrixXd>& g_tilde, const CrossCovarianceStack& r) {
    require(!g_tilde.empty(), "recover_weights: no components");
    const MarkovMatrix target = r.assembled();
    const Index len = target.data.size();
    MatrixXd design(len, static_cast<Index>(g_tilde.size()));
    for (std::size_t i = 0; i < g_tilde.size(); ++i) {
        if (g_tilde[i].rows() != target.data.rows() || g_tilde[i].cols() != target.data.cols())
            throw_usage("recover_weights: component " + std::to_string(i) +
                        " shape does not match the cross-covariance stack");
        design.col(static_cast<Index>(i)) = Eigen::Map<const VectorXd>(g_tilde[i].data(), len);
    }
    const VectorXd rhs = Eigen::Map<const VectorXd>(target.data.data(), len);

    const Eigen::JacobiSVD<MatrixXd> svd(design);
    const VectorXd sv = svd.singularValues();
    if (sv.size() < design.cols() || sv(sv.size() - 1) <= 1e-8 * sv(0))
        throw_numerical("recover_weights: Gram matrix is singular; the recovered Markov matrices "
                        "are nearly collinear (joint non-degeneracy violated)");

    const VectorXd w = design.colPivHouseholderQr().solve(rhs);
    WeightFit fit;
    fit.residual = (design * w - rhs).norm();
    for (Index i = 0; i < w.size(); ++i) {
        fit.raw.push_back(w(i));
        const bool clamp = !(w(i) > 0.0);
        fit.clamped.push_back(clamp);
        fit.weights.push_back(clamp ? kWeightFloor : w(i));
    }
    return fit;
}

std::vector<FinalComponent> finalize_components(const std::vector<MatrixXd>& g_tilde,
                                                const std::vector<double>& w_tilde) {
    require(g_tilde.size() == w_tilde.size(), "finalize_components: size mismatch");
    std::vector<FinalComponent> out(g_tilde.size());
    double total = 0.0;
    for (std::size_t i = 0; i < g_tilde.size(); ++i) {
        require(w_tilde[i] > 0.0, "finalize_components: weights must be positive");
        out[i].g_hat = g_tilde[i] / std::sqrt(w_tilde[i]);
        out[i].raw_weight = std::pow(w_tilde[i], 1.5);
        total += out[i].raw_weight;
    }
    for (auto& c : out) c.weight = c.raw_weight / total;
    return out;
}

LearnedMixture learn_from_moments(const FlatTensor3& flat, const CrossCovarianceStack& r,
                                  const LearnConfig& cfg) {
    require(cfg.k >= 1 && cfg.n >= 1 && cfg.s >= 1, "learn: k, n and s must be positive");
    require(flat.s == cfg.s, "learn: moment tensor horizon does not match s");
    require(static_cast<Index>(r.blocks.size()) == 2 * cfg.s + 1,
            "learn: cross-covariance stack must hold 2s+1 blocks");

    LearnedMixture out;
    out.m = flat.m;
    out.n = cfg.n;
    out.p = flat.p;
    out.s = cfg.s;

    Engine eng = substream(cfg.seed, 0);
    std::vector<MatrixXd> g_tilde;
    if (cfg.symmetrize) {
        FlatTensor3 sym = flat;
        sym.tensor = symmetrize(flat.tensor);
        g_tilde = learn_markov_components(sym, cfg.k, eng, cfg.jennrich, &out.tensor_residual,
                                          &out.jennrich_successes);
    } else {
        g_tilde = learn_markov_components(flat, cfg.k, eng, cfg.jennrich, &out.tensor_residual,
                                          &out.jennrich_successes);
    }
    const WeightFit fit = recover_weights(g_tilde, r);
    out.regression_residual = fit.residual;
    const std::vector<FinalComponent> fin = finalize_components(g_tilde, fit.weights);

    for (std::size_t i = 0; i < fin.size(); ++i) {
        LearnedComponent c;
        c.weight = fin[i].weight;
        c.raw_weight = fin[i].raw_weight;
        c.regression_weight = fit.weights[i];
        c.weight_clamped = fit.clamped[i];
        c.g_tilde = g_tilde[i];
        c.g_hat = fin[i].g_hat;
        MarkovMatrix g;
        g.data = fin[i].g_hat;
        g.p = flat.p;
        const Realization real = ho_kalman(g, cfg.s, cfg.n);
        c.params = real.params;
        c.hankel_rank_deficient = real.rank_deficient;
        out.raw_weight_sum += c.raw_weight;
        out.components.push_back(std::move(c));
    }
    return out;
}

LearnedMixture learn_mixture(const Dataset& data, const LearnConfig& cfg) {
    if (data.empty()) throw_data("learn_mixture: empty dataset");
    require(cfg.s >= 1, "learn_mixture: s must be positive");
    const MomentTensor6 moments = estimate_sixth_moments(data, cfg.s);
    const FlatTensor3 flat = assemble_pi(moments);
    const CrossCovarianceStack r = estimate_cross_covariance_stack(data, cfg.s);
    return learn_from_moments(flat, r, cfg);
}

double ComponentAlignment::max_param_error() const {
    return std::max({err_a, err_b, err_c, err_d});
}

AlignmentReport align_similarity(const MixtureSpec& truth, const MixtureSpec& estimate, Index s) {
    truth.validate();
    require(s >= 1, "align_similarity: s must be positive");
    require(truth.k() == estimate.k(), "align_similarity: component counts differ");
    for (const auto& c : estimate.components) c.validate();
    require(estimate.n() == truth.n() && estimate.m() == truth.m() && estimate.p() == truth.p(),
            "align_similarity: dimensions differ");

    const Index k = static_cast<Index>(truth.k());
    std::vector<MatrixXd> g_true, g_est;
    for (Index i = 0; i < k; ++i) {
        g_true.push_back(markov_matrix(truth.components[i], 2 * s).data);
        g_est.push_back(markov_matrix(estimate.components[i], 2 * s).data);
    }
    MatrixXd cost(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) cost(i, j) = (g_true[i] - g_est[j]).norm();

    AlignmentReport rep;
    rep.permutation = min_cost_assignment(cost);
    for (Index i = 0; i < k; ++i) {
        const int j = rep.permutation[static_cast<std::size_t>(i)];
        const LdsParams& t = truth.components[i];
        const LdsParams& e = estimate.components[j];
        ComponentAlignment ca;
        ca.truth = static_cast<int>(i);
        ca.estimate = j;
        ca.markov_distance = cost(i, j);
        ca.similarity = pinv(observability_matrix(e, s)) * observability_matrix(t, s);

        const Svd svd = thin_svd(ca.similarity);
        const double smin = svd.sigma(svd.sigma.size() - 1);
        ca.condition = smin > 0.0 ? svd.sigma(0) / smin : std::numeric_limits<double>::infinity();
        ca.ill_conditioned = !(ca.condition <= 1e8);
        const MatrixXd u_inv = ca.ill_conditioned ? pinv(ca.similarity) : MatrixXd(ca.similarity.inverse());

        ca.err_a = (t.a - u_inv * e.a * ca.similarity).norm();
        ca.err_b = (t.b - u_inv * e.b).norm();
        ca.err_c = (t.c - e.c * ca.similarity).norm();
        ca.err_d = (t.d - e.d).norm();
        ca.err_w = std::abs(truth.weights[i] - estimate.weights[j]);

        rep.max_param_error = std::max(rep.max_param_error, ca.max_param_error());
        rep.max_weight_error = std::max(rep.max_weight_error, ca.err_w);
        rep.components.push_back(std::move(ca));
    }
    rep.max_error = std::max(rep.max_param_error, rep.max_weight_error);
    return rep;
}

TrajectoryDensity::TrajectoryDensity(const LdsParams& params, std::size_t length)
    : length_(length), m_(params.m()), p_(params.p()) {
    params.validate();
    require(length >= 1, "TrajectoryDensity: length must be positive");
    const Index len = static_cast<Index>(length);
    const Index n = params.n();

    // Latent layout: x_0 | u_0..u_{l-1} | w_0..w_{l-2} | z_0..z_{l-1}
    const Index off_u = n;
    const Index off_w = off_u + len * p_;
    const Index off_z = off_w + (len - 1) * n;
    const Index latent = off_z + len * m_;
    // Observation layout: u_0..u_{l-1} | y_0..y_{l-1}
    const Index obs = len * (p_ + m_);

    MatrixXd map = MatrixXd::Zero(obs, latent);
    MatrixXd state = MatrixXd::Zero(n, latent);
    state.leftCols(n).setIdentity();
    for (Index t = 0; t < len; ++t) {
        map.block(t * p_, off_u + t * p_, p_, p_).setIdentity();
        const Index row = len * p_ + t * m_;
        map.middleRows(row, m_) = params.c * state;
        map.block(row, off_u + t * p_, m_, p_) += params.d;
        map.block(row, off_z + t * m_, m_, m_) += MatrixXd::Identity(m_, m_);
        if (t + 1 < len) {
            MatrixXd next = params.a * state;
            next.middleCols(off_u + t * p_, p_) += params.b;
            next.middleCols(off_w + t * n, n) += MatrixXd::Identity(n, n);
            state = std::move(next);
        }
    }

    MatrixXd cov = map * map.transpose();
    chol_.compute(cov);
    if (chol_.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-10;
        chol_.compute(cov);
        if (chol_.info() != Eigen::Success)
            throw_numerical("component_log_likelihood: covariance is not positive definite");
    }
    const MatrixXd& l = chol_.matrixLLT();
    log_det_ = 2.0 * l.diagonal().array().log().sum();
}

double TrajectoryDensity::log_density(const Trajectory& traj) const {
    if (traj.length() != length_ || traj.y.size() != length_)
        throw_data("trajectory length does not match the density");
    const Index len = static_cast<Index>(length_);
    VectorXd o(len * (p_ + m_));
    for (Index t = 0; t < len; ++t) {
        if (traj.u[t].size() != p_ || traj.y[t].size() != m_)
            throw_data("trajectory dimensions do not match the model");
        o.segment(t * p_, p_) = traj.u[t];
        o.segment(len * p_ + t * m_, m_) = traj.y[t];
    }
    const VectorXd white = chol_.matrixL().solve(o);
    const double d = static_cast<double>(o.size());
    return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det_ + white.squaredNorm());
}

double component_log_likelihood(const LdsParams& params, const Trajectory& traj) {
    traj.validate();
    return TrajectoryDensity(params, traj.length()).log_density(traj);
}

int PosteriorReport::argmax() const {
    return static_cast<int>(std::max_element(probabilities.begin(), probabilities.end()) -
                            probabilities.begin());
}

PosteriorReport posterior_from_logs(const std::vector<double>& weights, std::vector<double> logs) {
    require(weights.size() == logs.size() && !logs.empty(),
            "posterior_from_logs: weights and log-likelihoods differ in length");
    PosteriorReport rep;
    rep.log_likelihoods = logs;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logs.size(); ++i) {
        logs[i] += std::log(weights[i]);
        top = std::max(top, logs[i]);
    }
    double total = 0.0;
    rep.probabilities.resize(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        rep.probabilities[i] = std::exp(logs[i] - top);
        total += rep.probabilities[i];
    }
    for (double& pr : rep.probabilities) pr /= total;
    return rep;
}

PosteriorReport cluster_posterior(const MixtureSpec& mix, const Trajectory& traj) {
    mix.validate();
    std::vector<double> logs;
    for (const auto& c : mix.components) logs.push_back(component_log_likelihood(c, traj));
    return posterior_from_logs(mix.weights, std::move(logs));
}

std::vector<PosteriorReport> cluster_dataset(const MixtureSpec& mix, const Dataset& data) {
    mix.validate();
    std::map<std::size_t, std::vector<TrajectoryDensity>> densities;
    for (const auto& tr : data) {
        tr.validate();
        if (densities.count(tr.length())) continue;
        auto& list = densities[tr.length()];
        for (const auto& c : mix.components) list.emplace_back(c, tr.length());
    }

    std::vector<PosteriorReport> out(data.size());
    parallel_for(shard_count(data.size()), [&](std::size_t shard) {
        const std::size_t end = std::min(data.size(), (shard + 1) * kShardSize);
        for (std::size_t i = shard * kShardSize; i < end; ++i) {
            const auto& list = densities.at(data[i].length());
            std::vector<double> logs;
            logs.reserve(list.size());
            for (const auto& dens : list) logs.push_back(dens.log_density(data[i]));
            out[i] = posterior_from_logs(mix.weights, std::move(logs));
        }
    });
    return out;
}

}  // namespace ldslab
