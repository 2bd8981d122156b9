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

#ifndef LDSLAB_LEARNER_HPP
#define LDSLAB_LEARNER_HPP

#include <cstdint>
#include <vector>

#include "ldslab/ho_kalman.hpp"
#include "ldslab/lds.hpp"
#include "ldslab/moments.hpp"
#include "ldslab/tensor.hpp"

namespace ldslab {

/// Floor applied to negative or zero regression weights.
inline constexpr double kWeightFloor = 1e-6;

/// Default number of random contraction pairs tried by the learner.
inline constexpr int kDefaultJennrichAttempts = 32;

inline JennrichOptions default_learner_jennrich() {
    JennrichOptions o;
    o.attempts = kDefaultJennrichAttempts;
    return o;
}

struct LearnConfig {
    Index k = 1;
    Index n = 1;
    Index s = 1;
    std::uint64_t seed = 0;
    /// Average the moment tensor over mode permutations before decomposing.
    /// The population tensor is symmetric, so this only removes noise.
    bool symmetrize = true;
    JennrichOptions jennrich = default_learner_jennrich();
};

struct LearnedComponent {
    double weight = 0;          // final, renormalized
    double raw_weight = 0;      // wtilde^{3/2} before renormalization
    double regression_weight = 0;  // wtilde after clamping
    bool weight_clamped = false;
    LdsParams params;
    MatrixXd g_tilde;  // ~ w^{1/3} G_{2s}
    MatrixXd g_hat;    // ~ G_{2s}
    bool hankel_rank_deficient = false;
};

struct LearnedMixture {
    Index m = 0, n = 0, p = 0, s = 0;
    std::vector<LearnedComponent> components;
    /// ||Pi - sum of Jennrich components||_F / ||Pi||_F
    double tensor_residual = 0;
    /// ||sum_i wtilde_i Gtilde_i - R||_F
    double regression_residual = 0;
    double raw_weight_sum = 0;
    /// Number of (a, b) draws that produced a valid decomposition.
    int jennrich_successes = 0;

    MixtureSpec to_mixture() const;
};

/// Decomposes the flattened moment tensor into k rank-one terms and returns
/// Gtilde_i = unflatten(v_i / ||v_i||^{2/3}) with v_i from the slice norms.
/// Signs come from the mode-1 fiber at the largest (mode-2, mode-3) entry and
/// are then fixed globally so the implied weight is positive.
std::vector<MatrixXd> learn_markov_components(const FlatTensor3& flat, Index k, Engine& eng,
                                              const JennrichOptions& opts = {},
                                              double* tensor_residual = nullptr,
                                              int* successful_attempts = nullptr);

struct WeightFit {
    std::vector<double> raw;      // unconstrained least-squares minimizer
    std::vector<double> weights;  // after clamping to kWeightFloor
    std::vector<bool> clamped;
    double residual = 0;
};

/// min over wtilde of ||sum_i wtilde_i Gtilde_i - R||_F.
WeightFit recover_weights(const std::vector<MatrixXd>& g_tilde, const CrossCovarianceStack& r);

struct FinalComponent {
    double weight = 0;      // renormalized
    double raw_weight = 0;  // wtilde^{3/2}
    MatrixXd g_hat;         // Gtilde / sqrt(wtilde)
};

std::vector<FinalComponent> finalize_components(const std::vector<MatrixXd>& g_tilde,
                                                const std::vector<double>& w_tilde);

/// Everything after moment estimation. Exposed so that exact moments can be
/// fed through the same path as empirical ones.
LearnedMixture learn_from_moments(const FlatTensor3& flat, const CrossCovarianceStack& r,
                                  const LearnConfig& cfg);

/// Full pipeline: moments, tensor decomposition, weight regression, Ho-Kalman.
LearnedMixture learn_mixture(const Dataset& data, const LearnConfig& cfg);

struct ComponentAlignment {
    int truth = 0;
    int estimate = 0;
    MatrixXd similarity;  // U with A ~ U^{-1} Ahat U, C ~ Chat U, B ~ U^{-1} Bhat
    double condition = 0;
    bool ill_conditioned = false;
    double err_a = 0, err_b = 0, err_c = 0, err_d = 0, err_w = 0;
    double markov_distance = 0;

    double max_param_error() const;
};

struct AlignmentReport {
    /// permutation[i] = index of the estimate matched to truth component i.
    std::vector<int> permutation;
    std::vector<ComponentAlignment> components;
    double max_param_error = 0;  // over A, B, C, D
    double max_weight_error = 0;
    double max_error = 0;        // including weights
};

/// Matches components by min-cost assignment on ||G_true,2s - G_est,2s||_F,
/// then aligns each pair with U = pinv(Ohat_s) O_s.
AlignmentReport align_similarity(const MixtureSpec& truth, const MixtureSpec& estimate, Index s);

/// Exact Gaussian log-density of (u_0..u_{l-1}, y_0..y_{l-1}) under the unit
/// noise model, built from the linear map of (x_0, u, w, z) to the
/// observations.
double component_log_likelihood(const LdsParams& params, const Trajectory& traj);

/// Cached factorization for repeated likelihood evaluations at one length.
class TrajectoryDensity {
public:
    TrajectoryDensity(const LdsParams& params, std::size_t length);
    double log_density(const Trajectory& traj) const;
    std::size_t length() const { return length_; }

private:
    std::size_t length_;
    Index m_, p_;
    Eigen::LLT<MatrixXd> chol_;
    double log_det_ = 0;
};

struct PosteriorReport {
    std::vector<double> probabilities;
    std::vector<double> log_likelihoods;
    int argmax() const;
};

/// p_i proportional to w_i exp(logs_i), normalized with log-sum-exp.
PosteriorReport posterior_from_logs(const std::vector<double>& weights, std::vector<double> logs);

PosteriorReport cluster_posterior(const MixtureSpec& mix, const Trajectory& traj);

/// Batch version reusing per-component factorizations; parallel over
/// trajectories, results in input order.
std::vector<PosteriorReport> cluster_dataset(const MixtureSpec& mix, const Dataset& data);

}  // namespace ldslab

#endif  // LDSLAB_LEARNER_HPP
