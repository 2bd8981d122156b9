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

#ifndef LDSLAB_LDS_HPP
#define LDSLAB_LDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldslab/linalg.hpp"
#include "ldslab/rng.hpp"

namespace ldslab {

/// One linear dynamical system
///
///   x_{t+1} = A x_t + B u_t + w_t
///   y_t     = C x_t + D u_t + z_t
///
/// with state dimension n, input dimension p and output dimension m.
/// Time is 0-based: the first observation is y_0 = C x_0 + D u_0 + z_0.
struct LdsParams {
    MatrixXd a;  // n x n
    MatrixXd b;  // n x p
    MatrixXd c;  // m x n
    MatrixXd d;  // m x p

    Index n() const { return a.rows(); }
    Index m() const { return c.rows(); }
    Index p() const { return b.cols(); }

    /// Throws ErrorCode::kUsage naming the offending matrix on inconsistent
    /// shapes or non-finite entries.
    void validate() const;
};

/// Weighted mixture of systems sharing (m, n, p).
struct MixtureSpec {
    std::vector<LdsParams> components;
    std::vector<double> weights;

    std::size_t k() const { return components.size(); }
    Index m() const { return components.front().m(); }
    Index n() const { return components.front().n(); }
    Index p() const { return components.front().p(); }

    /// Weights strictly positive, summing to 1 within 1e-12; shared dims.
    void validate() const;
};

struct Trajectory {
    std::vector<VectorXd> u;  // length l, each in R^p
    std::vector<VectorXd> y;  // length l, each in R^m
    std::optional<int> label;

    std::size_t length() const { return u.size(); }
    void validate() const;
};

using Dataset = std::vector<Trajectory>;

struct NoiseConfig {
    std::uint64_t seed = 0;
    /// Standard deviation multiplier on x_0, w_t and z_t. 1 is the isotropic
    /// unit model; 0 makes the output a deterministic function of the inputs.
    double noise_scale = 1.0;
};

/// Every random draw behind one trajectory. Kept explicit so that the
/// recursive simulator and the closed-form expansion can share them.
struct NoiseDraws {
    VectorXd x0;
    std::vector<VectorXd> u;  // l entries
    std::vector<VectorXd> w;  // l entries (w_{l-1} never reaches an output)
    std::vector<VectorXd> z;  // l entries
};

NoiseDraws draw_noise(Index n, Index m, Index p, std::size_t length, double noise_scale,
                      Engine& eng);

/// Iterates the two recurrences on the given draws.
Trajectory simulate_with_draws(const LdsParams& params, const NoiseDraws& draws);

/// Draws x_0, u_t, w_t, z_t from `eng` and simulates `length` steps.
Trajectory simulate_trajectory(const LdsParams& params, std::size_t length,
                               double noise_scale, Engine& eng);

/// y_t from the unrolled expansion
///   y_t = sum_{i=1..t} (C A^{i-1} B u_{t-i} + C A^{i-1} w_{t-i}) + C A^t x_0 + D u_t + z_t.
/// Independent of simulate_with_draws; used as its oracle.
VectorXd closed_form_observation(const LdsParams& params, std::size_t t,
                                 const NoiseDraws& draws);

/// Draws a component label by the mixing weights, then a trajectory, for each
/// of n_traj trajectories. Trajectory i uses substream(noise.seed, i).
Dataset sample_mixture_dataset(const MixtureSpec& mix, std::size_t n_traj, std::size_t length,
                               const NoiseConfig& noise);

/// [C; CA; ...; CA^{s-1}], shape sm x n.
MatrixXd observability_matrix(const LdsParams& params, Index s);

/// [B, AB, ..., A^{s-1}B], shape n x sp.
MatrixXd controllability_matrix(const LdsParams& params, Index s);

/// X_0 = D, X_j = C A^{j-1} B.
MatrixXd markov_parameter(const LdsParams& params, Index j);

/// [X_0, X_1, ..., X_T] laid out left to right: m x (T+1)p.
struct MarkovMatrix {
    MatrixXd data;
    Index p = 0;

    Index m() const { return data.rows(); }
    Index blocks() const { return p == 0 ? 0 : data.cols() / p; }
    auto block(Index j) const { return data.middleCols(j * p, p); }
};

MarkovMatrix markov_matrix(const LdsParams& params, Index horizon);

/// Largest gamma such that ||sum_i c_i G_{L_i,s}||_F >= gamma for every unit
/// c: the smallest singular value of the matrix whose columns are the
/// flattened G_{L_i,s}. Zero when k exceeds m(s+1)p.
double joint_nondegeneracy_gamma(const MixtureSpec& mix, Index s);

struct ComponentDiagnostics {
    double norm_a = 0, norm_b = 0, norm_c = 0, norm_d = 0;  // spectral norms
    Index obs_rank = 0;
    Index ctrl_rank = 0;
    double obs_ratio = 0;   // sigma_max(O_2s) / sigma_n(O_s)
    double ctrl_ratio = 0;  // sigma_max(Q_2s) / sigma_n(Q_s)
    double obs_sigma_min = 0;
    double ctrl_sigma_min = 0;

    bool weight_ok = false;
    bool nontrivial_ok = false;  // ||B||, ||C|| >= 1
    bool bounded_ok = false;     // all four norms <= kappa
    bool obs_ok = false;         // rank n and ratio <= kappa
    bool ctrl_ok = false;
    // sigma_min(O_s), sigma_min(Q_s) <= sqrt(s) kappa; informational only.
    bool sigma_min_claim_ok = false;
};

struct WellBehavedReport {
    Index s = 0;
    double kappa_bound = 0;
    double gamma_required = 0;
    double gamma = 0;
    double w_min = 0;
    std::vector<ComponentDiagnostics> components;
    bool weights_pass = false;
    bool nontrivial_pass = false;
    bool bounded_pass = false;
    bool observability_pass = false;
    bool controllability_pass = false;
    bool joint_nondegeneracy_pass = false;

    bool pass() const {
        return weights_pass && nontrivial_pass && bounded_pass && observability_pass &&
               controllability_pass && joint_nondegeneracy_pass;
    }
};

/// Relative singular-value threshold used for every exact-rank check.
inline constexpr double kRankRelTol = 1e-10;

/// Checks each well-behavedness assumption and records the measured values.
/// Observability and controllability are both checked as rank == n; see the
/// README for the row/column-rank wording.
WellBehavedReport well_behaved_report(const MixtureSpec& mix, Index s, double kappa,
                                      double w_min, double gamma);

/// ||A^t||_F <= (sqrt(n) kappa)^{t/s}.
bool power_norm_check(const LdsParams& params, Index s, double kappa, Index t);

/// Random system with i.i.d. Gaussian B, C, D and A rescaled to the given
/// spectral radius. No conditioning guarantees; callers filter.
LdsParams random_lds(Index m, Index n, Index p, double spectral_radius, Engine& eng);

}  // namespace ldslab

#endif  // LDSLAB_LDS_HPP
