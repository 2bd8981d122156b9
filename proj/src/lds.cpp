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

#include "ldslab/lds.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ldslab/error.hpp"
#include "ldslab/parallel.hpp"

namespace ldslab {

namespace {

std::string shape(const MatrixXd& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void check_finite(const MatrixXd& m, const char* name) {
    if (!m.allFinite()) throw_usage(std::string("matrix ") + name + " has non-finite entries");
}

// Uniform on [0, 1) from the top 53 bits; avoids the implementation-defined
// std::uniform_real_distribution so labels are portable.
double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

void LdsParams::validate() const {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw_usage("matrix A must be square and non-empty, got " + shape(a));
    if (b.rows() != a.rows() || b.cols() == 0)
        throw_usage("matrix B must have n=" + std::to_string(a.rows()) + " rows, got " + shape(b));
    if (c.cols() != a.rows() || c.rows() == 0)
        throw_usage("matrix C must have n=" + std::to_string(a.rows()) + " columns, got " +
                    shape(c));
    if (d.rows() != c.rows() || d.cols() != b.cols())
        throw_usage("matrix D must be " + std::to_string(c.rows()) + "x" +
                    std::to_string(b.cols()) + ", got " + shape(d));
    check_finite(a, "A");
    check_finite(b, "B");
    check_finite(c, "C");
    check_finite(d, "D");
}

void MixtureSpec::validate() const {
    if (components.empty()) throw_usage("mixture needs at least one component");
    if (weights.size() != components.size())
        throw_usage("mixture has " + std::to_string(components.size()) + " components but " +
                    std::to_string(weights.size()) + " weights");
    for (std::size_t i = 0; i < components.size(); ++i) {
        components[i].validate();
        if (components[i].m() != m() || components[i].n() != n() || components[i].p() != p())
            throw_usage("component " + std::to_string(i) + " dimensions differ from component 0");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw_usage("mixing weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw_usage("mixing weights must sum to 1");
}

void Trajectory::validate() const {
    if (u.empty()) throw_data("trajectory is empty");
    if (u.size() != y.size()) throw_data("trajectory u and y lengths differ");
    for (std::size_t t = 0; t < u.size(); ++t) {
        if (!u[t].allFinite() || !y[t].allFinite())
            throw_data("trajectory has non-finite entry at t=" + std::to_string(t));
    }
}

NoiseDraws draw_noise(Index n, Index m, Index p, std::size_t length, double noise_scale,
                      Engine& eng) {
    require(noise_scale >= 0.0, "noise_scale must be nonnegative");
    NoiseDraws d;
    d.x0 = noise_scale * standard_normal(eng, n);
    d.u.reserve(length);
    d.w.reserve(length);
    d.z.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
        d.u.push_back(standard_normal(eng, p));
        d.w.push_back(noise_scale * standard_normal(eng, n));
        d.z.push_back(noise_scale * standard_normal(eng, m));
    }
    return d;
}

Trajectory simulate_with_draws(const LdsParams& params, const NoiseDraws& draws) {
    params.validate();
    const std::size_t len = draws.u.size();
    require(len >= 1, "trajectory length must be at least 1");
    require(draws.w.size() >= len && draws.z.size() >= len, "noise draws shorter than inputs");
    require(draws.x0.size() == params.n(), "x0 has wrong dimension");

    Trajectory traj;
    traj.u = draws.u;
    traj.y.reserve(len);
    VectorXd x = draws.x0;
    for (std::size_t t = 0; t < len; ++t) {
        require(draws.u[t].size() == params.p(), "input has wrong dimension");
        traj.y.push_back(params.c * x + params.d * draws.u[t] + draws.z[t]);
        x = params.a * x + params.b * draws.u[t] + draws.w[t];
    }
    return traj;
}

Trajectory simulate_trajectory(const LdsParams& params, std::size_t length, double noise_scale,
                               Engine& eng) {
    params.validate();
    require(length >= 1, "trajectory length must be at least 1");
    return simulate_with_draws(
        params, draw_noise(params.n(), params.m(), params.p(), length, noise_scale, eng));
}

VectorXd closed_form_observation(const LdsParams& params, std::size_t t, const NoiseDraws& draws) {
    params.validate();
    if (t >= draws.u.size() || t >= draws.z.size() || (t > 0 && t - 1 >= draws.w.size()))
        throw_usage("closed_form_observation: index " + std::to_string(t) + " out of range");

    VectorXd y = params.d * draws.u[t] + draws.z[t];
    MatrixXd ca = params.c;  // C A^{i-1}
    for (std::size_t i = 1; i <= t; ++i) {
        y += ca * (params.b * draws.u[t - i] + draws.w[t - i]);
        ca = ca * params.a;
    }
    y += ca * draws.x0;  // ca == C A^t here
    return y;
}

Dataset sample_mixture_dataset(const MixtureSpec& mix, std::size_t n_traj, std::size_t length,
                               const NoiseConfig& noise) {
    mix.validate();
    require(n_traj >= 1, "n_traj must be positive");
    require(length >= 1, "trajectory length must be positive");
    require(noise.noise_scale >= 0.0, "noise_scale must be nonnegative");

    std::vector<double> cumulative(mix.k());
    std::partial_sum(mix.weights.begin(), mix.weights.end(), cumulative.begin());

    Dataset out(n_traj);
    parallel_for(shard_count(n_traj), [&](std::size_t shard) {
        const std::size_t begin = shard * kShardSize;
        const std::size_t end = std::min(n_traj, begin + kShardSize);
        for (std::size_t i = begin; i < end; ++i) {
            Engine eng = substream(noise.seed, i);
            const double r = uniform01(eng) * cumulative.back();
            std::size_t label = 0;
            while (label + 1 < mix.k() && r >= cumulative[label]) ++label;
            out[i] = simulate_trajectory(mix.components[label], length, noise.noise_scale, eng);
            out[i].label = static_cast<int>(label);
        }
    });
    return out;
}

MatrixXd observability_matrix(const LdsParams& params, Index s) {
    require(s >= 1, "observability_matrix: s must be positive");
    const Index m = params.m();
    MatrixXd o(s * m, params.n());
    MatrixXd block = params.c;
    for (Index i = 0; i < s; ++i) {
        o.middleRows(i * m, m) = block;
        block = block * params.a;
    }
    return o;
}

MatrixXd controllability_matrix(const LdsParams& params, Index s) {
    require(s >= 1, "controllability_matrix: s must be positive");
    const Index p = params.p();
    MatrixXd q(params.n(), s * p);
    MatrixXd block = params.b;
    for (Index j = 0; j < s; ++j) {
        q.middleCols(j * p, p) = block;
        block = params.a * block;
    }
    return q;
}

MatrixXd markov_parameter(const LdsParams& params, Index j) {
    require(j >= 0, "markov_parameter: index must be nonnegative");
    if (j == 0) return params.d;
    MatrixXd ab = params.b;
    for (Index i = 1; i < j; ++i) ab = params.a * ab;
    return params.c * ab;
}

MarkovMatrix markov_matrix(const LdsParams& params, Index horizon) {
    require(horizon >= 0, "markov_matrix: horizon must be nonnegative");
    const Index p = params.p();
    MarkovMatrix g;
    g.p = p;
    g.data.resize(params.m(), (horizon + 1) * p);
    g.data.leftCols(p) = params.d;
    MatrixXd ab = params.b;
    for (Index j = 1; j <= horizon; ++j) {
        g.data.middleCols(j * p, p) = params.c * ab;
        ab = params.a * ab;
    }
    return g;
}

double joint_nondegeneracy_gamma(const MixtureSpec& mix, Index s) {
    require(!mix.components.empty(), "joint_nondegeneracy_gamma: empty mixture");
    require(s >= 1, "joint_nondegeneracy_gamma: s must be positive");
    const Index len = mix.m() * (s + 1) * mix.p();
    const Index k = static_cast<Index>(mix.k());
    if (k > len) return 0.0;
    MatrixXd cols(len, k);
    for (Index i = 0; i < k; ++i) {
        const MatrixXd g = markov_matrix(mix.components[i], s).data;
        // Any fixed bijection works here: singular values ignore the order.
        cols.col(i) = Eigen::Map<const VectorXd>(g.data(), g.size());
    }
    return smallest_singular_value(cols);
}

WellBehavedReport well_behaved_report(const MixtureSpec& mix, Index s, double kappa,
                                      double w_min, double gamma) {
    mix.validate();
    require(s >= 1, "well_behaved_report: s must be positive");

    WellBehavedReport rep;
    rep.s = s;
    rep.kappa_bound = kappa;
    rep.w_min = w_min;
    rep.gamma_required = gamma;
    rep.gamma = joint_nondegeneracy_gamma(mix, s);
    rep.joint_nondegeneracy_pass = rep.gamma >= gamma;
    rep.weights_pass = rep.nontrivial_pass = rep.bounded_pass = true;
    rep.observability_pass = rep.controllability_pass = true;

    const Index n = mix.n();
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mix.k(); ++i) {
        const LdsParams& l = mix.components[i];
        ComponentDiagnostics d;
        d.weight_ok = mix.weights[i] >= w_min;
        d.norm_a = spectral_norm(l.a);
        d.norm_b = spectral_norm(l.b);
        d.norm_c = spectral_norm(l.c);
        d.norm_d = spectral_norm(l.d);
        d.nontrivial_ok = d.norm_b >= 1.0 && d.norm_c >= 1.0;
        d.bounded_ok =
            d.norm_a <= kappa && d.norm_b <= kappa && d.norm_c <= kappa && d.norm_d <= kappa;

        const MatrixXd os = observability_matrix(l, s);
        const MatrixXd qs = controllability_matrix(l, s);
        d.obs_rank = numerical_rank(os, kRankRelTol);
        d.ctrl_rank = numerical_rank(qs, kRankRelTol);
        d.obs_sigma_min = singular_value(os, n);
        d.ctrl_sigma_min = singular_value(qs, n);
        d.obs_ratio = d.obs_sigma_min > 0.0
                          ? spectral_norm(observability_matrix(l, 2 * s)) / d.obs_sigma_min
                          : inf;
        d.ctrl_ratio = d.ctrl_sigma_min > 0.0
                           ? spectral_norm(controllability_matrix(l, 2 * s)) / d.ctrl_sigma_min
                           : inf;
        d.obs_ok = d.obs_rank == n && d.obs_ratio <= kappa;
        d.ctrl_ok = d.ctrl_rank == n && d.ctrl_ratio <= kappa;
        const double claim_bound = std::sqrt(static_cast<double>(s)) * kappa;
        d.sigma_min_claim_ok = d.obs_sigma_min <= claim_bound && d.ctrl_sigma_min <= claim_bound;

        rep.weights_pass = rep.weights_pass && d.weight_ok;
        rep.nontrivial_pass = rep.nontrivial_pass && d.nontrivial_ok;
        rep.bounded_pass = rep.bounded_pass && d.bounded_ok;
        rep.observability_pass = rep.observability_pass && d.obs_ok;
        rep.controllability_pass = rep.controllability_pass && d.ctrl_ok;
        rep.components.push_back(d);
    }
    return rep;
}

bool power_norm_check(const LdsParams& params, Index s, double kappa, Index t) {
    require(s >= 1 && t >= 1, "power_norm_check: s and t must be positive");
    MatrixXd power = MatrixXd::Identity(params.n(), params.n());
    for (Index i = 0; i < t; ++i) power = power * params.a;
    const double bound = std::pow(std::sqrt(static_cast<double>(params.n())) * kappa,
                                  static_cast<double>(t) / static_cast<double>(s));
    return power.norm() <= bound;
}

LdsParams random_lds(Index m, Index n, Index p, double spectral_radius, Engine& eng) {
    require(m >= 1 && n >= 1 && p >= 1, "random_lds: dimensions must be positive");
    auto gaussian = [&](Index r, Index c) {
        MatrixXd out(r, c);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) out(i, j) = nd(eng);
        return out;
    };
    LdsParams l;
    l.a = gaussian(n, n);
    const double rho = l.a.eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 0.0) l.a *= spectral_radius / rho;
    l.b = gaussian(n, p);
    l.c = gaussian(m, n);
    l.d = gaussian(m, p);
    return l;
}

}  // namespace ldslab
