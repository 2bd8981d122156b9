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

#include "ldslab/moments.hpp"

#include <cmath>
#include <string>

#include "ldslab/error.hpp"
#include "ldslab/parallel.hpp"

namespace ldslab {

namespace {

// Kahan-compensated running sums over one shard of trajectories.
struct CompensatedSum {
    std::vector<double> sum;
    std::vector<double> comp;

    explicit CompensatedSum(std::size_t n) : sum(n, 0.0), comp(n, 0.0) {}

    void add(const double* x) {
        const std::size_t n = sum.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double y = x[i] - comp[i];
            const double t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
    }
    void add_squares(const double* x) {
        const std::size_t n = sum.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double y = x[i] * x[i] - comp[i];
            const double t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
    }
    std::vector<double> value() const {
        std::vector<double> out(sum.size());
        for (std::size_t i = 0; i < sum.size(); ++i) out[i] = sum[i] - comp[i];
        return out;
    }
};

// Pairwise reduction of shard totals in fixed order.
std::vector<double> pairwise_total(const std::vector<std::vector<double>>& parts, std::size_t lo,
                                   std::size_t hi) {
    if (hi - lo == 1) return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<double> left = pairwise_total(parts, lo, mid);
    const std::vector<double> right = pairwise_total(parts, mid, hi);
    for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
    return left;
}

struct MeanResult {
    std::vector<double> mean;
    std::vector<double> std_error;  // empty unless requested
};

// Mean over trajectories of the `dim` values produced by fill(traj, out).
template <class Fill>
MeanResult sharded_mean(const Dataset& data, std::size_t dim, bool with_std_error, Fill fill) {
    const std::size_t n = data.size();
    const std::size_t shards = shard_count(n);
    std::vector<std::vector<double>> sums(shards), squares(shards);
    parallel_for(shards, [&](std::size_t shard) {
        CompensatedSum acc(dim);
        CompensatedSum acc_sq(with_std_error ? dim : 0);
        std::vector<double> scratch(dim);
        const std::size_t end = std::min(n, (shard + 1) * kShardSize);
        for (std::size_t i = shard * kShardSize; i < end; ++i) {
            fill(data[i], scratch.data());
            acc.add(scratch.data());
            if (with_std_error) acc_sq.add_squares(scratch.data());
        }
        sums[shard] = acc.value();
        if (with_std_error) squares[shard] = acc_sq.value();
    });

    MeanResult out;
    out.mean = pairwise_total(sums, 0, shards);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& v : out.mean) v *= inv_n;
    if (with_std_error) {
        const std::vector<double> sq = pairwise_total(squares, 0, shards);
        out.std_error.resize(dim, 0.0);
        if (n > 1) {
            const double nn = static_cast<double>(n);
            for (std::size_t i = 0; i < dim; ++i) {
                const double var = std::max(0.0, (sq[i] - nn * out.mean[i] * out.mean[i]) / (nn - 1.0));
                out.std_error[i] = std::sqrt(var / nn);
            }
        }
    }
    return out;
}

void check_dataset(const Dataset& data, std::size_t min_length, const char* who) {
    if (data.empty()) throw_data(std::string(who) + ": empty dataset");
    const Index m = data.front().y.empty() ? 0 : data.front().y.front().size();
    const Index p = data.front().u.empty() ? 0 : data.front().u.front().size();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Trajectory& tr = data[i];
        if (tr.length() < min_length || tr.y.size() < min_length)
            throw_data(std::string(who) + ": trajectory " + std::to_string(i) + " has length " +
                       std::to_string(tr.length()) + ", need at least " +
                       std::to_string(min_length));
        if (tr.u.front().size() != p || tr.y.front().size() != m)
            throw_data(std::string(who) + ": trajectory " + std::to_string(i) +
                       " has inconsistent dimensions");
    }
}

// out[row*p + col] = y(row) * u(col)
inline void pair_product(const VectorXd& y, const VectorXd& u, double* out) {
    const Index p = u.size();
    for (Index r = 0; r < y.size(); ++r)
        for (Index c = 0; c < p; ++c) out[r * p + c] = y(r) * u(c);
}

VectorXd row_major_vec(const MatrixXd& x) {
    VectorXd v(x.size());
    for (Index r = 0; r < x.rows(); ++r)
        for (Index c = 0; c < x.cols(); ++c) v(r * x.cols() + c) = x(r, c);
    return v;
}

Block6 make_block(Index m, Index p, std::vector<double> data) {
    Block6 b;
    b.m = m;
    b.p = p;
    b.data = std::move(data);
    return b;
}

}  // namespace

MarkovMatrix CrossCovarianceStack::assembled() const {
    require(!blocks.empty(), "cross-covariance stack is empty");
    MarkovMatrix g;
    g.p = blocks.front().cols();
    g.data.resize(blocks.front().rows(), g.p * static_cast<Index>(blocks.size()));
    for (std::size_t j = 0; j < blocks.size(); ++j)
        g.data.middleCols(static_cast<Index>(j) * g.p, g.p) = blocks[j];
    return g;
}

MatrixXd estimate_cross_covariance(const Dataset& data, Index k1) {
    require(k1 >= 0, "estimate_cross_covariance: k1 must be nonnegative");
    check_dataset(data, static_cast<std::size_t>(k1 + 1), "estimate_cross_covariance");
    const Index m = data.front().y.front().size();
    const Index p = data.front().u.front().size();
    const MeanResult r = sharded_mean(data, static_cast<std::size_t>(m * p), false,
                                      [k1](const Trajectory& tr, double* out) {
                                          pair_product(tr.y[k1], tr.u[0], out);
                                      });
    MatrixXd out(m, p);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < p; ++j) out(i, j) = r.mean[static_cast<std::size_t>(i * p + j)];
    return out;
}

MatrixXd exact_cross_covariance(const MixtureSpec& mix, Index k1) {
    mix.validate();
    MatrixXd out = MatrixXd::Zero(mix.m(), mix.p());
    for (std::size_t i = 0; i < mix.k(); ++i)
        out += mix.weights[i] * markov_parameter(mix.components[i], k1);
    return out;
}

CrossCovarianceStack estimate_cross_covariance_stack(const Dataset& data, Index s) {
    CrossCovarianceStack st;
    for (Index k = 0; k <= 2 * s; ++k) st.blocks.push_back(estimate_cross_covariance(data, k));
    return st;
}

CrossCovarianceStack exact_cross_covariance_stack(const MixtureSpec& mix, Index s) {
    CrossCovarianceStack st;
    for (Index k = 0; k <= 2 * s; ++k) st.blocks.push_back(exact_cross_covariance(mix, k));
    return st;
}

Block6 estimate_sixth_moment_block(const Dataset& data, Index k1, Index k2, Index k3) {
    require(k1 >= 0 && k2 >= 0 && k3 >= 0, "sixth moment indices must be nonnegative");
    check_dataset(data, static_cast<std::size_t>(k1 + k2 + k3 + 3), "estimate_sixth_moment_block");
    const Index m = data.front().y.front().size();
    const Index p = data.front().u.front().size();
    const Index q = m * p;
    const MeanResult r =
        sharded_mean(data, static_cast<std::size_t>(q * q * q), false,
                     [=](const Trajectory& tr, double* out) {
                         std::vector<double> p1(q), p2(q), p3(q);
                         pair_product(tr.y[k1], tr.u[0], p1.data());
                         pair_product(tr.y[k1 + k2 + 1], tr.u[k1 + 1], p2.data());
                         pair_product(tr.y[k1 + k2 + k3 + 2], tr.u[k1 + k2 + 2], p3.data());
                         std::size_t idx = 0;
                         for (Index a3 = 0; a3 < q; ++a3)
                             for (Index a2 = 0; a2 < q; ++a2)
                                 for (Index a1 = 0; a1 < q; ++a1) out[idx++] = p3[a3] * p2[a2] * p1[a1];
                     });
    return make_block(m, p, r.mean);
}

Block6 exact_sixth_moment_block(const MixtureSpec& mix, Index k1, Index k2, Index k3) {
    mix.validate();
    const Index q = mix.m() * mix.p();
    std::vector<double> out(static_cast<std::size_t>(q * q * q), 0.0);
    for (std::size_t i = 0; i < mix.k(); ++i) {
        const LdsParams& l = mix.components[i];
        const VectorXd x3 = row_major_vec(markov_parameter(l, k3));
        const VectorXd x2 = row_major_vec(markov_parameter(l, k2));
        const VectorXd x1 = row_major_vec(markov_parameter(l, k1));
        std::size_t idx = 0;
        for (Index a3 = 0; a3 < q; ++a3)
            for (Index a2 = 0; a2 < q; ++a2)
                for (Index a1 = 0; a1 < q; ++a1)
                    out[idx++] += mix.weights[i] * x3(a3) * x2(a2) * x1(a1);
    }
    return make_block(mix.m(), mix.p(), std::move(out));
}

MomentTensor6 estimate_sixth_moments(const Dataset& data, Index s, MomentOptions opts) {
    require(s >= 0, "estimate_sixth_moments: s must be nonnegative");
    check_dataset(data, min_trajectory_length(s), "estimate_sixth_moments");
    const Index m = data.front().y.front().size();
    const Index p = data.front().u.front().size();
    const Index q = m * p;
    const Index g = 2 * s + 1;
    const std::size_t block_size = static_cast<std::size_t>(q * q * q);
    const std::size_t total = static_cast<std::size_t>(g * g * g) * block_size;

    const MeanResult r = sharded_mean(
        data, total, opts.with_std_error, [=](const Trajectory& tr, double* out) {
            std::vector<double> p1(static_cast<std::size_t>(q)), p2(p1.size()), p3(p1.size());
            std::size_t idx = 0;
            for (Index k1 = 0; k1 < g; ++k1) {
                pair_product(tr.y[k1], tr.u[0], p1.data());
                for (Index k2 = 0; k2 < g; ++k2) {
                    pair_product(tr.y[k1 + k2 + 1], tr.u[k1 + 1], p2.data());
                    for (Index k3 = 0; k3 < g; ++k3) {
                        pair_product(tr.y[k1 + k2 + k3 + 2], tr.u[k1 + k2 + 2], p3.data());
                        for (Index a3 = 0; a3 < q; ++a3)
                            for (Index a2 = 0; a2 < q; ++a2) {
                                const double f = p3[a3] * p2[a2];
                                for (Index a1 = 0; a1 < q; ++a1) out[idx++] = f * p1[a1];
                            }
                    }
                }
            }
        });

    MomentTensor6 mt;
    mt.s = s;
    mt.m = m;
    mt.p = p;
    mt.samples = data.size();
    mt.blocks.reserve(static_cast<std::size_t>(g * g * g));
    for (std::size_t b = 0; b < static_cast<std::size_t>(g * g * g); ++b) {
        const auto first = r.mean.begin() + static_cast<std::ptrdiff_t>(b * block_size);
        mt.blocks.push_back(make_block(m, p, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(block_size))));
        if (opts.with_std_error) {
            const auto sf = r.std_error.begin() + static_cast<std::ptrdiff_t>(b * block_size);
            mt.std_errors.push_back(make_block(m, p, std::vector<double>(sf, sf + static_cast<std::ptrdiff_t>(block_size))));
        }
    }
    return mt;
}

MomentTensor6 exact_sixth_moments(const MixtureSpec& mix, Index s) {
    require(s >= 0, "exact_sixth_moments: s must be nonnegative");
    MomentTensor6 mt;
    mt.s = s;
    mt.m = mix.m();
    mt.p = mix.p();
    const Index g = 2 * s + 1;
    for (Index k1 = 0; k1 < g; ++k1)
        for (Index k2 = 0; k2 < g; ++k2)
            for (Index k3 = 0; k3 < g; ++k3) mt.blocks.push_back(exact_sixth_moment_block(mix, k1, k2, k3));
    return mt;
}

FlatTensor3 assemble_pi(const MomentTensor6& moments) {
    const Index g = moments.grid();
    const Index q = moments.m * moments.p;
    if (moments.blocks.size() != static_cast<std::size_t>(g * g * g))
        throw_data("assemble_pi: expected " + std::to_string(g * g * g) + " blocks, got " +
                   std::to_string(moments.blocks.size()));
    FlatTensor3 out;
    out.s = moments.s;
    out.m = moments.m;
    out.p = moments.p;
    out.tensor = Tensor3(g * q);
    for (Index k1 = 0; k1 < g; ++k1)
        for (Index k2 = 0; k2 < g; ++k2)
            for (Index k3 = 0; k3 < g; ++k3) {
                const Block6& b = moments.block(k1, k2, k3);
                if (b.data.size() != static_cast<std::size_t>(q * q * q))
                    throw_data("assemble_pi: block (" + std::to_string(k1) + "," +
                               std::to_string(k2) + "," + std::to_string(k3) + ") is missing");
                for (Index a3 = 0; a3 < q; ++a3)
                    for (Index a2 = 0; a2 < q; ++a2)
                        for (Index a1 = 0; a1 < q; ++a1)
                            out.tensor(k3 * q + a3, k2 * q + a2, k1 * q + a1) = b.at(a3, a2, a1);
            }
    return out;
}

VectorXd flatten_markov(const MarkovMatrix& g) {
    const Index m = g.m();
    const Index p = g.p;
    const Index blocks = g.blocks();
    VectorXd v(m * p * blocks);
    for (Index j = 0; j < blocks; ++j)
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < p; ++c) v(j * m * p + r * p + c) = g.data(r, j * p + c);
    return v;
}

MarkovMatrix unflatten_markov(const VectorXd& v, Index m, Index p) {
    require(m >= 1 && p >= 1 && v.size() % (m * p) == 0,
            "unflatten_markov: length must be a multiple of m*p");
    const Index blocks = v.size() / (m * p);
    MarkovMatrix g;
    g.p = p;
    g.data.resize(m, blocks * p);
    for (Index j = 0; j < blocks; ++j)
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < p; ++c) g.data(r, j * p + c) = v(j * m * p + r * p + c);
    return g;
}

}  // namespace ldslab
