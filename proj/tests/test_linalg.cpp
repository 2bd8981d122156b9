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

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>

#include "ldslab/error.hpp"
#include "ldslab/linalg.hpp"
#include "ldslab/parallel.hpp"
#include "ldslab/rng.hpp"

namespace ldslab {
namespace {

MatrixXd gaussian(Index r, Index c, std::uint64_t seed) {
    Engine eng = substream(seed, 0);
    MatrixXd a(r, c);
    for (Index j = 0; j < c; ++j) a.col(j) = standard_normal(eng, r);
    return a;
}

TEST(Svd, ReconstructsWithSignConvention) {
    const MatrixXd a = gaussian(5, 3, 1);
    const Svd svd = thin_svd(a);
    EXPECT_TRUE((svd.u * svd.sigma.asDiagonal() * svd.v.transpose()).isApprox(a, 1e-12));
    for (Index j = 0; j < svd.u.cols(); ++j) {
        Index idx = 0;
        svd.u.col(j).cwiseAbs().maxCoeff(&idx);
        EXPECT_GT(svd.u(idx, j), 0.0);
    }
    for (Index j = 1; j < svd.sigma.size(); ++j) EXPECT_GE(svd.sigma(j - 1), svd.sigma(j));
}

TEST(Svd, SignInvariantUnderInputNegationOfColumnSpace) {
    const MatrixXd a = gaussian(4, 4, 2);
    const Svd s1 = thin_svd(a);
    const Svd s2 = thin_svd(-a);
    EXPECT_TRUE(s1.u.isApprox(s2.u, 1e-10));
    EXPECT_TRUE(s1.v.isApprox(-s2.v, 1e-10));
}

TEST(Pinv, MoorePenroseConditions) {
    MatrixXd a = gaussian(6, 3, 3) * gaussian(3, 5, 4);  // rank 3
    const MatrixXd ap = pinv(a);
    EXPECT_TRUE((a * ap * a).isApprox(a, 1e-10));
    EXPECT_TRUE((ap * a * ap).isApprox(ap, 1e-10));
    EXPECT_TRUE((a * ap).transpose().isApprox(a * ap, 1e-10));
    EXPECT_TRUE((ap * a).transpose().isApprox(ap * a, 1e-10));
}

TEST(Rank, TruncationAndNumericalRank) {
    const MatrixXd a = gaussian(6, 2, 5) * gaussian(2, 6, 6);
    EXPECT_EQ(numerical_rank(a, 1e-10), 2);
    const MatrixXd b = gaussian(6, 6, 7);
    const MatrixXd t = truncate_rank(b, 3);
    EXPECT_EQ(numerical_rank(t, 1e-10), 3);
    EXPECT_NEAR((b - t).norm(),
                std::sqrt(thin_svd(b).sigma.tail(3).squaredNorm()), 1e-10);
    EXPECT_NEAR(singular_value(b, 1), spectral_norm(b), 1e-14);
    EXPECT_EQ(singular_value(b, 7), 0.0);
    EXPECT_NEAR(smallest_singular_value(b), thin_svd(b).sigma(5), 1e-14);
}

TEST(Assignment, MatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Index k = 1 + static_cast<Index>(seed % 6);
        const MatrixXd cost = gaussian(k, k, 100 + seed).cwiseAbs();
        const std::vector<int> got = min_cost_assignment(cost);
        double got_cost = 0.0;
        for (Index i = 0; i < k; ++i) got_cost += cost(i, got[static_cast<std::size_t>(i)]);
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double c = 0.0;
            for (Index i = 0; i < k; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_NEAR(got_cost, best, 1e-12);
    }
}

TEST(Rng, SubstreamsAreReproducibleAndDistinct) {
    Engine a = substream(1, 2), b = substream(1, 2), c = substream(1, 3), d = substream(2, 2);
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
    Engine e = substream(0, 0);
    EXPECT_NEAR(random_unit_vector(e, 7).norm(), 1.0, 1e-15);
}

TEST(Parallel, VisitsEveryIndexOnceAndPropagatesErrors) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10,
                              [](std::size_t i) {
                                  if (i == 7) throw_numerical("boom");
                              }),
                 Error);
    EXPECT_EQ(shard_count(0), 0u);
    EXPECT_EQ(shard_count(kShardSize), 1u);
    EXPECT_EQ(shard_count(kShardSize + 1), 2u);
}

TEST(Parallel, ThreadCapFromEnvironment) {
    ::setenv("LDSLAB_THREADS", "3", 1);
    EXPECT_EQ(worker_threads(), 3u);
    ::setenv("LDSLAB_THREADS", "garbage", 1);
    EXPECT_GE(worker_threads(), 1u);
    ::unsetenv("LDSLAB_THREADS");
}

TEST(Errors, CodesAndNames) {
    try {
        throw_numerical("x");
    } catch (const Error& e) {
        EXPECT_EQ(e.exit_code(), 4);
        EXPECT_EQ(error_code_name(e.code()), "numerical");
    }
    EXPECT_EQ(error_code_name(ErrorCode::kUsage), "usage");
    EXPECT_EQ(error_code_name(ErrorCode::kData), "data");
    EXPECT_THROW(require(false, "nope"), Error);
}

}  // namespace
}  // namespace ldslab
