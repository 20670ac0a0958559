// SPDX-License-Identifier: Apache-2.0
//
// cfmc - subgroup-centric multicast simulator for cell-free massive MIMO
// Copyright (C) 2026 The cfmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <map>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "cfmc/error.hpp"
#include "cfmc/geometry.hpp"
#include "cfmc/grouping.hpp"

namespace cfmc {
namespace {

RMatrix random_beta(std::size_t L, std::size_t K, std::uint64_t seed)
{
    const AreaSpec area;
    const auto ap = place_aps(area, L, seed);
    const auto ms = place_ms_uniform(area, K, seed + 1);
    const auto f = sample_shadowing(ms, L, 4.0, 9.0, area.side, seed + 2);
    return large_scale_matrix(area, ap, ms, f);
}

// True when a and b describe the same partition up to relabeling.
bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b)
{
    std::map<std::size_t, std::size_t> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (auto [it, fresh] = ab.emplace(a[i], b[i]); !fresh && it->second != b[i])
            return false;
        if (auto [it, fresh] = ba.emplace(b[i], a[i]); !fresh && it->second != a[i])
            return false;
    }
    return true;
}

TEST(Grouping, FromLabelsCanonicalizes)
{
    const auto g = GroupAssignment::from_labels({5, 5, 2, 9, 2});
    EXPECT_EQ(g.group_of, (std::vector<std::size_t>{0, 0, 1, 2, 1}));
    ASSERT_EQ(g.num_groups(), 3u);
    EXPECT_EQ(g.members[1], (IndexSet{2, 4}));
    EXPECT_NO_THROW(g.validate());
}

TEST(Grouping, ValidateRejectsBrokenPartitions)
{
    GroupAssignment g;
    g.group_of = {0, 1};
    g.members = {{0}, {}};
    EXPECT_THROW(g.validate(), InvalidInput);
    g.members = {{0, 1}, {1}};
    EXPECT_THROW(g.validate(), InvalidInput);
}

TEST(Grouping, DegenerateGroupCounts)
{
    const auto beta = random_beta(10, 12, 1);
    const auto one = kmeans_subgroups(beta, 1, {}, 3);
    ASSERT_EQ(one.num_groups(), 1u);
    EXPECT_EQ(one.size(0), 12u);
    const auto all = kmeans_subgroups(beta, 12, {}, 3);
    ASSERT_EQ(all.num_groups(), 12u);
    for (std::size_t g = 0; g < 12; ++g)
        EXPECT_EQ(all.size(g), 1u);
    EXPECT_THROW(kmeans_subgroups(beta, 13, {}, 3), InvalidConfig);
    EXPECT_THROW(kmeans_subgroups(beta, 0, {}, 3), InvalidConfig);
}

TEST(Grouping, MakePlanModes)
{
    const auto beta = random_beta(20, 500, 2);
    const auto single = make_plan(TransmissionMode::single, 1, beta, {}, 1);
    ASSERT_EQ(single.num_groups(), 1u);
    EXPECT_EQ(single.size(0), 500u);
    const auto uni = make_plan(TransmissionMode::unicast, 500, beta.leftCols(100), {}, 1);
    EXPECT_EQ(uni.num_groups(), 100u);
    for (std::size_t g = 0; g < 100; ++g)
        EXPECT_EQ(uni.members[g], IndexSet{g});
    const auto sub = make_plan(TransmissionMode::subgroup, 30, beta, {100, 2}, 1);
    EXPECT_EQ(sub.num_groups(), 30u);
    EXPECT_NO_THROW(sub.validate());
}

TEST(Grouping, ModeParsing)
{
    EXPECT_EQ(parse_transmission_mode("subgroup"), TransmissionMode::subgroup);
    EXPECT_EQ(to_string(TransmissionMode::single), "single");
    EXPECT_THROW(parse_transmission_mode("broadcast"), InvalidConfig);
}

TEST(Grouping, LloydStepsKeepPartitionAndDecreaseObjective)
{
    const auto beta = random_beta(15, 60, 4);
    std::map<std::size_t, double> last;
    std::size_t steps = 0;
    kmeans_subgroups(beta, 6, {100, 4}, 9, [&](const LloydStep& s) {
        ++steps;
        std::vector<int> count(6, 0);
        for (std::size_t lab : s.labels) {
            ASSERT_LT(lab, 6u);
            ++count[lab];
        }
        for (int c : count)
            EXPECT_GT(c, 0);
        if (auto it = last.find(s.restart); it != last.end()) {
            EXPECT_LE(s.objective, it->second * (1.0 + 1e-12));
        }
        last[s.restart] = s.objective;
    });
    EXPECT_GT(steps, 0u);
}

TEST(Grouping, Deterministic)
{
    const auto beta = random_beta(15, 60, 5);
    EXPECT_EQ(kmeans_subgroups(beta, 7, {}, 11).group_of, kmeans_subgroups(beta, 7, {}, 11).group_of);
}

TEST(Grouping, PermutationEquivariance)
{
    // Four tight clusters far apart: the optimum is the ground-truth split.
    const AreaSpec area;
    const auto ap = place_aps(area, 36, 71);
    const auto cl = place_ms_clustered(area, 4, 10, 10.0, 72);
    const auto f = sample_shadowing(cl.positions, 36, 4.0, 9.0, area.side, 73);
    const RMatrix beta = large_scale_matrix(area, ap, cl.positions, f);
    const std::size_t K = cl.labels.size();
    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(perm.begin(), perm.end(), rng);
    RMatrix permuted(beta.rows(), beta.cols());
    for (std::size_t k = 0; k < K; ++k)
        permuted.col(static_cast<Eigen::Index>(k)) = beta.col(static_cast<Eigen::Index>(perm[k]));
    const auto a = kmeans_subgroups(beta, 4, {}, 3);
    const auto b = kmeans_subgroups(permuted, 4, {}, 3);
    std::vector<std::size_t> a_perm(K);
    for (std::size_t k = 0; k < K; ++k)
        a_perm[k] = a.group_of[perm[k]];
    EXPECT_TRUE(same_partition(a_perm, b.group_of));
    EXPECT_TRUE(same_partition(a.group_of, cl.labels));
}

TEST(Grouping, RecoversSpatialClusters)
{
    const AreaSpec area;
    int recovered = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto ap = place_aps(area, 100, 1000 + s);
        const auto cl = place_ms_clustered(area, 10, 50, 10.0, 2000 + s);
        const auto f = sample_shadowing(cl.positions, 100, 4.0, 9.0, area.side, 3000 + s);
        const auto beta = large_scale_matrix(area, ap, cl.positions, f);
        const auto g = kmeans_subgroups(beta, 10, {}, 4000 + s);
        recovered += same_partition(g.group_of, cl.labels) ? 1 : 0;
    }
    EXPECT_GE(recovered, 19) << recovered << "/" << seeds;
}

}  // namespace
}  // namespace cfmc
