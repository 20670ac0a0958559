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

#include <gtest/gtest.h>

#include "cfmc/error.hpp"
#include "cfmc/evaluation.hpp"
#include "cfmc/rng.hpp"
#include "oracles.hpp"

namespace cfmc {
namespace {

PilotPlan full_plan(std::size_t L, std::size_t G)
{
    PilotPlan p;
    p.tau_p = G;
    p.pilot_of.resize(G);
    p.serving_aps.assign(G, {});
    p.served_groups.assign(L, {});
    for (std::size_t g = 0; g < G; ++g) {
        p.pilot_of[g] = g;
        for (std::size_t l = 0; l < L; ++l) {
            p.serving_aps[g].push_back(l);
            p.served_groups[l].push_back(g);
        }
    }
    return p;
}

TEST(Evaluation, SeUser)
{
    EXPECT_EQ(se_user(0.0, 20, 200), 0.0);
    EXPECT_NEAR(se_user(1.0, 20, 200), 0.9, 1e-15);
    EXPECT_NEAR(se_user(3.0, 20, 200), 1.8, 1e-15);
    EXPECT_THROW(se_user(1.0, 200, 200), InvalidConfig);
    EXPECT_THROW(se_user(-1.0, 20, 200), InvalidInput);
}

TEST(Evaluation, SeGroup)
{
    const std::vector<double> se{1.0, 0.4, 2.2, 0.7};
    EXPECT_EQ(se_group(se, {3}), 0.7);
    EXPECT_EQ(se_group(se, {0, 1, 2}), 0.4);
    const std::vector<double> flat{0.5, 0.5};
    EXPECT_EQ(se_group(flat, {0, 1}), 0.5);
    EXPECT_THROW(se_group(se, {}), InvalidInput);
}

TEST(Evaluation, SumConventions)
{
    SinrTerms t;
    t.sinr.assign(10, 0.0);
    const double gamma = std::pow(2.0, 0.5 / 0.9) - 1.0;  // SE = 0.5 at prelog 0.9
    t.sinr.assign(10, gamma);
    const auto single = GroupAssignment::from_labels(std::vector<std::size_t>(10, 0));
    const auto r = build_report(t, single, 20, 200);
    EXPECT_NEAR(sum_se(r, SumConvention::per_user), 5.0, 1e-12);
    EXPECT_NEAR(sum_se(r, SumConvention::per_group), 0.5, 1e-12);
    EXPECT_NEAR(r.prelog, 0.9, 1e-15);

    std::vector<std::size_t> labels(10);
    for (std::size_t k = 0; k < 10; ++k)
        labels[k] = k;
    const auto uni = build_report(t, GroupAssignment::from_labels(labels), 20, 200);
    EXPECT_NEAR(uni.sum_se_per_user, uni.sum_se_per_group, 1e-12);

    // hand sum for a three-group plan
    SinrTerms u;
    u.sinr = {1.0, 3.0, 3.0, 7.0, 1.0, 0.0};
    const auto groups = GroupAssignment::from_labels({0, 0, 1, 1, 2, 2});
    const auto hand = build_report(u, groups, 20, 200);
    EXPECT_NEAR(hand.se_group[0], 0.9, 1e-15);
    EXPECT_NEAR(hand.se_group[1], 1.8, 1e-15);
    EXPECT_NEAR(hand.se_group[2], 0.0, 1e-15);
    EXPECT_NEAR(hand.sum_se_per_user, 2 * 0.9 + 2 * 1.8, 1e-12);
    EXPECT_NEAR(hand.sum_se_per_group, 0.9 + 1.8, 1e-12);
    for (std::size_t k = 0; k < 6; ++k)
        EXPECT_LE(hand.se_group[groups.group_of[k]], hand.se_user[k]);
    EXPECT_EQ(parse_sum_convention("per_group"), SumConvention::per_group);
    EXPECT_THROW(parse_sum_convention("total"), InvalidConfig);
}

TEST(Evaluation, DeterministicChannelNoInterference)
{
    const auto groups = GroupAssignment::from_labels({0});
    const auto plan = full_plan(1, 1);
    ChannelRealization h{1, 1, CMatrix(3, 1)};
    h.h << cplx(1, 2), cplx(0, -1), cplx(0.5, 0);
    SinrAccumulator acc(groups, plan);
    const std::vector<CVector> w{h.h.col(0) / h.h.col(0).norm()};
    for (int t = 0; t < 10; ++t)
        acc.add(h, w);
    const auto terms = acc.finalize(1.0);
    EXPECT_NEAR(terms.sinr[0], h.h.col(0).squaredNorm(), 1e-12);
}

TEST(Evaluation, ScalarCbMatchesAnalyticOracle)
{
    // One AP, one antenna, Rayleigh h with E|h|^2 = beta, perfect CSI CB:
    // gamma = rho beta / (rho beta + sigma^2).
    const double beta = 2.0, rho = 0.5, sigma2 = 1.0;
    const auto groups = GroupAssignment::from_labels({0});
    const auto plan = full_plan(1, 1);
    SinrAccumulator acc(groups, plan);
    Rng rng(99);
    ComplexNormal cn;
    const std::size_t T = 100000;
    for (std::size_t t = 0; t < T; ++t) {
        ChannelRealization h{1, 1, CMatrix(1, 1)};
        h.h(0, 0) = std::sqrt(beta) * cn(rng);
        const std::vector<CVector> w{std::sqrt(rho / beta) * h.h.col(0)};
        acc.add(h, w);
    }
    const double gamma = acc.finalize(sigma2).sinr[0];
    const double analytic = rho * beta / (rho * beta + sigma2);
    EXPECT_NEAR(gamma, analytic, 0.02 * analytic);

    // independent 10^6-sample brute force of the same expectation
    Rng rng2(7);
    cplx mean = 0.0;
    double second = 0.0;
    const std::size_t M = 1000000;
    for (std::size_t t = 0; t < M; ++t) {
        const cplx h = std::sqrt(beta) * cn(rng2);
        const cplx a = std::conj(h) * std::sqrt(rho / beta) * h;
        mean += a;
        second += std::norm(a);
    }
    mean /= double(M);
    second /= double(M);
    const double brute = std::norm(mean) / (second - std::norm(mean) + sigma2);
    EXPECT_NEAR(gamma, brute, 0.02 * brute);
}

class RandomSinrCase : public ::testing::Test {
protected:
    GroupAssignment groups = GroupAssignment::from_labels({0, 1, 1, 2});
    PilotPlan plan = full_plan(2, 3);
    std::vector<ChannelRealization> channels;
    std::vector<std::vector<CVector>> precoders;

    void SetUp() override
    {
        Rng rng(4);
        ComplexNormal cn;
        for (int t = 0; t < 200; ++t) {
            ChannelRealization h{2, 4, CMatrix(3, 8)};
            for (Eigen::Index i = 0; i < h.h.size(); ++i)
                h.h.data()[i] = cn(rng);
            std::vector<CVector> w(3);
            for (auto& v : w) {
                v.resize(6);
                for (Eigen::Index i = 0; i < 6; ++i)
                    v(i) = 0.3 * cn(rng) + 0.8 * h.h(i % 3, 0);
            }
            channels.push_back(h);
            precoders.push_back(w);
        }
    }

    SinrTerms run(double noise, std::span<const double> scale = {}) const
    {
        SinrAccumulator acc(groups, plan);
        for (std::size_t t = 0; t < channels.size(); ++t)
            acc.add(channels[t], precoders[t]);
        return acc.finalize(noise, scale);
    }
};

TEST_F(RandomSinrCase, BatchFormMatchesStreaming)
{
    ChannelBatch batch{channels};
    const auto a = sinr_terms(batch, precoders, groups, plan, 0.1);
    const auto b = run(0.1);
    EXPECT_EQ(a.sinr, b.sinr);
}

TEST_F(RandomSinrCase, MatchesDirectExpectationFormula)
{
    const auto terms = run(0.1);
    for (std::size_t k = 0; k < 4; ++k) {
        cplx mean = 0.0;
        double total = 0.0;
        for (std::size_t t = 0; t < channels.size(); ++t)
            for (std::size_t c = 0; c < 3; ++c) {
                cplx a = 0.0;
                for (std::size_t l = 0; l < 2; ++l)
                    a += channels[t].link(l, k).dot(precoders[t][c].segment(static_cast<Eigen::Index>(3 * l), 3));
                if (c == groups.group_of[k])
                    mean += a;
                total += std::norm(a);
            }
        mean /= double(channels.size());
        total /= double(channels.size());
        const double want = std::norm(mean) / (total - std::norm(mean) + 0.1);
        EXPECT_NEAR(terms.sinr[k], want, 1e-10 * want);
    }
}

TEST_F(RandomSinrCase, RotationInvariance)
{
    const auto before = run(0.1);
    // random unitary per AP from a QR factorization
    Rng rng(8);
    ComplexNormal cn;
    std::vector<CMatrix> u(2);
    for (auto& m : u) {
        CMatrix a(3, 3);
        for (Eigen::Index i = 0; i < 9; ++i)
            a.data()[i] = cn(rng);
        m = Eigen::HouseholderQR<CMatrix>(a).householderQ();
    }
    for (std::size_t t = 0; t < channels.size(); ++t) {
        for (std::size_t l = 0; l < 2; ++l) {
            for (std::size_t k = 0; k < 4; ++k)
                channels[t].h.col(static_cast<Eigen::Index>(l * 4 + k)) = u[l] * channels[t].link(l, k);
            for (auto& w : precoders[t])
                w.segment(static_cast<Eigen::Index>(3 * l), 3) = u[l] * w.segment(static_cast<Eigen::Index>(3 * l), 3);
        }
    }
    const auto after = run(0.1);
    for (std::size_t k = 0; k < 4; ++k)
        EXPECT_NEAR(after.sinr[k], before.sinr[k], 1e-10 * before.sinr[k]);
}

TEST_F(RandomSinrCase, NoiseMonotonicity)
{
    const auto low = run(0.1);
    const auto high = run(0.2);
    for (std::size_t k = 0; k < 4; ++k)
        EXPECT_LT(high.sinr[k], low.sinr[k]);
}

TEST_F(RandomSinrCase, ZeroPowerInterfererIsInvisible)
{
    const std::vector<double> scale{1.0, 1.0, 1.0};
    const std::vector<double> silenced{1.0, 1.0, 0.0};
    const auto with = run(0.1, silenced);
    // drop group 2 entirely: its member 3 is the only user that changes
    for (auto& w : precoders)
        w[2].setZero();
    const auto without = run(0.1, scale);
    for (std::size_t k = 0; k < 3; ++k)
        EXPECT_NEAR(with.sinr[k], without.sinr[k], 1e-12 * without.sinr[k]);
}

TEST_F(RandomSinrCase, ClampsNegativeInterference)
{
    // With a single realization the variance term is exactly zero and a
    // single group sees no inter-group power, so nothing is clamped; with
    // rounding noise the counter must never go negative or throw.
    const auto t = run(0.1);
    EXPECT_EQ(t.clamped, 0u);
    SinrAccumulator acc(groups, plan);
    EXPECT_THROW(acc.finalize(0.1), InvalidStats);
    EXPECT_THROW(acc.add(channels[0], std::vector<CVector>(2)), InvalidInput);
}

}  // namespace
}  // namespace cfmc
