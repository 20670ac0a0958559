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

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cfmc/covariance.hpp"
#include "cfmc/error.hpp"
#include "oracles.hpp"

namespace cfmc {
namespace {

constexpr double deg = std::numbers::pi / 180.0;

// Gaussian-angle integral at phi = 30 deg, asd = 15 deg, lags 0..3, computed
// offline by adaptive quadrature on the infinite line.
const cplx frozen_30_15[4] = {
    {1.0, 0.0},
    {0.022947834044882168, 0.7864286223450269},
    {-0.3827334404688936, -0.0372338566395536},
    {0.06898379353511755, -0.10259087270386714},
};

TEST(Covariance, NominalAngle)
{
    EXPECT_NEAR(nominal_angle({0, 0}, {10, 0}, 1000), 0.0, 1e-15);
    EXPECT_NEAR(nominal_angle({0, 0}, {0, 10}, 1000), std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(std::abs(nominal_angle({5, 5}, {995, 5}, 1000)), std::numbers::pi, 1e-12);
    EXPECT_EQ(nominal_angle({3, 3}, {3, 3}, 1000), 0.0);
}

TEST(Covariance, ScalarCase)
{
    const auto r = local_scattering_covariance(2.5e-9, 0.3, 15 * deg, 1);
    ASSERT_EQ(r.matrix.rows(), 1);
    EXPECT_NEAR(r.matrix(0, 0).real(), 2.5e-9, 1e-24);
    EXPECT_NEAR((r.factor * r.factor.adjoint() - r.matrix).norm(), 0.0, 1e-24);
}

TEST(Covariance, ZeroSpreadIsRankOne)
{
    const double phi = 0.7;
    const auto r = local_scattering_covariance(1.0, phi, 0.0, 4);
    CVector a(4);
    for (int s = 0; s < 4; ++s)
        a(s) = std::polar(1.0, std::numbers::pi * s * std::sin(phi));
    EXPECT_LT((r.matrix - a * a.adjoint()).norm(), 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r.matrix);
    EXPECT_NEAR(es.eigenvalues()(3), 4.0, 1e-12);
    EXPECT_NEAR(es.eigenvalues().head(3).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

TEST(Covariance, ExactModelMatchesFrozenQuadrature)
{
    const auto r = local_scattering_covariance(1.0, 30 * deg, 15 * deg, 4);
    for (int s = 0; s < 4; ++s)
        for (int m = 0; m <= s; ++m) {
            const cplx want = frozen_30_15[s - m];
            EXPECT_LT(std::abs(r.matrix(s, m) - want), 1e-9 * std::max(1.0, std::abs(want))) << s << "," << m;
            EXPECT_LT(std::abs(r.matrix(m, s) - std::conj(want)), 1e-9) << m << "," << s;
        }
}

TEST(Covariance, ExactModelWithinTwoPercentOfQuadrature)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> spread(1 * deg, 30 * deg);
    for (int trial = 0; trial < 20; ++trial) {
        const double phi = angle(rng), asd = spread(rng);
        const auto r = local_scattering_covariance(1.0, phi, asd, 4);
        const CMatrix want = oracle::scattering_matrix(1.0, phi, asd, 4);
        for (int s = 0; s < 4; ++s)
            for (int m = 0; m < 4; ++m)
                EXPECT_LE(std::abs(r.matrix(s, m) - want(s, m)), 0.02 * std::max(std::abs(want(s, m)), 1e-3))
                    << "phi=" << phi << " asd=" << asd;
        EXPECT_LT(oracle::relative_error(r.matrix, want), 1e-8);
    }
}

TEST(Covariance, PsdAndTraceIdentity)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (std::size_t n : {1u, 2u, 4u, 8u, 16u})
        for (int trial = 0; trial < 10; ++trial) {
            const double beta = std::pow(10.0, -8.0 - trial * 0.4);
            const auto r = local_scattering_covariance(beta, angle(rng), 15 * deg, n);
            EXPECT_LT((r.matrix - r.matrix.adjoint()).norm(), 1e-12 * r.matrix.norm());
            Eigen::SelfAdjointEigenSolver<CMatrix> es(r.matrix);
            EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * r.matrix.trace().real());
            EXPECT_NEAR(r.matrix.trace().real() / double(n), beta, 1e-9 * beta);
            EXPECT_LT(oracle::relative_error(r.factor * r.factor.adjoint(), r.matrix), 1e-9);
        }
}

TEST(Covariance, GaussianApproximationMatchesClosedForm)
{
    const double phi = 30 * deg, asd = 15 * deg;
    const auto r = local_scattering_covariance(1.0, phi, asd, 4, CovarianceModel::gaussian_approximation);
    for (int s = 0; s < 4; ++s)
        for (int m = 0; m < 4; ++m) {
            const double d = s - m;
            const cplx want = std::polar(1.0, std::numbers::pi * d * std::sin(phi)) *
                              std::exp(-asd * asd / 2.0 * std::pow(std::numbers::pi * d * std::cos(phi), 2));
            // clipping may perturb entries slightly
            EXPECT_LT(std::abs(r.matrix(s, m) - want), 1e-6);
        }
}

TEST(Covariance, SamplingConverges)
{
    const auto link = local_scattering_covariance(1.0, 30 * deg, 15 * deg, 4);
    CovarianceField field(1, 1, 4, {link});
    const std::size_t T = 100000;
    CMatrix acc = CMatrix::Zero(4, 4);
    for (std::size_t t = 0; t < T; ++t) {
        const auto h = sample_realization(field, 99, t);
        acc += h.link(0, 0) * h.link(0, 0).adjoint();
    }
    acc /= double(T);
    EXPECT_LT((acc - link.matrix).norm(), 0.05 * link.matrix.norm());
}

TEST(Covariance, WhiteAndRankOneSampling)
{
    SpatialCovariance white;
    white.matrix = CMatrix::Identity(3, 3);
    white.factor = CMatrix::Identity(3, 3);
    white.beta = 1.0;
    const auto rank1 = local_scattering_covariance(1.0, 0.4, 0.0, 3);
    CovarianceField field(1, 2, 3, {white, rank1});
    const std::size_t T = 20000;
    CMatrix acc = CMatrix::Zero(3, 3);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rank1.matrix);
    const CVector u = es.eigenvectors().col(2);
    for (std::size_t t = 0; t < T; ++t) {
        const auto h = sample_realization(field, 5, t);
        acc += h.link(0, 0) * h.link(0, 0).adjoint();
        const CVector v = h.link(0, 1);
        EXPECT_NEAR(std::abs(u.dot(v)), v.norm(), 1e-9 * std::max(1.0, v.norm()));
    }
    acc /= double(T);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(std::abs(acc(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 3.0 / std::sqrt(double(T)));
}

TEST(Covariance, DistinctLinksUncorrelated)
{
    const auto a = local_scattering_covariance(1.0, 0.1, 10 * deg, 2);
    CovarianceField field(2, 1, 2, {a, a});
    const std::size_t T = 40000;
    cplx cross = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const auto h = sample_realization(field, 17, t);
        cross += h.link(0, 0)(0) * std::conj(h.link(1, 0)(0));
    }
    EXPECT_LT(std::abs(cross / double(T)), 3.0 * std::sqrt(2.0 / T) + 1e-3);
}

TEST(Covariance, BatchMatchesPerRealizationStreams)
{
    const auto a = local_scattering_covariance(1.0, 0.1, 10 * deg, 2);
    CovarianceField field(1, 1, 2, {a});
    const auto batch = sample_channels(field, 5, 123);
    ASSERT_EQ(batch.size(), 5u);
    for (std::size_t t = 0; t < 5; ++t)
        EXPECT_EQ(batch.realizations[t].h, sample_realization(field, 123, t).h);
}

}  // namespace
}  // namespace cfmc
