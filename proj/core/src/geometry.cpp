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

#include "cfmc/geometry.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cfmc/error.hpp"
#include "cfmc/rng.hpp"

namespace cfmc {

void AreaSpec::validate() const
{
    if (!(side > 0.0))
        throw InvalidConfig("area side must be positive");
    if (ap_height < 0.0 || ms_height < 0.0)
        throw InvalidConfig("antenna heights must be non-negative");
}

double Displacement::norm() const { return std::hypot(dx, dy); }

namespace {

std::vector<Point> uniform_points(const AreaSpec& area, std::size_t count, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, area.side);
    std::vector<Point> points(count);
    for (auto& p : points) {
        p.x = u(rng);
        p.y = u(rng);
    }
    return points;
}

// Factor F with F F^T = C (Cholesky, falling back to clipped eigenvalues for
// nearly singular C). Identical positions must give
// identical shadowing, so the caller factors only distinct positions.
RMatrix correlation_factor(const RMatrix& cov)
{
    Eigen::LLT<RMatrix> llt(cov);
    if (llt.info() == Eigen::Success)
        return llt.matrixL();

    Eigen::SelfAdjointEigenSolver<RMatrix> eig(cov);
    if (eig.info() != Eigen::Success)
        throw SynthesisError("shadowing covariance eigendecomposition failed");
    const double tol = 1e-10 * cov.trace();
    RVector values = eig.eigenvalues();
    if (values.minCoeff() < -tol)
        throw SynthesisError("shadowing covariance is not positive semi-definite");
    values = values.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * values.asDiagonal();
}

}  // namespace

std::vector<Point> place_aps(const AreaSpec& area, std::size_t num_aps, std::uint64_t seed)
{
    area.validate();
    if (num_aps == 0)
        throw InvalidConfig("number of APs must be at least 1");
    return uniform_points(area, num_aps, seed);
}

std::vector<Point> place_ms_uniform(const AreaSpec& area, std::size_t num_ms, std::uint64_t seed)
{
    area.validate();
    if (num_ms == 0)
        throw InvalidConfig("number of MSs must be at least 1");
    return uniform_points(area, num_ms, seed);
}

ClusteredPlacement place_ms_clustered(const AreaSpec& area,
                                      std::size_t n_clusters,
                                      std::size_t per_cluster,
                                      double cluster_side,
                                      std::uint64_t seed)
{
    area.validate();
    if (n_clusters == 0 || per_cluster == 0)
        throw InvalidConfig("clustered deployment needs at least one cluster and one member");
    if (!(cluster_side > 0.0) || cluster_side > area.side)
        throw InvalidConfig("cluster side must be in (0, area side]");

    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, area.side);
    std::uniform_real_distribution<double> offset(0.0, cluster_side);

    ClusteredPlacement out;
    out.positions.reserve(n_clusters * per_cluster);
    out.labels.reserve(n_clusters * per_cluster);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        // Rejection keeps the lower-left corner uniform over the admissible range.
        Point corner{0.0, 0.0};
        if (cluster_side < area.side) {
            do {
                corner = {u(rng), u(rng)};
            } while (corner.x + cluster_side > area.side || corner.y + cluster_side > area.side);
        }
        out.centers.push_back({corner.x + cluster_side / 2, corner.y + cluster_side / 2});
        for (std::size_t m = 0; m < per_cluster; ++m) {
            const double x = corner.x + offset(rng);
            const double y = corner.y + offset(rng);
            out.positions.push_back({x, y});
            out.labels.push_back(c);
        }
    }
    return out;
}

Displacement wrapped_displacement(Point a, Point b, double side)
{
    Displacement best{b.x - a.x, b.y - a.y};
    double best_norm = best.dx * best.dx + best.dy * best.dy;
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const double dx = b.x + i * side - a.x;
            const double dy = b.y + j * side - a.y;
            const double n = dx * dx + dy * dy;
            if (n < best_norm) {
                best_norm = n;
                best = {dx, dy};
            }
        }
    }
    return best;
}

double distance_3d(const AreaSpec& area, Point ap, Point ms)
{
    const double horizontal = wrapped_displacement(ap, ms, area.side).norm();
    return std::hypot(horizontal, area.ap_height - area.ms_height);
}

double path_gain_db(double d3)
{
    if (!(d3 > 0.0))
        throw DomainError("path_gain_db: distance must be positive, got " + std::to_string(d3));
    return -30.5 - 36.7 * std::log10(d3);
}

RMatrix sample_shadowing(std::span<const Point> ms_positions,
                         std::size_t num_aps,
                         double sigma_sh_db,
                         double d_decorr,
                         double side,
                         std::uint64_t seed)
{
    if (sigma_sh_db < 0.0)
        throw InvalidConfig("shadowing standard deviation must be non-negative");
    if (!(d_decorr > 0.0))
        throw InvalidConfig("decorrelation distance must be positive");

    const std::size_t K = ms_positions.size();
    RMatrix field = RMatrix::Zero(static_cast<Eigen::Index>(num_aps), static_cast<Eigen::Index>(K));
    if (K == 0 || num_aps == 0 || sigma_sh_db == 0.0)
        return field;

    // Map every MS to a distinct-position slot.
    std::vector<std::size_t> slot(K);
    std::vector<Point> distinct;
    {
        std::map<std::pair<double, double>, std::size_t> seen;
        for (std::size_t k = 0; k < K; ++k) {
            auto key = std::make_pair(ms_positions[k].x, ms_positions[k].y);
            auto [it, inserted] = seen.emplace(key, distinct.size());
            if (inserted)
                distinct.push_back(ms_positions[k]);
            slot[k] = it->second;
        }
    }

    const auto M = static_cast<Eigen::Index>(distinct.size());
    RMatrix cov(M, M);
    const double var = sigma_sh_db * sigma_sh_db;
    for (Eigen::Index i = 0; i < M; ++i) {
        cov(i, i) = var;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = wrapped_displacement(distinct[i], distinct[j], side).norm();
            cov(i, j) = cov(j, i) = var * std::exp2(-d / d_decorr);
        }
    }
    const RMatrix factor = correlation_factor(cov);

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    RMatrix white(static_cast<Eigen::Index>(num_aps), M);
    for (Eigen::Index l = 0; l < white.rows(); ++l)
        for (Eigen::Index m = 0; m < M; ++m)
            white(l, m) = normal(rng);

    const RMatrix distinct_field = white * factor.transpose();
    for (std::size_t k = 0; k < K; ++k)
        field.col(static_cast<Eigen::Index>(k)) = distinct_field.col(static_cast<Eigen::Index>(slot[k]));
    return field;
}

RMatrix large_scale_matrix(const AreaSpec& area,
                           std::span<const Point> ap_positions,
                           std::span<const Point> ms_positions,
                           const RMatrix& shadowing_db)
{
    const auto L = static_cast<Eigen::Index>(ap_positions.size());
    const auto K = static_cast<Eigen::Index>(ms_positions.size());
    if (shadowing_db.rows() != L || shadowing_db.cols() != K)
        throw InvalidInput("shadowing matrix must be L x K");

    RMatrix beta(L, K);
    for (Eigen::Index l = 0; l < L; ++l)
        for (Eigen::Index k = 0; k < K; ++k) {
            const double d3 = distance_3d(area, ap_positions[l], ms_positions[k]);
            beta(l, k) = db_to_linear(path_gain_db(d3) + shadowing_db(l, k));
        }
    return beta;
}

}  // namespace cfmc
