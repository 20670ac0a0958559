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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfmc/types.hpp"

namespace cfmc {

/// Square coverage area, wrapped around by its 8 neighbour replicas.
struct AreaSpec {
    double side = 1000.0;      // m
    double ap_height = 10.0;   // m
    double ms_height = 1.5;    // m

    void validate() const;
};

/// AP/MS layout and the large-scale gains derived from it.
///
/// `shadowing_db` and `beta` are L x K (row = AP, column = MS). The identity
/// 10 log10(beta(l,k)) == path_gain_db(d3(l,k)) + shadowing_db(l,k) holds for
/// every entry.
struct Deployment {
    AreaSpec area;
    std::vector<Point> ap_positions;
    std::vector<Point> ms_positions;
    RMatrix shadowing_db;
    RMatrix beta;
    std::optional<std::vector<std::size_t>> ground_truth_cluster;

    std::size_t num_aps() const { return ap_positions.size(); }
    std::size_t num_ms() const { return ms_positions.size(); }
};

struct Displacement {
    double dx = 0.0;
    double dy = 0.0;

    double norm() const;
};

struct ClusteredPlacement {
    std::vector<Point> positions;
    std::vector<std::size_t> labels;
    std::vector<Point> centers;
};

std::vector<Point> place_aps(const AreaSpec& area, std::size_t num_aps, std::uint64_t seed);

std::vector<Point> place_ms_uniform(const AreaSpec& area, std::size_t num_ms, std::uint64_t seed);

/// Cluster squares of side `cluster_side` are placed uniformly so that each
/// square lies inside the area; members are uniform inside their square.
/// MS indices are cluster-major: cluster c owns [c*per_cluster, (c+1)*per_cluster).
ClusteredPlacement place_ms_clustered(const AreaSpec& area,
                                      std::size_t n_clusters,
                                      std::size_t per_cluster,
                                      double cluster_side,
                                      std::uint64_t seed);

/// Minimum-norm displacement from `a` to any of the 9 replica images of `b`.
Displacement wrapped_displacement(Point a, Point b, double side);

/// AP-MS distance including the antenna height difference.
double distance_3d(const AreaSpec& area, Point ap, Point ms);

/// -30.5 - 36.7 log10(d3), d3 in meters.
double path_gain_db(double d3);

/// Correlated log-normal shadowing, one independent Gaussian field per AP.
///
/// Within a row the covariance between MS k and k' is
/// sigma_sh^2 * 2^(-d(k,k')/d_decorr) with d the wrapped distance.
RMatrix sample_shadowing(std::span<const Point> ms_positions,
                         std::size_t num_aps,
                         double sigma_sh_db,
                         double d_decorr,
                         double side,
                         std::uint64_t seed);

/// beta(l,k) = 10^((path_gain_db(d3) + F(l,k)) / 10).
RMatrix large_scale_matrix(const AreaSpec& area,
                           std::span<const Point> ap_positions,
                           std::span<const Point> ms_positions,
                           const RMatrix& shadowing_db);

}  // namespace cfmc
