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
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfmc/config.hpp"
#include "cfmc/covariance.hpp"
#include "cfmc/estimation.hpp"
#include "cfmc/evaluation.hpp"
#include "cfmc/geometry.hpp"
#include "cfmc/grouping.hpp"
#include "cfmc/pilots.hpp"

namespace cfmc {

/// Independent streams for each stage of one snapshot.
struct SnapshotSeeds {
    std::uint64_t aps = 0;
    std::uint64_t ms = 0;
    std::uint64_t shadowing = 0;
    std::uint64_t grouping = 0;
    std::uint64_t channels = 0;
    std::uint64_t noise = 0;
    std::uint64_t norm_channels = 0;  // split-sample normalization pass
    std::uint64_t norm_noise = 0;

    static SnapshotSeeds derive(std::uint64_t snapshot_seed);
};

std::uint64_t snapshot_seed(std::uint64_t master_seed, std::size_t index);

/// Everything about a snapshot that does not depend on the small-scale draw.
struct SnapshotScene {
    Deployment deployment;
    CovarianceField covariances;
    GroupAssignment groups;
    PilotPlan plan;
    EstimationParams params;
    CompositeStats stats;
};

Deployment build_deployment(const SystemConfig& cfg, const SnapshotSeeds& seeds);

SnapshotScene build_scene(const SystemConfig& cfg, std::uint64_t snapshot_seed);

struct SnapshotDiagnostics {
    std::size_t rescued_groups = 0;
    std::size_t max_groups_per_ap = 0;
    double mean_serving_aps = 0.0;
    double max_ap_power = 0.0;  // realized E{sum_g ||w_lg||^2}, worst AP
};

struct SnapshotOutcome {
    SeReport report;
    SnapshotDiagnostics diagnostics;
};

/// Runs the small-scale Monte Carlo of an already built scene.
SnapshotOutcome evaluate_scene(const SystemConfig& cfg, const SnapshotScene& scene, std::uint64_t snapshot_seed);

SnapshotOutcome run_snapshot(const SystemConfig& cfg, std::uint64_t snapshot_seed);

struct SnapshotSummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double sum_se = 0.0;  // in the configured convention
    double sum_se_per_user = 0.0;
    double sum_se_per_group = 0.0;
    double min_se_user = 0.0;
    std::size_t groups = 0;
    std::size_t clamped = 0;
    SnapshotDiagnostics diagnostics;
};

struct CdfPoint {
    double value = 0.0;
    double probability = 0.0;
};

/// Empirical CDF, one step per sample: (x_(i), i / n).
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

struct CampaignResult {
    SystemConfig config;
    std::string config_hash;
    std::vector<SnapshotSummary> snapshots;  // completed ones, by index
    std::vector<CdfPoint> cdf;
    std::size_t workers = 1;
    double wall_seconds = 0.0;

    std::vector<double> samples() const;
};

/// Thrown by run_campaign when a snapshot fails; carries what finished.
class CampaignFailure : public std::runtime_error {
public:
    CampaignFailure(const std::string& what, std::size_t failed_index, CampaignResult partial)
        : std::runtime_error(what), failed_index_(failed_index), partial_(std::move(partial))
    {
    }

    std::size_t failed_index() const { return failed_index_; }
    const CampaignResult& partial() const { return partial_; }

private:
    std::size_t failed_index_;
    CampaignResult partial_;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Results are bit-identical for any worker count.
CampaignResult run_campaign(const SystemConfig& cfg, std::size_t workers = 1, const ProgressCallback& progress = {});

/// Worker count from CFMC_WORKERS, else 1.
std::size_t default_workers();

void write_cdf_csv(const std::string& path, const std::vector<CdfPoint>& cdf);

void write_report_json(const std::string& path,
                       const CampaignResult& result,
                       const std::optional<std::string>& error = std::nullopt);

}  // namespace cfmc
