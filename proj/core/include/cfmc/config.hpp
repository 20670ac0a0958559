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
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "cfmc/covariance.hpp"
#include "cfmc/evaluation.hpp"
#include "cfmc/grouping.hpp"
#include "cfmc/precoding.hpp"

namespace cfmc {

struct DeploymentSpec {
    enum class Kind { uniform, clustered };

    Kind kind = Kind::uniform;
    std::size_t clusters = 0;
    std::size_t per_cluster = 0;
    double cluster_side = 10.0;  // m

    static DeploymentSpec uniform() { return {}; }
    static DeploymentSpec clustered(std::size_t clusters, std::size_t per_cluster, double cluster_side)
    {
        return {Kind::clustered, clusters, per_cluster, cluster_side};
    }

    friend bool operator==(const DeploymentSpec&, const DeploymentSpec&) = default;
};

/// Every scalar of a simulation campaign. Powers in W, lengths in m, angles
/// in radians, noise in dBm over the full bandwidth.
struct SystemConfig {
    std::size_t L = 100;
    std::size_t N = 4;
    std::size_t K = 100;
    std::size_t tau_c = 200;
    std::size_t tau_p = 20;
    double P_p = 0.1;
    double P_dl = 0.2;
    double p_g = 0.1;
    double nu_ipmmse = -0.5;
    double kappa = 0.5;
    double nu_cb = 0.5;
    double sigma_sh = 4.0;   // dB
    double d_decorr = 9.0;
    double asd = 15.0 * std::numbers::pi / 180.0;
    double side = 1000.0;
    double ap_height = 10.0;
    double ms_height = 1.5;
    double noise = -93.98970004336019;  // -174 dBm/Hz + 10 log10(20 MHz) + 7 dB
    std::size_t snapshots = 250;
    std::size_t realizations = 500;
    TransmissionMode mode = TransmissionMode::unicast;
    PrecoderKind precoder = PrecoderKind::ipmmse;
    std::size_t G = 1;
    DeploymentSpec deployment;
    std::uint64_t master_seed = 1;
    SumConvention sum_convention = SumConvention::per_user;
    OmegaMode omega_mode = OmegaMode::fraction;
    bool split_sample = false;
    std::size_t kmeans_restarts = 50;
    std::size_t kmeans_max_iters = 100;
    CovarianceModel covariance_model = CovarianceModel::exact;

    /// Throws InvalidConfig describing the first violated constraint.
    void validate() const;

    double noise_power() const { return dbm_to_watt(noise); }
    /// Number of multicast streams implied by mode and G.
    std::size_t effective_groups() const;
};

/// Thermal noise power in dBm: psd + 10 log10(bandwidth) + noise figure.
double noise_dbm(double psd_dbm_hz, double bandwidth_hz, double noise_figure_db);

std::string config_to_json(const SystemConfig& cfg, int indent = 2);

/// Missing keys keep their default; unknown keys raise InvalidConfig.
SystemConfig config_from_json(std::string_view text);

SystemConfig load_config(const std::string& path);

/// 16 hex digits over the canonical JSON of every field.
std::string config_hash(const SystemConfig& cfg);

std::vector<std::string> preset_names();
SystemConfig preset(std::string_view name);

}  // namespace cfmc
