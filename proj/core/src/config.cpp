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

#include "cfmc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cfmc/error.hpp"
#include "cfmc/rng.hpp"

namespace cfmc {

using nlohmann::json;

namespace {

std::string_view to_string(CovarianceModel model)
{
    return model == CovarianceModel::exact ? "exact" : "gaussian_approximation";
}

CovarianceModel parse_covariance_model(std::string_view text)
{
    if (text == "exact") return CovarianceModel::exact;
    if (text == "gaussian_approximation") return CovarianceModel::gaussian_approximation;
    throw InvalidConfig("unknown covariance model '" + std::string(text) + "'");
}

json deployment_to_json(const DeploymentSpec& d)
{
    if (d.kind == DeploymentSpec::Kind::uniform)
        return {{"type", "uniform"}};
    return {{"type", "clustered"},
            {"clusters", d.clusters},
            {"per_cluster", d.per_cluster},
            {"cluster_side", d.cluster_side}};
}

void reject_unknown(const json& j, const std::set<std::string>& known, std::string_view where)
{
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw InvalidConfig("unknown key '" + key + "' in " + std::string(where));
}

DeploymentSpec deployment_from_json(const json& j)
{
    if (!j.is_object())
        throw InvalidConfig("deployment must be an object");
    reject_unknown(j, {"type", "clusters", "per_cluster", "cluster_side"}, "deployment");
    const std::string type = j.value("type", "uniform");
    if (type == "uniform") {
        if (j.size() != 1 && j.size() != 0)
            throw InvalidConfig("uniform deployment takes no parameters");
        return DeploymentSpec::uniform();
    }
    if (type == "clustered")
        return DeploymentSpec::clustered(j.at("clusters").get<std::size_t>(), j.at("per_cluster").get<std::size_t>(),
                                         j.value("cluster_side", 10.0));
    throw InvalidConfig("unknown deployment type '" + type + "'");
}

json to_json_object(const SystemConfig& c)
{
    return {
        {"L", c.L},
        {"N", c.N},
        {"K", c.K},
        {"tau_c", c.tau_c},
        {"tau_p", c.tau_p},
        {"P_p", c.P_p},
        {"P_dl", c.P_dl},
        {"p_g", c.p_g},
        {"nu_ipmmse", c.nu_ipmmse},
        {"kappa", c.kappa},
        {"nu_cb", c.nu_cb},
        {"sigma_sh", c.sigma_sh},
        {"d_decorr", c.d_decorr},
        {"asd", c.asd},
        {"side", c.side},
        {"ap_height", c.ap_height},
        {"ms_height", c.ms_height},
        {"noise", c.noise},
        {"snapshots", c.snapshots},
        {"realizations", c.realizations},
        {"mode", std::string(to_string(c.mode))},
        {"precoder", std::string(to_string(c.precoder))},
        {"G", c.G},
        {"deployment", deployment_to_json(c.deployment)},
        {"master_seed", c.master_seed},
        {"sum_convention", std::string(to_string(c.sum_convention))},
        {"omega_mode", std::string(to_string(c.omega_mode))},
        {"split_sample", c.split_sample},
        {"kmeans_restarts", c.kmeans_restarts},
        {"kmeans_max_iters", c.kmeans_max_iters},
        {"covariance_model", std::string(to_string(c.covariance_model))},
    };
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw InvalidConfig(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

}  // namespace

void SystemConfig::validate() const
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok)
            throw InvalidConfig(what);
    };
    require(L >= 1, "L must be at least 1");
    require(N >= 1, "N must be at least 1");
    require(K >= 1, "K must be at least 1");
    require(tau_p >= 1, "tau_p must be at least 1");
    require(tau_p < tau_c, "tau_p must be smaller than tau_c");
    require(P_p > 0.0, "P_p must be positive");
    require(P_dl >= 0.0 && p_g >= 0.0, "powers must be non-negative");
    require(nu_ipmmse >= -1.0 && nu_ipmmse <= 1.0 && nu_cb >= -1.0 && nu_cb <= 1.0, "nu must lie in [-1, 1]");
    require(kappa >= 0.0 && kappa <= 1.0, "kappa must lie in [0, 1]");
    require(sigma_sh >= 0.0, "sigma_sh must be non-negative");
    require(d_decorr > 0.0, "d_decorr must be positive");
    require(asd >= 0.0, "asd must be non-negative");
    require(side > 0.0, "side must be positive");
    require(ap_height >= 0.0 && ms_height >= 0.0, "heights must be non-negative");
    require(std::isfinite(noise), "noise must be finite");
    require(snapshots >= 1, "snapshots must be at least 1");
    require(realizations >= 1, "realizations must be at least 1");
    require(precoder != PrecoderKind::ipmmse || realizations >= 2,
            "ipmmse needs at least 2 realizations for precoder normalization");
    if (mode == TransmissionMode::subgroup)
        require(G >= 1 && G <= K, "G must lie in [1, K] for subgroup mode");
    if (deployment.kind == DeploymentSpec::Kind::clustered) {
        require(deployment.clusters >= 1 && deployment.per_cluster >= 1, "clustered deployment needs clusters >= 1");
        require(deployment.clusters * deployment.per_cluster == K, "clusters * per_cluster must equal K");
        require(deployment.cluster_side > 0.0 && deployment.cluster_side <= side,
                "cluster_side must lie in (0, side]");
    }
}

std::size_t SystemConfig::effective_groups() const
{
    switch (mode) {
    case TransmissionMode::unicast: return K;
    case TransmissionMode::single: return 1;
    case TransmissionMode::subgroup: return G;
    }
    return G;
}

double noise_dbm(double psd_dbm_hz, double bandwidth_hz, double noise_figure_db)
{
    return psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

std::string config_to_json(const SystemConfig& cfg, int indent)
{
    return to_json_object(cfg).dump(indent);
}

SystemConfig config_from_json(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw InvalidConfig("config must be a JSON object");

    SystemConfig c;
    std::set<std::string> known;
    const json defaults = to_json_object(c);
    for (const auto& [key, _] : defaults.items())
        known.insert(key);
    reject_unknown(j, known, "config");

    read(j, "L", c.L);
    read(j, "N", c.N);
    read(j, "K", c.K);
    read(j, "tau_c", c.tau_c);
    read(j, "tau_p", c.tau_p);
    read(j, "P_p", c.P_p);
    read(j, "P_dl", c.P_dl);
    read(j, "p_g", c.p_g);
    read(j, "nu_ipmmse", c.nu_ipmmse);
    read(j, "kappa", c.kappa);
    read(j, "nu_cb", c.nu_cb);
    read(j, "sigma_sh", c.sigma_sh);
    read(j, "d_decorr", c.d_decorr);
    read(j, "asd", c.asd);
    read(j, "side", c.side);
    read(j, "ap_height", c.ap_height);
    read(j, "ms_height", c.ms_height);
    read(j, "noise", c.noise);
    read(j, "snapshots", c.snapshots);
    read(j, "realizations", c.realizations);
    read(j, "G", c.G);
    read(j, "master_seed", c.master_seed);
    read(j, "split_sample", c.split_sample);
    read(j, "kmeans_restarts", c.kmeans_restarts);
    read(j, "kmeans_max_iters", c.kmeans_max_iters);

    std::string text_value;
    if (j.contains("mode")) {
        read(j, "mode", text_value);
        c.mode = parse_transmission_mode(text_value);
    }
    if (j.contains("precoder")) {
        read(j, "precoder", text_value);
        c.precoder = parse_precoder_kind(text_value);
    }
    if (j.contains("sum_convention")) {
        read(j, "sum_convention", text_value);
        c.sum_convention = parse_sum_convention(text_value);
    }
    if (j.contains("omega_mode")) {
        read(j, "omega_mode", text_value);
        c.omega_mode = parse_omega_mode(text_value);
    }
    if (j.contains("covariance_model")) {
        read(j, "covariance_model", text_value);
        c.covariance_model = parse_covariance_model(text_value);
    }
    if (j.contains("deployment"))
        c.deployment = deployment_from_json(j.at("deployment"));

    c.validate();
    return c;
}

SystemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidConfig("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

std::string config_hash(const SystemConfig& cfg)
{
    char out[17];
    std::snprintf(out, sizeof out, "%016llx",
                  static_cast<unsigned long long>(fnv1a(to_json_object(cfg).dump())));
    return out;
}

std::vector<std::string> preset_names()
{
    return {"fig2_100", "fig2_500", "fig3", "desk_uniform", "desk_clustered"};
}

SystemConfig preset(std::string_view name)
{
    SystemConfig c;  // defaults carry the full-scale parameter set
    c.noise = noise_dbm(-174.0, 20e6, 7.0);

    if (name == "fig2_100") {
        c.K = 100;
        c.mode = TransmissionMode::unicast;
        c.G = 10;
        return c;
    }
    if (name == "fig2_500") {
        c.K = 500;
        c.mode = TransmissionMode::unicast;
        c.G = 50;
        return c;
    }
    if (name == "fig3") {
        c.K = 500;
        c.deployment = DeploymentSpec::clustered(10, 50, 10.0);
        c.mode = TransmissionMode::subgroup;
        c.G = 30;
        return c;
    }

    // Desk scale: a quarter of the APs on a quarter of the area (same AP
    // density), two antennas, 50 snapshots x 100 realizations.
    c.L = 25;
    c.N = 2;
    c.side = 500.0;
    c.snapshots = 50;
    c.realizations = 100;
    if (name == "desk_uniform") {
        c.K = 40;
        c.tau_p = 10;
        c.mode = TransmissionMode::unicast;
        c.G = 10;
        return c;
    }
    if (name == "desk_clustered") {
        c.K = 40;
        c.tau_p = 5;
        c.deployment = DeploymentSpec::clustered(4, 10, 10.0);
        c.mode = TransmissionMode::subgroup;
        c.G = 4;
        return c;
    }

    std::string valid;
    for (const auto& n : preset_names())
        valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidConfig("unknown preset '" + std::string(name) + "'; valid presets: " + valid);
}

}  // namespace cfmc
