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

#include "cfmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "cfmc/error.hpp"
#include "cfmc/precoding.hpp"
#include "cfmc/rng.hpp"

namespace cfmc {

SnapshotSeeds SnapshotSeeds::derive(std::uint64_t s)
{
    return {derive_seed(s, "geometry.aps"),  derive_seed(s, "geometry.ms"),  derive_seed(s, "geometry.shadow"),
            derive_seed(s, "grouping"),      derive_seed(s, "channels"),     derive_seed(s, "noise"),
            derive_seed(s, "norm.channels"), derive_seed(s, "norm.noise")};
}

std::uint64_t snapshot_seed(std::uint64_t master_seed, std::size_t index)
{
    return derive_seed(master_seed, static_cast<std::uint64_t>(index));
}

Deployment build_deployment(const SystemConfig& cfg, const SnapshotSeeds& seeds)
{
    Deployment d;
    d.area = AreaSpec{cfg.side, cfg.ap_height, cfg.ms_height};
    d.area.validate();
    d.ap_positions = place_aps(d.area, cfg.L, seeds.aps);
    if (cfg.deployment.kind == DeploymentSpec::Kind::clustered) {
        auto placed = place_ms_clustered(d.area, cfg.deployment.clusters, cfg.deployment.per_cluster,
                                         cfg.deployment.cluster_side, seeds.ms);
        d.ms_positions = std::move(placed.positions);
        d.ground_truth_cluster = std::move(placed.labels);
    } else {
        d.ms_positions = place_ms_uniform(d.area, cfg.K, seeds.ms);
    }
    d.shadowing_db = sample_shadowing(d.ms_positions, cfg.L, cfg.sigma_sh, cfg.d_decorr, cfg.side, seeds.shadowing);
    d.beta = large_scale_matrix(d.area, d.ap_positions, d.ms_positions, d.shadowing_db);
    return d;
}

SnapshotScene build_scene(const SystemConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    const auto seeds = SnapshotSeeds::derive(seed);
    SnapshotScene scene;
    scene.deployment = build_deployment(cfg, seeds);
    scene.covariances = build_covariances(scene.deployment, cfg.asd, cfg.N, cfg.covariance_model);
    const KMeansOptions km{cfg.kmeans_max_iters, cfg.kmeans_restarts};
    scene.groups = make_plan(cfg.mode, cfg.effective_groups(), scene.deployment.beta, km, seeds.grouping);
    scene.plan = assign_pilots_and_cluster(scene.deployment.beta, scene.groups, cfg.tau_p);
    scene.params = EstimationParams{cfg.tau_p, cfg.P_p, cfg.noise_power()};
    scene.stats = compute_composite_stats(scene.covariances, scene.groups, scene.plan, scene.params);
    return scene;
}

namespace {

CompositeEstimates draw_estimates(const SnapshotScene& scene, std::uint64_t channel_seed, std::uint64_t noise_seed,
                                  std::size_t t, const EstimateMask& mask, ChannelRealization& channels)
{
    channels = sample_realization(scene.covariances, channel_seed, t);
    Rng rng(derive_seed(noise_seed, static_cast<std::uint64_t>(t)));
    const auto obs = project_pilots(channels, scene.groups, scene.plan, scene.params, rng);
    return estimate_composite(obs, scene.stats, scene.plan, mask);
}

void accumulate_norms(const IpmmseDesigner& designer, std::size_t g, const CVector& w, std::size_t antennas,
                      std::vector<double>& norms)
{
    const auto N = static_cast<Eigen::Index>(antennas);
    for (std::size_t i = 0; i < designer.aps(g).size(); ++i)
        norms[i] += w.segment(static_cast<Eigen::Index>(i) * N, N).squaredNorm();
}

SnapshotDiagnostics plan_diagnostics(const PilotPlan& plan)
{
    SnapshotDiagnostics d;
    double total = 0.0;
    for (std::size_t g = 0; g < plan.num_groups(); ++g) {
        total += static_cast<double>(plan.serving_aps[g].size());
        d.rescued_groups += plan.rescued[g] ? 1 : 0;
    }
    d.mean_serving_aps = plan.num_groups() ? total / static_cast<double>(plan.num_groups()) : 0.0;
    for (const auto& served : plan.served_groups)
        d.max_groups_per_ap = std::max(d.max_groups_per_ap, served.size());
    return d;
}

}  // namespace

SnapshotOutcome evaluate_scene(const SystemConfig& cfg, const SnapshotScene& scene, std::uint64_t seed)
{
    const auto seeds = SnapshotSeeds::derive(seed);
    const std::size_t G = scene.groups.num_groups();
    const std::size_t T = cfg.realizations;
    const double noise = cfg.noise_power();

    SnapshotOutcome out;
    out.diagnostics = plan_diagnostics(scene.plan);
    SinrAccumulator acc(scene.groups, scene.plan);
    ChannelRealization channels;
    std::vector<CVector> precoders(G);
    SinrTerms terms;

    if (cfg.precoder == PrecoderKind::cb) {
        const RMatrix rho = distributed_power(scene.stats, scene.plan, cfg.nu_cb, cfg.P_dl);
        const auto mask = serving_mask(scene.plan);
        const auto N = static_cast<Eigen::Index>(cfg.N);
        for (std::size_t t = 0; t < T; ++t) {
            const auto est = draw_estimates(scene, seeds.channels, seeds.noise, t, mask, channels);
            for (std::size_t g = 0; g < G; ++g) {
                const auto& aps = scene.plan.serving_aps[g];
                precoders[g].resize(static_cast<Eigen::Index>(aps.size()) * N);
                for (std::size_t i = 0; i < aps.size(); ++i) {
                    const std::size_t l = aps[i];
                    precoders[g].segment(static_cast<Eigen::Index>(i) * N, N) =
                        cb_precoder(est.at(l, g), rho(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(g)),
                                    scene.stats.estimate_power(l, g));
                }
            }
            acc.add(channels, precoders);
        }
        terms = acc.finalize(noise);
        double worst = 0.0;
        for (Eigen::Index l = 0; l < rho.rows(); ++l)
            worst = std::max(worst, rho.row(l).sum());
        out.diagnostics.max_ap_power = worst;
    } else {
        const std::vector<double> virtual_power(G, cfg.p_g);
        const IpmmseDesigner designer(scene.stats, scene.groups, scene.plan, scene.params, virtual_power);
        const auto& mask = designer.required_estimates();
        std::vector<std::vector<double>> ap_norms(G);
        for (std::size_t g = 0; g < G; ++g)
            ap_norms[g].assign(designer.aps(g).size(), 0.0);

        if (cfg.split_sample) {
            for (std::size_t t = 0; t < T; ++t) {
                const auto est = draw_estimates(scene, seeds.norm_channels, seeds.norm_noise, t, mask, channels);
                for (std::size_t g = 0; g < G; ++g)
                    accumulate_norms(designer, g, designer.direction(g, est), cfg.N, ap_norms[g]);
            }
        }
        for (std::size_t t = 0; t < T; ++t) {
            const auto est = draw_estimates(scene, seeds.channels, seeds.noise, t, mask, channels);
            for (std::size_t g = 0; g < G; ++g) {
                precoders[g] = designer.direction(g, est);
                if (!cfg.split_sample)
                    accumulate_norms(designer, g, precoders[g], cfg.N, ap_norms[g]);
            }
            acc.add(channels, precoders);
        }
        for (auto& v : ap_norms)
            for (double& x : v)
                x /= static_cast<double>(T);

        const auto traces = serving_traces(scene.stats, scene.plan);
        const auto power = centralized_power(std::move(ap_norms), traces, cfg.nu_ipmmse, cfg.kappa, cfg.P_dl,
                                             scene.plan, cfg.omega_mode);
        std::vector<double> scale(G);
        for (std::size_t g = 0; g < G; ++g) {
            if (!(power.norm[g] > 0.0))
                throw InvalidStats("IP-MMSE precoder of group " + std::to_string(g) + " has zero norm");
            scale[g] = std::sqrt(power.rho[g] / power.norm[g]);
        }
        terms = acc.finalize(noise, scale);
        const auto per_ap = centralized_ap_power(power, scene.plan);
        out.diagnostics.max_ap_power = per_ap.empty() ? 0.0 : *std::max_element(per_ap.begin(), per_ap.end());
    }

    out.report = build_report(terms, scene.groups, cfg.tau_p, cfg.tau_c);
    return out;
}

SnapshotOutcome run_snapshot(const SystemConfig& cfg, std::uint64_t seed)
{
    const auto scene = build_scene(cfg, seed);
    return evaluate_scene(cfg, scene, seed);
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples)
{
    std::sort(samples.begin(), samples.end());
    std::vector<CdfPoint> cdf(samples.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        cdf[i] = {samples[i], static_cast<double>(i + 1) / n};
    return cdf;
}

std::vector<double> CampaignResult::samples() const
{
    std::vector<double> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots)
        out.push_back(s.sum_se);
    return out;
}

std::size_t default_workers()
{
    if (const char* env = std::getenv("CFMC_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            return static_cast<std::size_t>(v);
        throw InvalidConfig("CFMC_WORKERS must be a positive integer");
    }
    return 1;
}

CampaignResult run_campaign(const SystemConfig& cfg, std::size_t workers, const ProgressCallback& progress)
{
    cfg.validate();
    if (workers == 0)
        throw InvalidConfig("workers must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t S = cfg.snapshots;
    workers = std::min(workers, S);

    std::vector<std::optional<SnapshotSummary>> slots(S);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mu;
    std::size_t done = 0;
    std::optional<std::size_t> failed_index;
    std::string failure;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= S || stop.load())
                return;
            const std::uint64_t seed = snapshot_seed(cfg.master_seed, i);
            try {
                const auto outcome = run_snapshot(cfg, seed);
                SnapshotSummary s;
                s.index = i;
                s.seed = seed;
                s.sum_se_per_user = outcome.report.sum_se_per_user;
                s.sum_se_per_group = outcome.report.sum_se_per_group;
                s.sum_se = sum_se(outcome.report, cfg.sum_convention);
                s.min_se_user = outcome.report.se_user.empty()
                                    ? 0.0
                                    : *std::min_element(outcome.report.se_user.begin(), outcome.report.se_user.end());
                s.groups = outcome.report.se_group.size();
                s.clamped = outcome.report.clamped;
                s.diagnostics = outcome.diagnostics;
                slots[i] = s;
                std::lock_guard lock(mu);
                ++done;
                if (progress)
                    progress(done, S);
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                if (!failed_index || i < *failed_index) {
                    failed_index = i;
                    failure = "snapshot " + std::to_string(i) + " (seed " + std::to_string(seed) + "): " + e.what();
                }
                stop.store(true);
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }

    CampaignResult result;
    result.config = cfg;
    result.config_hash = config_hash(cfg);
    result.workers = workers;
    for (auto& s : slots)
        if (s)
            result.snapshots.push_back(*s);
    result.cdf = empirical_cdf(result.samples());
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failed_index)
        throw CampaignFailure(failure, *failed_index, std::move(result));
    return result;
}

void write_cdf_csv(const std::string& path, const std::vector<CdfPoint>& cdf)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    std::fprintf(f, "sum_se_bps_hz,cdf\n");
    for (const auto& p : cdf)
        std::fprintf(f, "%.17g,%.17g\n", p.value, p.probability);
    if (std::fclose(f) != 0)
        throw std::runtime_error("error closing '" + path + "'");
}

void write_report_json(const std::string& path, const CampaignResult& result, const std::optional<std::string>& error)
{
    using nlohmann::json;
    json snaps = json::array();
    std::size_t clamped = 0;
    std::size_t rescued = 0;
    double worst_ap = 0.0;
    for (const auto& s : result.snapshots) {
        clamped += s.clamped;
        rescued += s.diagnostics.rescued_groups;
        worst_ap = std::max(worst_ap, s.diagnostics.max_ap_power);
        snaps.push_back({{"index", s.index},
                         {"seed", s.seed},
                         {"sum_se", s.sum_se},
                         {"sum_se_per_user", s.sum_se_per_user},
                         {"sum_se_per_group", s.sum_se_per_group},
                         {"min_se_user", s.min_se_user},
                         {"groups", s.groups},
                         {"clamped", s.clamped},
                         {"rescued_groups", s.diagnostics.rescued_groups},
                         {"max_groups_per_ap", s.diagnostics.max_groups_per_ap},
                         {"mean_serving_aps", s.diagnostics.mean_serving_aps},
                         {"max_ap_power", s.diagnostics.max_ap_power}});
    }
    const auto samples = result.samples();
    json summary = json::object();
    if (!samples.empty()) {
        double mean = 0.0;
        for (double v : samples)
            mean += v;
        mean /= static_cast<double>(samples.size());
        auto sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        summary = {{"mean", mean},
                   {"median", sorted[(sorted.size() - 1) / 2]},
                   {"min", sorted.front()},
                   {"max", sorted.back()}};
    }

    json report = {
        {"status", error ? "failed" : "ok"},
        {"config", json::parse(config_to_json(result.config))},
        {"config_hash", result.config_hash},
        {"master_seed", result.config.master_seed},
        {"snapshots_requested", result.config.snapshots},
        {"snapshots_completed", result.snapshots.size()},
        {"workers", result.workers},
        {"wall_seconds", result.wall_seconds},
        {"sum_convention", std::string(to_string(result.config.sum_convention))},
        {"summary", summary},
        {"diagnostics",
         {{"clamped_interference", clamped}, {"rescued_groups", rescued}, {"max_ap_power", worst_ap}}},
        {"snapshot_results", snaps},
    };
    if (error)
        report["error"] = *error;

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << report.dump(2) << '\n';
}

}  // namespace cfmc
