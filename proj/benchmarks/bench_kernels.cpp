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


// Timings for the kernels that dominate a snapshot.

#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "cfmc/config.hpp"
#include "cfmc/covariance.hpp"
#include "cfmc/estimation.hpp"
#include "cfmc/harness.hpp"
#include "cfmc/precoding.hpp"

namespace {

using namespace cfmc;

constexpr double deg = std::numbers::pi / 180.0;

void covariance_synthesis(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = state.range(1) ? CovarianceModel::gaussian_approximation : CovarianceModel::exact;
    double phi = 0.1;
    for (auto _ : state) {
        auto c = local_scattering_covariance(1e-9, phi, 15 * deg, n, model);
        benchmark::DoNotOptimize(c.factor.data());
        phi += 1e-3;
    }
}
BENCHMARK(covariance_synthesis)->ArgsProduct({{2, 4, 8}, {0, 1}});

// Scene built once per benchmark; the measured part is the per-realization work.
const SnapshotScene& desk_scene(TransmissionMode mode)
{
    static std::vector<std::pair<TransmissionMode, SnapshotScene>> cache;
    for (const auto& [m, s] : cache)
        if (m == mode)
            return s;
    SystemConfig cfg = preset("desk_uniform");
    cfg.mode = mode;
    cache.emplace_back(mode, build_scene(cfg, snapshot_seed(cfg.master_seed, 0)));
    return cache.back().second;
}

void ipmmse_directions(benchmark::State& state)
{
    const auto mode = static_cast<TransmissionMode>(state.range(0));
    const auto& scene = desk_scene(mode);
    const std::size_t G = scene.groups.num_groups();
    const std::vector<double> p(G, 0.1);
    const IpmmseDesigner designer(scene.stats, scene.groups, scene.plan, scene.params, p);
    const auto h = sample_realization(scene.covariances, 3, 0);
    Rng rng(4);
    const auto obs = project_pilots(h, scene.groups, scene.plan, scene.params, rng);
    const auto est = estimate_composite(obs, scene.stats, scene.plan, designer.required_estimates());
    for (auto _ : state)
        for (std::size_t g = 0; g < G; ++g)
            benchmark::DoNotOptimize(designer.direction(g, est).data());
    state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(ipmmse_directions)
    ->Arg(static_cast<int>(TransmissionMode::unicast))
    ->Arg(static_cast<int>(TransmissionMode::subgroup))
    ->Arg(static_cast<int>(TransmissionMode::single))
    ->Unit(benchmark::kMicrosecond);

void pilot_estimation(benchmark::State& state)
{
    const auto& scene = desk_scene(TransmissionMode::subgroup);
    std::size_t t = 0;
    for (auto _ : state) {
        const auto h = sample_realization(scene.covariances, 5, t);
        Rng rng(t++);
        const auto obs = project_pilots(h, scene.groups, scene.plan, scene.params, rng);
        benchmark::DoNotOptimize(estimate_composite(obs, scene.stats, scene.plan).h.data());
    }
}
BENCHMARK(pilot_estimation)->Unit(benchmark::kMicrosecond);

void desk_snapshot(benchmark::State& state)
{
    SystemConfig cfg = preset("desk_uniform");
    cfg.mode = TransmissionMode::subgroup;
    cfg.precoder = state.range(0) ? PrecoderKind::cb : PrecoderKind::ipmmse;
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_snapshot(cfg, snapshot_seed(cfg.master_seed, i++)).report.sum_se_per_user);
    state.SetLabel(std::string(to_string(cfg.precoder)));
}
BENCHMARK(desk_snapshot)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
