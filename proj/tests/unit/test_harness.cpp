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

#include <algorithm>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cfmc/error.hpp"
#include "cfmc/harness.hpp"

namespace cfmc {
namespace {

SystemConfig tiny()
{
    SystemConfig c = preset("desk_uniform");
    c.L = 4;
    c.N = 1;
    c.K = 4;
    c.tau_p = 2;
    c.side = 200.0;
    c.realizations = 50;
    c.snapshots = 6;
    c.mode = TransmissionMode::unicast;
    return c;
}

TEST(Harness, UnicastSnapshot)
{
    const auto cfg = tiny();
    const auto out = run_snapshot(cfg, 5);
    EXPECT_EQ(out.report.se_group.size(), 4u);
    EXPECT_DOUBLE_EQ(out.report.sum_se_per_user, out.report.sum_se_per_group);
    for (double se : out.report.se_user)
        EXPECT_GE(se, 0.0);
    EXPECT_LE(out.diagnostics.max_ap_power, cfg.P_dl * (1.0 + 1e-12));
}

TEST(Harness, SnapshotIsDeterministic)
{
    for (auto precoder : {PrecoderKind::ipmmse, PrecoderKind::cb}) {
        auto cfg = tiny();
        cfg.precoder = precoder;
        const auto a = run_snapshot(cfg, 77);
        const auto b = run_snapshot(cfg, 77);
        EXPECT_EQ(a.report.sinr, b.report.sinr);
        EXPECT_EQ(a.report.sum_se_per_user, b.report.sum_se_per_user);
    }
}

TEST(Harness, StageIsolation)
{
    auto cfg = tiny();
    cfg.K = 6;
    cfg.mode = TransmissionMode::single;
    const auto one = build_scene(cfg, 9);
    cfg.mode = TransmissionMode::unicast;
    const auto all = build_scene(cfg, 9);
    EXPECT_EQ(one.deployment.ap_positions, all.deployment.ap_positions);
    EXPECT_EQ(one.deployment.ms_positions, all.deployment.ms_positions);
    EXPECT_EQ(one.deployment.beta, all.deployment.beta);
    EXPECT_NE(one.plan.serving_aps.size(), all.plan.serving_aps.size());

    auto seeds = SnapshotSeeds::derive(9);
    const auto base = build_deployment(cfg, seeds);
    seeds.channels ^= 0xdeadbeef;
    seeds.noise ^= 0x1234;
    seeds.grouping ^= 0x99;
    EXPECT_EQ(build_deployment(cfg, seeds).beta, base.beta);
}

TEST(Harness, ClusteredDeploymentCarriesLabels)
{
    auto cfg = preset("desk_clustered");
    const auto d = build_deployment(cfg, SnapshotSeeds::derive(3));
    ASSERT_TRUE(d.ground_truth_cluster.has_value());
    EXPECT_EQ(d.ground_truth_cluster->size(), 40u);
}

TEST(Harness, SplitSampleRuns)
{
    auto cfg = tiny();
    cfg.split_sample = true;
    const auto a = run_snapshot(cfg, 5);
    cfg.split_sample = false;
    const auto b = run_snapshot(cfg, 5);
    EXPECT_NE(a.report.sinr, b.report.sinr);
    // changing only the normalization draw leaves the unnormalized SINR ratio
    // structure intact, so SEs stay of the same order
    EXPECT_NEAR(a.report.sum_se_per_user, b.report.sum_se_per_user, 0.5 * b.report.sum_se_per_user + 1.0);
}

TEST(Harness, EmpiricalCdf)
{
    const auto cdf = empirical_cdf({3.0, 1.0, 2.0, 2.0});
    ASSERT_EQ(cdf.size(), 4u);
    EXPECT_EQ(cdf[0].value, 1.0);
    EXPECT_EQ(cdf[3].value, 3.0);
    EXPECT_EQ(cdf[0].probability, 0.25);
    EXPECT_EQ(cdf[3].probability, 1.0);
    EXPECT_TRUE(empirical_cdf({}).empty());
}

TEST(Harness, CampaignCdfAndParallelDeterminism)
{
    auto cfg = tiny();
    cfg.snapshots = 50;
    cfg.realizations = 20;
    const auto r1 = run_campaign(cfg, 1);
    ASSERT_EQ(r1.snapshots.size(), 50u);
    ASSERT_EQ(r1.cdf.size(), 50u);
    for (std::size_t i = 1; i < 50; ++i) {
        EXPECT_LE(r1.cdf[i - 1].value, r1.cdf[i].value);
        EXPECT_LT(r1.cdf[i - 1].probability, r1.cdf[i].probability);
    }
    EXPECT_EQ(r1.cdf.back().probability, 1.0);
    auto sorted = r1.samples();
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 50; ++i)
        EXPECT_EQ(r1.cdf[i].value, sorted[i]);
    for (std::size_t i = 0; i < 50; ++i)
        EXPECT_EQ(r1.snapshots[i].index, i);

    const auto r4 = run_campaign(cfg, 4);
    ASSERT_EQ(r4.cdf.size(), 50u);
    for (std::size_t i = 0; i < 50; ++i) {
        EXPECT_EQ(r4.cdf[i].value, r1.cdf[i].value);
        EXPECT_EQ(r4.snapshots[i].sum_se, r1.snapshots[i].sum_se);
    }
    EXPECT_EQ(r4.config_hash, r1.config_hash);
}

TEST(Harness, FailureKeepsPartialResults)
{
    auto cfg = tiny();
    cfg.p_g = 0.0;  // zero virtual power makes every IP-MMSE norm vanish
    try {
        run_campaign(cfg, 2);
        FAIL() << "expected failure";
    } catch (const CampaignFailure& e) {
        EXPECT_EQ(e.failed_index(), 0u);
        EXPECT_NE(std::string(e.what()).find("snapshot 0"), std::string::npos);
        const std::string path = ::testing::TempDir() + "cfmc_failed.json";
        write_report_json(path, e.partial(), std::string(e.what()));
        std::stringstream buf;
        buf << std::ifstream(path).rdbuf();
        EXPECT_NE(buf.str().find("\"status\": \"failed\""), std::string::npos);
    }
}

TEST(Harness, OutputFiles)
{
    auto cfg = tiny();
    cfg.snapshots = 3;
    const auto r = run_campaign(cfg, 1);
    const std::string dir = ::testing::TempDir();
    write_cdf_csv(dir + "cdf.csv", r.cdf);
    std::ifstream csv(dir + "cdf.csv");
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "sum_se_bps_hz,cdf");
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        EXPECT_NE(line.find(','), std::string::npos);
    }
    EXPECT_EQ(rows, 3u);

    write_report_json(dir + "report.json", r);
    std::stringstream buf;
    buf << std::ifstream(dir + "report.json").rdbuf();
    for (const char* key : {"\"config_hash\"", "\"snapshot_results\"", "\"clamped_interference\"", "\"master_seed\"",
                            "\"wall_seconds\"", "\"status\": \"ok\""})
        EXPECT_NE(buf.str().find(key), std::string::npos) << key;
}

TEST(Harness, WorkersFromEnvironment)
{
    ::setenv("CFMC_WORKERS", "3", 1);
    EXPECT_EQ(default_workers(), 3u);
    ::setenv("CFMC_WORKERS", "zero", 1);
    EXPECT_THROW(default_workers(), InvalidConfig);
    ::unsetenv("CFMC_WORKERS");
    EXPECT_EQ(default_workers(), 1u);
    EXPECT_THROW(run_campaign(tiny(), 0), InvalidConfig);
}

}  // namespace
}  // namespace cfmc
