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

// cfmc: run multicast sum-SE campaigns and write cdf.csv + report.json.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfmc/config.hpp"
#include "cfmc/error.hpp"
#include "cfmc/harness.hpp"

namespace {

struct SimulateArgs {
    std::string preset;
    std::string config;
    std::string out = "cfmc_out";
    std::optional<std::string> mode;
    std::optional<std::string> precoder;
    std::optional<std::size_t> groups;
    std::optional<std::size_t> snapshots;
    std::optional<std::size_t> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> sum_convention;
    bool split_sample = false;
    bool quiet = false;
};

cfmc::SystemConfig resolve(const SimulateArgs& a)
{
    cfmc::SystemConfig cfg = a.config.empty() ? cfmc::preset(a.preset) : cfmc::load_config(a.config);
    if (a.mode) cfg.mode = cfmc::parse_transmission_mode(*a.mode);
    if (a.precoder) cfg.precoder = cfmc::parse_precoder_kind(*a.precoder);
    if (a.groups) cfg.G = *a.groups;
    if (a.snapshots) cfg.snapshots = *a.snapshots;
    if (a.realizations) cfg.realizations = *a.realizations;
    if (a.seed) cfg.master_seed = *a.seed;
    if (a.sum_convention) cfg.sum_convention = cfmc::parse_sum_convention(*a.sum_convention);
    if (a.split_sample) cfg.split_sample = true;
    cfg.validate();
    return cfg;
}

int simulate(const SimulateArgs& a)
{
    const auto cfg = resolve(a);
    const std::size_t workers = a.workers ? *a.workers : cfmc::default_workers();
    std::filesystem::create_directories(a.out);
    const std::string cdf_path = (std::filesystem::path(a.out) / "cdf.csv").string();
    const std::string report_path = (std::filesystem::path(a.out) / "report.json").string();

    cfmc::ProgressCallback progress;
    if (!a.quiet)
        progress = [](std::size_t done, std::size_t total) {
            std::fprintf(stderr, "\rsnapshot %zu/%zu", done, total);
            if (done == total)
                std::fputc('\n', stderr);
        };

    try {
        const auto result = cfmc::run_campaign(cfg, workers, progress);
        cfmc::write_cdf_csv(cdf_path, result.cdf);
        cfmc::write_report_json(report_path, result);
        if (!a.quiet)
            std::fprintf(stderr, "wrote %s and %s (%.1f s)\n", cdf_path.c_str(), report_path.c_str(),
                         result.wall_seconds);
        return 0;
    } catch (const cfmc::CampaignFailure& e) {
        if (!a.quiet)
            std::fputc('\n', stderr);
        cfmc::write_report_json(report_path, e.partial(), std::string(e.what()));
        std::fprintf(stderr, "error: %s\npartial results in %s\n", e.what(), report_path.c_str());
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Subgroup-centric multicast simulator for cell-free massive MIMO"};
    app.require_subcommand(1);

    SimulateArgs args;
    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo campaign");
    auto* preset_opt = sim->add_option("--preset", args.preset, "Named parameter set")
                           ->check(CLI::IsMember(cfmc::preset_names()));
    auto* config_opt = sim->add_option("--config", args.config, "JSON config file")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    sim->add_option("--mode", args.mode, "unicast | single | subgroup");
    sim->add_option("--precoder", args.precoder, "ipmmse | cb");
    sim->add_option("--groups,-G", args.groups, "Number of subgroups in subgroup mode");
    sim->add_option("--snapshots", args.snapshots, "Large-scale snapshots");
    sim->add_option("--realizations", args.realizations, "Small-scale realizations per snapshot");
    sim->add_option("--seed", args.seed, "Master seed");
    sim->add_option("--workers,-j", args.workers, "Worker threads (default: CFMC_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    sim->add_option("--sum-convention", args.sum_convention, "per_user | per_group");
    sim->add_flag("--split-sample", args.split_sample, "Normalize IP-MMSE on an independent sample");
    sim->add_option("--out,-o", args.out, "Output directory")->capture_default_str();
    sim->add_flag("--quiet,-q", args.quiet, "No progress output");

    std::string show_name;
    auto* show = app.add_subcommand("preset", "Print a preset as JSON");
    show->add_option("name", show_name, "Preset name")->required()->check(CLI::IsMember(cfmc::preset_names()));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*show) {
            std::cout << cfmc::config_to_json(cfmc::preset(show_name)) << '\n';
            return 0;
        }
        if (args.preset.empty() && args.config.empty())
            throw cfmc::InvalidConfig("one of --preset or --config is required");
        return simulate(args);
    } catch (const cfmc::InvalidConfig& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
