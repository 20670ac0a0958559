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

#include "cfmc/pilots.hpp"

#include <algorithm>
#include <string>

#include "cfmc/error.hpp"

namespace cfmc {

bool PilotPlan::serves(std::size_t l, std::size_t g) const
{
    const auto& aps = serving_aps[g];
    return std::binary_search(aps.begin(), aps.end(), l);
}

double mean_group_gain(const RMatrix& beta, const IndexSet& members, std::size_t l)
{
    double sum = 0.0;
    for (std::size_t k : members)
        sum += beta(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
    return sum / static_cast<double>(members.size());
}

double pilot_interference(const RMatrix& beta,
                          const GroupAssignment& groups,
                          std::span<const std::optional<std::size_t>> pilot_so_far,
                          std::size_t l,
                          std::size_t pilot,
                          std::size_t g)
{
    double sum = 0.0;
    for (std::size_t c = 0; c < groups.num_groups(); ++c) {
        if (c == g || !pilot_so_far[c] || *pilot_so_far[c] != pilot)
            continue;
        for (std::size_t k : groups.members[c])
            sum += beta(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
    }
    return sum;
}

PilotPlan assign_pilots_and_cluster(const RMatrix& beta, const GroupAssignment& groups, std::size_t tau_p)
{
    if (tau_p == 0)
        throw InvalidConfig("assign_pilots_and_cluster: tau_p must be at least 1");
    for (std::size_t g = 0; g < groups.num_groups(); ++g)
        if (groups.members[g].empty())
            throw InvalidInput("assign_pilots_and_cluster: group " + std::to_string(g) + " is empty");
    if (static_cast<std::size_t>(beta.cols()) != groups.num_ms())
        throw InvalidInput("assign_pilots_and_cluster: beta has wrong number of columns");

    const std::size_t L = static_cast<std::size_t>(beta.rows());
    const std::size_t G = groups.num_groups();
    if (L == 0)
        throw InvalidInput("assign_pilots_and_cluster: no APs");

    RMatrix common_gain(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(G));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t g = 0; g < G; ++g)
            common_gain(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(g)) =
                mean_group_gain(beta, groups.members[g], l);

    PilotPlan plan;
    plan.tau_p = tau_p;
    plan.master_ap.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        Eigen::Index best = 0;
        common_gain.col(static_cast<Eigen::Index>(g)).maxCoeff(&best);
        plan.master_ap[g] = static_cast<std::size_t>(best);
    }

    // Step 1: orthogonal pilots for the first tau_p groups, then the least
    // contaminated pilot at each later group's strongest AP.
    std::vector<std::optional<std::size_t>> pilot(G);
    for (std::size_t g = 0; g < std::min(G, tau_p); ++g)
        pilot[g] = g;
    for (std::size_t g = tau_p; g < G; ++g) {
        const std::size_t l = plan.master_ap[g];
        std::size_t best_pilot = 0;
        double best_interference = 0.0;
        for (std::size_t t = 0; t < tau_p; ++t) {
            const double interference = pilot_interference(beta, groups, pilot, l, t, g);
            if (t == 0 || interference < best_interference) {
                best_interference = interference;
                best_pilot = t;
            }
        }
        pilot[g] = best_pilot;
    }
    plan.pilot_of.resize(G);
    for (std::size_t g = 0; g < G; ++g)
        plan.pilot_of[g] = *pilot[g];

    std::vector<IndexSet> holders(tau_p);
    for (std::size_t g = 0; g < G; ++g)
        holders[plan.pilot_of[g]].push_back(g);

    // Step 2: every AP serves, per pilot in use, the holder with the largest
    // common average gain.
    plan.serving_aps.assign(G, {});
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t t = 0; t < tau_p; ++t) {
            if (holders[t].empty())
                continue;
            std::size_t chosen = holders[t].front();
            double best = common_gain(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(chosen));
            for (std::size_t c : holders[t]) {
                const double v = common_gain(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(c));
                if (v > best) {
                    best = v;
                    chosen = c;
                }
            }
            plan.serving_aps[chosen].push_back(l);
        }
    }

    // Step 3: nobody left unserved.
    plan.rescued.assign(G, false);
    for (std::size_t g = 0; g < G; ++g) {
        if (plan.serving_aps[g].empty()) {
            plan.serving_aps[g].push_back(plan.master_ap[g]);
            plan.rescued[g] = true;
        }
    }

    plan.served_groups.assign(L, {});
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t l : plan.serving_aps[g])
            plan.served_groups[l].push_back(g);

    plan.cohort.resize(G);
    for (std::size_t g = 0; g < G; ++g)
        plan.cohort[g] = holders[plan.pilot_of[g]];

    plan.s_sets.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        IndexSet s;
        for (std::size_t l : plan.serving_aps[g])
            s.insert(s.end(), plan.served_groups[l].begin(), plan.served_groups[l].end());
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        plan.s_sets[g] = std::move(s);
    }
    return plan;
}

}  // namespace cfmc
