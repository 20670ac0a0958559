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

#include <optional>
#include <span>
#include <vector>

#include "cfmc/grouping.hpp"
#include "cfmc/types.hpp"

namespace cfmc {

/// Pilot assignment and dynamic cooperation clusters for G subgroups.
///
/// All index sets are sorted ascending. `serving_aps[g]` is L_g,
/// `served_groups[l]` is D_l, `cohort[g]` lists every group holding
/// pilot_of[g] (g included) and `s_sets[g]` is {c : L_g and L_c intersect}.
struct PilotPlan {
    std::size_t tau_p = 0;
    std::vector<std::size_t> pilot_of;
    std::vector<IndexSet> serving_aps;
    std::vector<IndexSet> served_groups;
    std::vector<std::size_t> master_ap;
    /// True for groups that won no AP in the per-pilot selection and are
    /// served by their master AP only.
    std::vector<bool> rescued;
    std::vector<IndexSet> cohort;
    std::vector<IndexSet> s_sets;

    std::size_t num_groups() const { return pilot_of.size(); }
    std::size_t num_aps() const { return served_groups.size(); }
    bool serves(std::size_t l, std::size_t g) const;
};

/// (1/K_g) * sum_{k in K_g} beta(l, k).
double mean_group_gain(const RMatrix& beta, const IndexSet& members, std::size_t l);

/// Sum of beta(l, k) over members of groups c != g that already hold `pilot`.
/// `pilot_so_far[c]` is empty for groups without a pilot yet.
double pilot_interference(const RMatrix& beta,
                          const GroupAssignment& groups,
                          std::span<const std::optional<std::size_t>> pilot_so_far,
                          std::size_t l,
                          std::size_t pilot,
                          std::size_t g);

/// Greedy pilot assignment followed by per-pilot AP selection and master-AP
/// rescue of unserved groups. Ties in every argmax/argmin go to the lowest index.
PilotPlan assign_pilots_and_cluster(const RMatrix& beta, const GroupAssignment& groups, std::size_t tau_p);

}  // namespace cfmc
