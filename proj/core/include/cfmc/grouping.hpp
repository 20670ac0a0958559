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
#include <string_view>
#include <vector>

#include "cfmc/types.hpp"

namespace cfmc {

/// Partition of the K multicast MSs into G non-empty subgroups.
/// Groups are numbered 0..G-1 in order of their smallest member index.
struct GroupAssignment {
    std::vector<std::size_t> group_of;
    std::vector<IndexSet> members;

    std::size_t num_groups() const { return members.size(); }
    std::size_t num_ms() const { return group_of.size(); }
    std::size_t size(std::size_t g) const { return members[g].size(); }

    /// Builds members from labels, relabelling groups canonically.
    static GroupAssignment from_labels(const std::vector<std::size_t>& labels);

    /// Throws InvalidInput unless members partitions {0..K-1} into non-empty sets.
    void validate() const;
};

enum class TransmissionMode { unicast, single, subgroup };

std::string_view to_string(TransmissionMode mode);
TransmissionMode parse_transmission_mode(std::string_view text);

struct KMeansOptions {
    std::size_t max_iters = 100;
    std::size_t restarts = 50;
};

/// State after one Lloyd iteration, for instrumentation.
struct LloydStep {
    std::size_t restart = 0;
    std::size_t iteration = 0;
    double objective = 0.0;
    const std::vector<std::size_t>& labels;
};

using LloydObserver = std::function<void(const LloydStep&)>;

/// K-means over dB large-scale gain vectors (one L-dimensional feature per MS).
/// k-means++ seeding, best of `restarts` runs by within-cluster sum of squares.
GroupAssignment kmeans_subgroups(const RMatrix& beta,
                                 std::size_t num_groups,
                                 const KMeansOptions& options,
                                 std::uint64_t seed,
                                 const LloydObserver& observer = {});

/// unicast: K singletons; single: one group of K; subgroup: K-means with G groups.
GroupAssignment make_plan(TransmissionMode mode,
                          std::size_t num_groups,
                          const RMatrix& beta,
                          const KMeansOptions& options,
                          std::uint64_t seed);

}  // namespace cfmc
