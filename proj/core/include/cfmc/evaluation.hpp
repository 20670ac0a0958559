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

#include <span>
#include <string_view>
#include <vector>

#include "cfmc/covariance.hpp"
#include "cfmc/grouping.hpp"
#include "cfmc/pilots.hpp"
#include "cfmc/types.hpp"

namespace cfmc {

enum class SumConvention {
    /// sum_g K_g SE_g: every MS counts its group's rate.
    per_user,
    /// sum_g SE_g: one rate per multicast stream.
    per_group,
};

std::string_view to_string(SumConvention convention);
SumConvention parse_sum_convention(std::string_view text);

/// Hardening-bound SINR ingredients per MS.
struct SinrTerms {
    std::vector<double> desired;   // |E{a_kg}|^2
    std::vector<double> received;  // sum_c E{|a_kc|^2}
    std::vector<double> sinr;
    double noise_power = 0.0;
    /// MSs whose interference estimate came out negative and was clamped to 0.
    std::size_t clamped = 0;
};

/// Streams realizations and accumulates a_kc(t) = sum_{l in L_c} h_lk^H w_lc(t).
///
/// Precoders are passed stacked over L_c (N entries per serving AP, in the
/// order of plan.serving_aps[c]). A per-group scale applied at finalize()
/// lets callers accumulate unnormalized directions.
class SinrAccumulator {
public:
    SinrAccumulator(const GroupAssignment& groups, const PilotPlan& plan);

    void add(const ChannelRealization& channels, std::span<const CVector> precoders);

    /// `group_scale` empty means all ones.
    SinrTerms finalize(double noise_power, std::span<const double> group_scale = {}) const;

    std::size_t realizations() const { return count_; }

private:
    const GroupAssignment* groups_;
    const PilotPlan* plan_;
    std::size_t count_ = 0;
    CMatrix sum_;    // K x G, sum_t a_kc(t)
    RMatrix power_;  // K x G, sum_t |a_kc(t)|^2
};

/// Batch form: precoders[t][c] is group c's stacked precoder at realization t.
SinrTerms sinr_terms(const ChannelBatch& channels,
                     const std::vector<std::vector<CVector>>& precoders,
                     const GroupAssignment& groups,
                     const PilotPlan& plan,
                     double noise_power);

/// (1 - tau_p / tau_c) log2(1 + gamma).
double se_user(double gamma, std::size_t tau_p, std::size_t tau_c);

/// Minimum SE over the members of a group.
double se_group(std::span<const double> se_values, const IndexSet& members);

struct SeReport {
    std::vector<double> sinr;
    std::vector<double> se_user;
    std::vector<double> se_group;
    double sum_se_per_user = 0.0;
    double sum_se_per_group = 0.0;
    double prelog = 0.0;
    std::size_t clamped = 0;
};

SeReport build_report(const SinrTerms& terms, const GroupAssignment& groups, std::size_t tau_p, std::size_t tau_c);

double sum_se(const SeReport& report, SumConvention convention);

}  // namespace cfmc
