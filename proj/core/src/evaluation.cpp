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

#include "cfmc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfmc/error.hpp"

namespace cfmc {

std::string_view to_string(SumConvention convention)
{
    return convention == SumConvention::per_user ? "per_user" : "per_group";
}

SumConvention parse_sum_convention(std::string_view text)
{
    if (text == "per_user") return SumConvention::per_user;
    if (text == "per_group") return SumConvention::per_group;
    throw InvalidConfig("unknown sum convention '" + std::string(text) + "' (per_user|per_group)");
}

SinrAccumulator::SinrAccumulator(const GroupAssignment& groups, const PilotPlan& plan)
    : groups_(&groups), plan_(&plan)
{
    const auto K = static_cast<Eigen::Index>(groups.num_ms());
    const auto G = static_cast<Eigen::Index>(groups.num_groups());
    sum_ = CMatrix::Zero(K, G);
    power_ = RMatrix::Zero(K, G);
}

void SinrAccumulator::add(const ChannelRealization& channels, std::span<const CVector> precoders)
{
    const std::size_t G = groups_->num_groups();
    if (precoders.size() != G)
        throw InvalidInput("SinrAccumulator::add: one precoder per group required");
    const auto N = channels.h.rows();
    const auto K = static_cast<Eigen::Index>(groups_->num_ms());

    CVector a(K);
    for (std::size_t c = 0; c < G; ++c) {
        const auto& aps = plan_->serving_aps[c];
        if (precoders[c].size() != static_cast<Eigen::Index>(aps.size()) * N)
            throw InvalidInput("SinrAccumulator::add: precoder of group " + std::to_string(c) +
                               " has wrong dimension");
        a.setZero();
        for (std::size_t i = 0; i < aps.size(); ++i)
            a.noalias() += channels.ap_block(aps[i]).adjoint() * precoders[c].segment(static_cast<Eigen::Index>(i) * N, N);
        sum_.col(static_cast<Eigen::Index>(c)) += a;
        power_.col(static_cast<Eigen::Index>(c)) += a.cwiseAbs2();
    }
    ++count_;
}

SinrTerms SinrAccumulator::finalize(double noise_power, std::span<const double> group_scale) const
{
    if (count_ == 0)
        throw InvalidStats("SinrAccumulator: no realizations");
    const std::size_t G = groups_->num_groups();
    const std::size_t K = groups_->num_ms();
    if (!group_scale.empty() && group_scale.size() != G)
        throw InvalidInput("SinrAccumulator::finalize: one scale per group required");

    const double inv_t = 1.0 / static_cast<double>(count_);
    SinrTerms out;
    out.noise_power = noise_power;
    out.desired.resize(K);
    out.received.resize(K);
    out.sinr.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        double received = 0.0;
        for (std::size_t c = 0; c < G; ++c) {
            const double s = group_scale.empty() ? 1.0 : group_scale[c];
            received += s * s * power_(ki, static_cast<Eigen::Index>(c)) * inv_t;
        }
        const std::size_t g = groups_->group_of[k];
        const double s = group_scale.empty() ? 1.0 : group_scale[g];
        const double desired = std::norm(s * sum_(ki, static_cast<Eigen::Index>(g)) * inv_t);

        double interference = received - desired;
        if (interference < 0.0) {
            interference = 0.0;
            ++out.clamped;
        }
        out.desired[k] = desired;
        out.received[k] = received;
        out.sinr[k] = desired / (interference + noise_power);
    }
    return out;
}

SinrTerms sinr_terms(const ChannelBatch& channels,
                     const std::vector<std::vector<CVector>>& precoders,
                     const GroupAssignment& groups,
                     const PilotPlan& plan,
                     double noise_power)
{
    if (precoders.size() != channels.size())
        throw InvalidInput("sinr_terms: channels and precoders must share realization indices");
    SinrAccumulator acc(groups, plan);
    for (std::size_t t = 0; t < channels.size(); ++t)
        acc.add(channels.realizations[t], precoders[t]);
    return acc.finalize(noise_power);
}

double se_user(double gamma, std::size_t tau_p, std::size_t tau_c)
{
    if (tau_p >= tau_c)
        throw InvalidConfig("se_user: tau_p must be smaller than tau_c");
    if (gamma < 0.0)
        throw InvalidInput("se_user: negative SINR");
    const double prelog = 1.0 - static_cast<double>(tau_p) / static_cast<double>(tau_c);
    return prelog * std::log2(1.0 + gamma);
}

double se_group(std::span<const double> se_values, const IndexSet& members)
{
    if (members.empty())
        throw InvalidInput("se_group: empty group");
    double m = se_values[members.front()];
    for (std::size_t k : members)
        m = std::min(m, se_values[k]);
    return m;
}

SeReport build_report(const SinrTerms& terms, const GroupAssignment& groups, std::size_t tau_p, std::size_t tau_c)
{
    SeReport r;
    r.prelog = 1.0 - static_cast<double>(tau_p) / static_cast<double>(tau_c);
    r.sinr = terms.sinr;
    r.clamped = terms.clamped;
    r.se_user.resize(terms.sinr.size());
    for (std::size_t k = 0; k < terms.sinr.size(); ++k)
        r.se_user[k] = se_user(terms.sinr[k], tau_p, tau_c);
    r.se_group.resize(groups.num_groups());
    for (std::size_t g = 0; g < groups.num_groups(); ++g) {
        r.se_group[g] = se_group(r.se_user, groups.members[g]);
        r.sum_se_per_user += static_cast<double>(groups.size(g)) * r.se_group[g];
        r.sum_se_per_group += r.se_group[g];
    }
    return r;
}

double sum_se(const SeReport& report, SumConvention convention)
{
    return convention == SumConvention::per_user ? report.sum_se_per_user : report.sum_se_per_group;
}

}  // namespace cfmc
