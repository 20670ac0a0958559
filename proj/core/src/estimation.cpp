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

#include "cfmc/estimation.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "cfmc/error.hpp"

namespace cfmc {

namespace {

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace

CMatrix composite_covariance(const CovarianceField& field,
                             std::size_t l,
                             const IndexSet& members,
                             const EstimationParams& params)
{
    if (members.empty())
        throw InvalidInput("composite_covariance: empty group");
    const auto N = static_cast<Eigen::Index>(field.antennas());
    CMatrix sum = CMatrix::Zero(N, N);
    for (std::size_t k : members)
        sum += field.matrix(l, k);
    const double kg = static_cast<double>(members.size());
    return (params.pilot_energy() / (kg * kg)) * sum;
}

CMatrix gamma_matrix(const CovarianceField& field,
                     std::size_t l,
                     const GroupAssignment& groups,
                     const IndexSet& cohort,
                     const EstimationParams& params)
{
    const auto N = static_cast<Eigen::Index>(field.antennas());
    CMatrix sum = CMatrix::Zero(N, N);
    for (std::size_t c : cohort)
        for (std::size_t i : groups.members[c])
            sum += field.matrix(l, i);
    CMatrix out = params.pilot_energy() * sum;
    out.diagonal().array() += params.noise_power;
    return out;
}

CompositeStats compute_composite_stats(const CovarianceField& field,
                                       const GroupAssignment& groups,
                                       const PilotPlan& plan,
                                       const EstimationParams& params)
{
    const std::size_t L = field.num_aps();
    const std::size_t G = groups.num_groups();
    if (plan.num_groups() != G || plan.num_aps() != L)
        throw InvalidInput("compute_composite_stats: plan does not match groups/deployment");
    if (plan.tau_p != params.tau_p)
        throw InvalidInput("compute_composite_stats: plan tau_p differs from estimation tau_p");

    CompositeStats s;
    s.num_aps_ = L;
    s.num_groups_ = G;
    s.tau_p_ = plan.tau_p;
    s.pilot_of_ = plan.pilot_of;
    s.gamma_.resize(L * plan.tau_p);
    s.r_comp_.resize(L * G);
    s.est_cov_.resize(L * G);
    s.err_cov_.resize(L * G);
    s.filter_.resize(L * G);

    std::vector<IndexSet> holders(plan.tau_p);
    for (std::size_t g = 0; g < G; ++g)
        holders[plan.pilot_of[g]].push_back(g);

    const auto N = static_cast<Eigen::Index>(field.antennas());
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t t = 0; t < plan.tau_p; ++t) {
            if (holders[t].empty()) {
                s.gamma_[l * plan.tau_p + t] = params.noise_power * CMatrix::Identity(N, N);
                continue;
            }
            const CMatrix gamma = gamma_matrix(field, l, groups, holders[t], params);
            Eigen::LLT<CMatrix> llt(gamma);
            if (llt.info() != Eigen::Success)
                throw NumericalError("Gamma not positive definite at AP " + std::to_string(l));

            for (std::size_t g : holders[t]) {
                const std::size_t i = l * G + g;
                const double kg = static_cast<double>(groups.size(g));
                CMatrix r = composite_covariance(field, l, groups.members[g], params);
                const CMatrix gamma_inv_r = llt.solve(r);   // Gamma^-1 R
                s.filter_[i] = kg * gamma_inv_r.adjoint();  // K_g R Gamma^-1
                s.est_cov_[i] = hermitian_part(kg * kg * r * gamma_inv_r);
                s.err_cov_[i] = r - s.est_cov_[i];
                s.r_comp_[i] = std::move(r);
            }
            s.gamma_[l * plan.tau_p + t] = gamma;
        }
    }
    return s;
}

PilotObservation project_pilots(const ChannelRealization& channels,
                                const GroupAssignment& groups,
                                const PilotPlan& plan,
                                const EstimationParams& params,
                                const CMatrix& noise)
{
    const std::size_t L = channels.num_aps;
    const auto N = channels.h.rows();
    if (noise.rows() != N || noise.cols() != static_cast<Eigen::Index>(L * plan.tau_p))
        throw InvalidInput("project_pilots: noise must be N x (L * tau_p)");

    PilotObservation obs;
    obs.num_aps = L;
    obs.tau_p = plan.tau_p;
    obs.y = noise;
    const double amp = std::sqrt(params.pilot_energy());
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t g = 0; g < groups.num_groups(); ++g) {
            auto col = obs.y.col(static_cast<Eigen::Index>(l * plan.tau_p + plan.pilot_of[g]));
            for (std::size_t k : groups.members[g])
                col += amp * channels.link(l, k);
        }
    return obs;
}

PilotObservation project_pilots(const ChannelRealization& channels,
                                const GroupAssignment& groups,
                                const PilotPlan& plan,
                                const EstimationParams& params,
                                Rng& rng)
{
    const auto N = channels.h.rows();
    const auto cols = static_cast<Eigen::Index>(channels.num_aps * plan.tau_p);
    CMatrix noise(N, cols);
    ComplexNormal cn;
    const double sigma = std::sqrt(params.noise_power);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index n = 0; n < N; ++n)
            noise(n, c) = sigma * cn(rng);
    return project_pilots(channels, groups, plan, params, noise);
}

std::vector<PilotObservation> project_pilots(const ChannelBatch& batch,
                                             const GroupAssignment& groups,
                                             const PilotPlan& plan,
                                             const EstimationParams& params,
                                             std::uint64_t seed)
{
    std::vector<PilotObservation> out;
    out.reserve(batch.size());
    for (std::size_t t = 0; t < batch.size(); ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        out.push_back(project_pilots(batch.realizations[t], groups, plan, params, rng));
    }
    return out;
}

CVector mmse_composite_estimate(const CVector& y, const CMatrix& r_comp, const CMatrix& gamma,
                                std::size_t group_size)
{
    Eigen::LLT<CMatrix> llt(gamma);
    if (llt.info() != Eigen::Success)
        throw NumericalError("mmse_composite_estimate: Gamma is not positive definite");
    return static_cast<double>(group_size) * (r_comp * llt.solve(y));
}

EstimateMask serving_mask(const PilotPlan& plan)
{
    const std::size_t G = plan.num_groups();
    EstimateMask mask(plan.num_aps() * G, 0);
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t l : plan.serving_aps[g])
            mask[l * G + g] = 1;
    return mask;
}

CompositeEstimates estimate_composite(const PilotObservation& obs,
                                      const CompositeStats& stats,
                                      const PilotPlan& plan,
                                      const EstimateMask& mask)
{
    const std::size_t L = stats.num_aps();
    const std::size_t G = stats.num_groups();
    if (!mask.empty() && mask.size() != L * G)
        throw InvalidInput("estimate_composite: mask must have L * G entries");

    CompositeEstimates est;
    est.num_aps = L;
    est.num_groups = G;
    est.h = CMatrix::Zero(obs.y.rows(), static_cast<Eigen::Index>(L * G));
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t g = 0; g < G; ++g) {
            if (!mask.empty() && !mask[l * G + g])
                continue;
            est.h.col(static_cast<Eigen::Index>(l * G + g)).noalias() =
                stats.filter(l, g) * obs.for_group(l, g, plan);
        }
    return est;
}

}  // namespace cfmc
