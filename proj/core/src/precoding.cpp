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

#include "cfmc/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>

#include "cfmc/error.hpp"

namespace cfmc {

std::string_view to_string(PrecoderKind kind)
{
    return kind == PrecoderKind::ipmmse ? "ipmmse" : "cb";
}

PrecoderKind parse_precoder_kind(std::string_view text)
{
    if (text == "ipmmse") return PrecoderKind::ipmmse;
    if (text == "cb") return PrecoderKind::cb;
    throw InvalidConfig("unknown precoder '" + std::string(text) + "' (ipmmse|cb)");
}

std::string_view to_string(OmegaMode mode)
{
    return mode == OmegaMode::fraction ? "fraction" : "literal";
}

OmegaMode parse_omega_mode(std::string_view text)
{
    if (text == "fraction") return OmegaMode::fraction;
    if (text == "literal") return OmegaMode::literal;
    throw InvalidConfig("unknown omega mode '" + std::string(text) + "' (fraction|literal)");
}

CVector ipmmse_direction(std::span<const CVector> cohort,
                         std::span<const double> weights,
                         std::size_t self,
                         const CMatrix& regularizer,
                         double noise_power,
                         double scale)
{
    if (cohort.size() != weights.size() || self >= cohort.size())
        throw InvalidInput("ipmmse_direction: cohort/weights mismatch");
    const Eigen::Index d = regularizer.rows();
    CMatrix system = regularizer;
    system.diagonal().array() += noise_power;
    for (std::size_t c = 0; c < cohort.size(); ++c) {
        if (cohort[c].size() != d)
            throw InvalidInput("ipmmse_direction: estimate dimension mismatch");
        system.noalias() += weights[c] * cohort[c] * cohort[c].adjoint();
    }
    Eigen::LLT<CMatrix> llt(system);
    if (llt.info() != Eigen::Success)
        throw NumericalError("ipmmse_direction: system matrix is not positive definite");
    return scale * llt.solve(cohort[self]);
}

IpmmseDesigner::IpmmseDesigner(const CompositeStats& stats,
                               const GroupAssignment& groups,
                               const PilotPlan& plan,
                               const EstimationParams& params,
                               std::span<const double> virtual_power)
    : plan_(&plan), noise_power_(params.noise_power)
{
    const std::size_t G = groups.num_groups();
    const std::size_t L = stats.num_aps();
    if (virtual_power.size() != G)
        throw InvalidInput("IpmmseDesigner: one virtual UL power per group required");
    if (L == 0 || G == 0)
        throw InvalidInput("IpmmseDesigner: empty network");
    antennas_ = static_cast<std::size_t>(stats.r_comp(0, 0).rows());

    const double energy = params.pilot_energy();
    weight_.resize(G);
    scale_.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        const double kg = static_cast<double>(groups.size(g));
        weight_[g] = virtual_power[g] * kg * kg / energy;
        scale_[g] = std::sqrt(virtual_power[g] / energy) * kg;
    }

    aps_ = plan.serving_aps;
    required_.assign(L * G, 0);
    regularizer_.resize(G);
    const auto N = static_cast<Eigen::Index>(antennas_);
    std::vector<char> in_s(G);
    for (std::size_t g = 0; g < G; ++g) {
        std::fill(in_s.begin(), in_s.end(), 0);
        for (std::size_t c : plan.s_sets[g])
            in_s[c] = 1;

        const auto d = static_cast<Eigen::Index>(dimension(g));
        CMatrix z = CMatrix::Zero(d, d);
        for (std::size_t i = 0; i < aps_[g].size(); ++i) {
            const std::size_t l = aps_[g][i];
            auto block = z.block(static_cast<Eigen::Index>(i) * N, static_cast<Eigen::Index>(i) * N, N, N);
            for (std::size_t c = 0; c < G; ++c)
                block += weight_[c] * (in_s[c] ? stats.err_cov(l, c) : stats.r_comp(l, c));
            for (std::size_t c : plan.s_sets[g])
                required_[l * G + c] = 1;
        }
        regularizer_[g] = std::move(z);
    }
}

CVector IpmmseDesigner::masked_estimate(std::size_t g, std::size_t c, const CompositeEstimates& est) const
{
    const auto N = static_cast<Eigen::Index>(antennas_);
    CVector v(static_cast<Eigen::Index>(dimension(g)));
    for (std::size_t i = 0; i < aps_[g].size(); ++i)
        v.segment(static_cast<Eigen::Index>(i) * N, N) = est.at(aps_[g][i], c);
    return v;
}

CVector IpmmseDesigner::direction(std::size_t g, const CompositeEstimates& est) const
{
    const IndexSet& s = plan_->s_sets[g];
    const auto d = static_cast<Eigen::Index>(dimension(g));
    CMatrix stacked(d, static_cast<Eigen::Index>(s.size()));
    Eigen::Index self = -1;
    for (std::size_t j = 0; j < s.size(); ++j) {
        stacked.col(static_cast<Eigen::Index>(j)) = std::sqrt(weight_[s[j]]) * masked_estimate(g, s[j], est);
        if (s[j] == g)
            self = static_cast<Eigen::Index>(j);
    }
    if (self < 0)
        throw InvalidInput("IpmmseDesigner: group missing from its own S_g");

    CMatrix system = regularizer_[g];
    system.diagonal().array() += noise_power_;
    system.noalias() += stacked * stacked.adjoint();
    Eigen::LLT<CMatrix> llt(system);
    if (llt.info() != Eigen::Success)
        throw NumericalError("IP-MMSE system matrix not positive definite for group " + std::to_string(g));
    return scale_[g] * llt.solve(masked_estimate(g, g, est));
}

double omega(std::span<const double> per_ap_norms)
{
    if (per_ap_norms.empty())
        throw InvalidStats("omega: no serving APs");
    const double total = std::accumulate(per_ap_norms.begin(), per_ap_norms.end(), 0.0);
    if (!(total > 0.0))
        throw InvalidStats("omega: zero total precoder norm");
    return *std::max_element(per_ap_norms.begin(), per_ap_norms.end()) / total;
}

double omega_literal(std::span<const double> per_ap_norms)
{
    if (per_ap_norms.empty())
        throw InvalidStats("omega: no serving APs");
    const double m = *std::max_element(per_ap_norms.begin(), per_ap_norms.end());
    if (!(m > 0.0))
        throw InvalidStats("omega: zero precoder norm");
    return m;
}

std::vector<double> fractional_power_centralized(std::span<const double> group_traces,
                                                 std::span<const double> omegas,
                                                 double nu,
                                                 double kappa,
                                                 double max_ap_power,
                                                 const PilotPlan& plan)
{
    const std::size_t G = plan.num_groups();
    if (group_traces.size() != G || omegas.size() != G)
        throw InvalidInput("fractional_power_centralized: one trace and one omega per group required");
    if (nu < -1.0 || nu > 1.0)
        throw InvalidConfig("fractional_power_centralized: nu must lie in [-1, 1]");
    if (kappa < 0.0 || kappa > 1.0)
        throw InvalidConfig("fractional_power_centralized: kappa must lie in [0, 1]");
    for (std::size_t g = 0; g < G; ++g) {
        if (!(omegas[g] > 0.0))
            throw InvalidStats("fractional_power_centralized: omega of group " + std::to_string(g) + " is zero");
        if (!(group_traces[g] > 0.0))
            throw InvalidStats("fractional_power_centralized: zero trace for group " + std::to_string(g));
    }

    // Load of every AP: sum over its groups of T_c^nu omega_c^(1-kappa).
    std::vector<double> load(plan.num_aps(), 0.0);
    for (std::size_t l = 0; l < plan.num_aps(); ++l)
        for (std::size_t c : plan.served_groups[l])
            load[l] += std::pow(group_traces[c], nu) * std::pow(omegas[c], 1.0 - kappa);

    std::vector<double> rho(G);
    for (std::size_t g = 0; g < G; ++g) {
        double worst = 0.0;
        for (std::size_t l : plan.serving_aps[g])
            worst = std::max(worst, load[l]);
        rho[g] = max_ap_power * std::pow(group_traces[g], nu) * std::pow(omegas[g], -kappa) / worst;
    }
    return rho;
}

std::vector<double> serving_traces(const CompositeStats& stats, const PilotPlan& plan)
{
    std::vector<double> traces(plan.num_groups(), 0.0);
    for (std::size_t g = 0; g < plan.num_groups(); ++g)
        for (std::size_t l : plan.serving_aps[g])
            traces[g] += stats.r_comp(l, g).trace().real();
    return traces;
}

std::vector<CVector> normalize_centralized(std::span<const CVector> directions, double rho)
{
    if (directions.size() < 2)
        throw InvalidStats("normalize_centralized: at least two realizations needed for the norm estimate");
    if (rho < 0.0)
        throw InvalidInput("normalize_centralized: negative power");
    double mean = 0.0;
    for (const auto& w : directions)
        mean += w.squaredNorm();
    mean /= static_cast<double>(directions.size());
    if (!(mean > 0.0))
        throw InvalidStats("normalize_centralized: zero norm estimate");
    const double scale = std::sqrt(rho / mean);
    std::vector<CVector> out;
    out.reserve(directions.size());
    for (const auto& w : directions)
        out.push_back(scale * w);
    return out;
}

CentralizedPower centralized_power(std::vector<std::vector<double>> ap_norms,
                                   std::span<const double> group_traces,
                                   double nu,
                                   double kappa,
                                   double max_ap_power,
                                   const PilotPlan& plan,
                                   OmegaMode mode)
{
    const std::size_t G = plan.num_groups();
    if (ap_norms.size() != G)
        throw InvalidInput("centralized_power: one norm vector per group required");
    CentralizedPower out;
    out.omega.resize(G);
    out.norm.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        if (ap_norms[g].size() != plan.serving_aps[g].size())
            throw InvalidInput("centralized_power: norm vector must cover L_g");
        out.norm[g] = std::accumulate(ap_norms[g].begin(), ap_norms[g].end(), 0.0);
        out.omega[g] = mode == OmegaMode::fraction ? omega(ap_norms[g]) : omega_literal(ap_norms[g]);
    }
    out.rho = fractional_power_centralized(group_traces, out.omega, nu, kappa, max_ap_power, plan);
    out.ap_norm = std::move(ap_norms);
    return out;
}

std::vector<double> centralized_ap_power(const CentralizedPower& power, const PilotPlan& plan)
{
    std::vector<double> p(plan.num_aps(), 0.0);
    for (std::size_t g = 0; g < plan.num_groups(); ++g)
        for (std::size_t i = 0; i < plan.serving_aps[g].size(); ++i)
            p[plan.serving_aps[g][i]] += power.rho[g] * power.ap_norm[g][i] / power.norm[g];
    return p;
}

CVector cb_precoder(const CVector& estimate, double rho, double closed_form_norm)
{
    if (!(closed_form_norm > 0.0))
        throw InvalidStats("cb_precoder: zero closed-form norm");
    if (rho < 0.0)
        throw InvalidInput("cb_precoder: negative power");
    return std::sqrt(rho / closed_form_norm) * estimate;
}

std::vector<double> apa_power(std::span<const double> traces, double nu, double max_ap_power)
{
    if (traces.empty())
        throw InvalidInput("apa_power: AP serves no group");
    std::vector<double> weight(traces.size());
    double total = 0.0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        weight[i] = std::pow(traces[i], nu);
        total += weight[i];
    }
    std::vector<double> rho(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i)
        rho[i] = max_ap_power * weight[i] / total;
    return rho;
}

RMatrix distributed_power(const CompositeStats& stats, const PilotPlan& plan, double nu, double max_ap_power)
{
    RMatrix rho = RMatrix::Zero(static_cast<Eigen::Index>(plan.num_aps()),
                                static_cast<Eigen::Index>(plan.num_groups()));
    for (std::size_t l = 0; l < plan.num_aps(); ++l) {
        const auto& served = plan.served_groups[l];
        if (served.empty())
            continue;
        std::vector<double> traces;
        traces.reserve(served.size());
        for (std::size_t g : served)
            traces.push_back(stats.r_comp(l, g).trace().real());
        const auto share = apa_power(traces, nu, max_ap_power);
        for (std::size_t i = 0; i < served.size(); ++i)
            rho(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(served[i])) = share[i];
    }
    return rho;
}

}  // namespace cfmc
