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

#include "cfmc/estimation.hpp"
#include "cfmc/grouping.hpp"
#include "cfmc/pilots.hpp"
#include "cfmc/types.hpp"

namespace cfmc {

enum class PrecoderKind { ipmmse, cb };

std::string_view to_string(PrecoderKind kind);
PrecoderKind parse_precoder_kind(std::string_view text);

/// How omega_g enters the centralized fractional power control.
enum class OmegaMode {
    /// Largest per-AP fraction of the group's precoder power (max share).
    fraction,
    /// Largest per-AP mean squared norm of the unnormalized direction.
    literal,
};

std::string_view to_string(OmegaMode mode);
OmegaMode parse_omega_mode(std::string_view text);

// ---------- centralized IP-MMSE ----------

/// Solves (sum_c w_c v_c v_c^H + Z + sigma^2 I) x = v_self and returns scale * x.
/// `cohort` holds the masked stacked estimates v_c, `weights` the w_c, and
/// `self` indexes the served group's own vector in `cohort`.
CVector ipmmse_direction(std::span<const CVector> cohort,
                         std::span<const double> weights,
                         std::size_t self,
                         const CMatrix& regularizer,
                         double noise_power,
                         double scale);

/// Per-snapshot IP-MMSE designer: caches each group's serving APs, S_g and
/// the deterministic regularizer Z_{S_g} (block-diagonal over L_g).
class IpmmseDesigner {
public:
    IpmmseDesigner(const CompositeStats& stats,
                   const GroupAssignment& groups,
                   const PilotPlan& plan,
                   const EstimationParams& params,
                   std::span<const double> virtual_power);

    /// Estimates the designer reads: (l, c) for every l in L_g with c in S_g.
    const EstimateMask& required_estimates() const { return required_; }

    std::size_t num_groups() const { return aps_.size(); }
    const IndexSet& aps(std::size_t g) const { return aps_[g]; }
    std::size_t dimension(std::size_t g) const { return aps_[g].size() * antennas_; }
    const CMatrix& regularizer(std::size_t g) const { return regularizer_[g]; }

    /// Stacked estimates of group c over the serving APs of g.
    CVector masked_estimate(std::size_t g, std::size_t c, const CompositeEstimates& est) const;

    /// Unnormalized direction w_bar_g, stacked over L_g (dimension L_g * N).
    CVector direction(std::size_t g, const CompositeEstimates& est) const;

private:
    const PilotPlan* plan_ = nullptr;
    std::size_t antennas_ = 0;
    double noise_power_ = 0.0;
    std::vector<IndexSet> aps_;
    std::vector<double> weight_;   // p_c K_c^2 / (tau_p P_p)
    std::vector<double> scale_;    // sqrt(p_g / (tau_p P_p)) K_g
    std::vector<CMatrix> regularizer_;
    EstimateMask required_;
};

/// max_l E{||w_bar_lg||^2} / sum_l E{||w_bar_lg||^2}.
double omega(std::span<const double> per_ap_norms);

/// max_l E{||w_bar_lg||^2}.
double omega_literal(std::span<const double> per_ap_norms);

/// Inter-subgroup fractional power control:
/// rho_g = P_dl T_g^nu omega_g^-kappa / max_{l in L_g} sum_{c in D_l} T_c^nu omega_c^(1-kappa),
/// with T_g = sum_{l in L_g} tr(R_l^g).
std::vector<double> fractional_power_centralized(std::span<const double> group_traces,
                                                 std::span<const double> omegas,
                                                 double nu,
                                                 double kappa,
                                                 double max_ap_power,
                                                 const PilotPlan& plan);

/// T_g = sum_{l in L_g} tr(R_l^g) for every group.
std::vector<double> serving_traces(const CompositeStats& stats, const PilotPlan& plan);

/// w_g(t) = sqrt(rho) w_bar_g(t) / sqrt(mean_t ||w_bar_g(t)||^2).
std::vector<CVector> normalize_centralized(std::span<const CVector> directions, double rho);

/// Result of the centralized power stage for one snapshot.
struct CentralizedPower {
    std::vector<double> rho;
    std::vector<double> omega;
    std::vector<double> norm;                     // E{||w_bar_g||^2}
    std::vector<std::vector<double>> ap_norm;     // E{||w_bar_lg||^2}, l over L_g
};

CentralizedPower centralized_power(std::vector<std::vector<double>> ap_norms,
                                   std::span<const double> group_traces,
                                   double nu,
                                   double kappa,
                                   double max_ap_power,
                                   const PilotPlan& plan,
                                   OmegaMode mode);

/// Average transmit power of every AP under a centralized allocation.
std::vector<double> centralized_ap_power(const CentralizedPower& power, const PilotPlan& plan);

// ---------- distributed CB ----------

/// w_lg = sqrt(rho_lg) h_hat / sqrt(closed_form_norm), closed_form_norm = K_g^2 tr(R Gamma^-1 R).
CVector cb_precoder(const CVector& estimate, double rho, double closed_form_norm);

/// rho_lg = P_dl tr(R_l^g)^nu / sum_{c in D_l} tr(R_l^c)^nu over the groups of one AP.
std::vector<double> apa_power(std::span<const double> traces, double nu, double max_ap_power);

/// L x G matrix of rho_lg (zero where g is not in D_l).
RMatrix distributed_power(const CompositeStats& stats, const PilotPlan& plan, double nu, double max_ap_power);

}  // namespace cfmc
