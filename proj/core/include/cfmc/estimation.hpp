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
#include <span>
#include <vector>

#include "cfmc/covariance.hpp"
#include "cfmc/grouping.hpp"
#include "cfmc/pilots.hpp"
#include "cfmc/rng.hpp"
#include "cfmc/types.hpp"

namespace cfmc {

struct EstimationParams {
    std::size_t tau_p = 20;
    double pilot_power = 0.1;   // P_p, W
    double noise_power = 0.0;   // sigma_u^2, W

    double pilot_energy() const { return static_cast<double>(tau_p) * pilot_power; }
};

/// R_l^g = (tau_p P_p / K_g^2) * sum_{k in K_g} R_lk.
CMatrix composite_covariance(const CovarianceField& field,
                             std::size_t l,
                             const IndexSet& members,
                             const EstimationParams& params);

/// Gamma = tau_p P_p * sum over cohort groups c and members i of R_li, plus sigma_u^2 I.
CMatrix gamma_matrix(const CovarianceField& field,
                     std::size_t l,
                     const GroupAssignment& groups,
                     const IndexSet& cohort,
                     const EstimationParams& params);

/// Second-order statistics of every composite channel.
///
/// Stored for all (l, g), not only l in L_g: the centralized precoder needs
/// error covariances of cohort groups on APs that do not serve them.
class CompositeStats {
public:
    CompositeStats() = default;

    std::size_t num_aps() const { return num_aps_; }
    std::size_t num_groups() const { return num_groups_; }

    const CMatrix& r_comp(std::size_t l, std::size_t g) const { return r_comp_[idx(l, g)]; }
    const CMatrix& gamma(std::size_t l, std::size_t g) const { return gamma_[l * tau_p_ + pilot_of_[g]]; }
    /// K_g^2 R Gamma^-1 R: covariance of the estimate.
    const CMatrix& est_cov(std::size_t l, std::size_t g) const { return est_cov_[idx(l, g)]; }
    /// R - K_g^2 R Gamma^-1 R: covariance of the estimation error.
    const CMatrix& err_cov(std::size_t l, std::size_t g) const { return err_cov_[idx(l, g)]; }
    /// K_g R Gamma^-1, the linear estimator applied to y_l^g.
    const CMatrix& filter(std::size_t l, std::size_t g) const { return filter_[idx(l, g)]; }
    /// E{||h_hat_l^g||^2} = tr(est_cov).
    double estimate_power(std::size_t l, std::size_t g) const { return est_cov(l, g).trace().real(); }

    friend CompositeStats compute_composite_stats(const CovarianceField&, const GroupAssignment&,
                                                  const PilotPlan&, const EstimationParams&);

private:
    std::size_t idx(std::size_t l, std::size_t g) const { return l * num_groups_ + g; }

    std::size_t num_aps_ = 0;
    std::size_t num_groups_ = 0;
    std::size_t tau_p_ = 0;
    std::vector<std::size_t> pilot_of_;
    std::vector<CMatrix> r_comp_;
    std::vector<CMatrix> gamma_;
    std::vector<CMatrix> est_cov_;
    std::vector<CMatrix> err_cov_;
    std::vector<CMatrix> filter_;
};

CompositeStats compute_composite_stats(const CovarianceField& field,
                                       const GroupAssignment& groups,
                                       const PilotPlan& plan,
                                       const EstimationParams& params);

/// Projected pilot signals of one coherence block. Column l*tau_p + t holds
/// the AP-l signal projected on pilot t; all groups holding t see the same y.
struct PilotObservation {
    std::size_t num_aps = 0;
    std::size_t tau_p = 0;
    CMatrix y;

    auto at_pilot(std::size_t l, std::size_t pilot) const
    {
        return y.col(static_cast<Eigen::Index>(l * tau_p + pilot));
    }
    auto for_group(std::size_t l, std::size_t g, const PilotPlan& plan) const
    {
        return at_pilot(l, plan.pilot_of[g]);
    }
};

/// y_l^g = sqrt(tau_p P_p) * sum over co-pilot groups and members of h_li + n,
/// with `noise` (N x L*tau_p) supplying n for every (AP, pilot) pair.
PilotObservation project_pilots(const ChannelRealization& channels,
                                const GroupAssignment& groups,
                                const PilotPlan& plan,
                                const EstimationParams& params,
                                const CMatrix& noise);

/// Same, drawing n ~ CN(0, sigma_u^2 I) from `rng`.
PilotObservation project_pilots(const ChannelRealization& channels,
                                const GroupAssignment& groups,
                                const PilotPlan& plan,
                                const EstimationParams& params,
                                Rng& rng);

/// Batch form: realization t uses noise stream derive_seed(seed, t).
std::vector<PilotObservation> project_pilots(const ChannelBatch& batch,
                                             const GroupAssignment& groups,
                                             const PilotPlan& plan,
                                             const EstimationParams& params,
                                             std::uint64_t seed);

/// h_hat = K_g R Gamma^-1 y through a Hermitian positive-definite solve.
CVector mmse_composite_estimate(const CVector& y, const CMatrix& r_comp, const CMatrix& gamma,
                                std::size_t group_size);

/// Composite estimates of one realization; column l*G + g holds h_hat_l^g.
struct CompositeEstimates {
    std::size_t num_aps = 0;
    std::size_t num_groups = 0;
    CMatrix h;

    auto at(std::size_t l, std::size_t g) const { return h.col(static_cast<Eigen::Index>(l * num_groups + g)); }
};

/// Which (l, g) pairs to estimate; entry l*G + g non-zero means "compute".
using EstimateMask = std::vector<char>;

/// Mask of (l, g) with l in L_g.
EstimateMask serving_mask(const PilotPlan& plan);

/// Applies the precomputed estimators. Pairs outside `mask` are left zero;
/// an empty mask estimates every pair.
CompositeEstimates estimate_composite(const PilotObservation& obs,
                                      const CompositeStats& stats,
                                      const PilotPlan& plan,
                                      const EstimateMask& mask = {});

}  // namespace cfmc
