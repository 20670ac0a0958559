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
#include <vector>

#include "cfmc/geometry.hpp"
#include "cfmc/types.hpp"

namespace cfmc {

enum class CovarianceModel {
    /// Expectation over the Gaussian angular density, evaluated through the
    /// Jacobi-Anger expansion.
    exact,
    /// Second-order small-ASD closed form.
    gaussian_approximation,
};

/// Local scattering covariance of one AP-MS link for a half-wavelength ULA.
///
/// `factor` satisfies factor * factor^H == matrix and is what channel sampling
/// uses; tr(matrix) / N == beta.
struct SpatialCovariance {
    CMatrix matrix;
    CMatrix factor;
    double beta = 0.0;
    double nominal_angle = 0.0;
    double asd = 0.0;

    std::size_t antennas() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// Azimuth of the wrapped displacement from `ap` to `ms`; 0 for coincident points.
double nominal_angle(Point ap, Point ms, double side);

SpatialCovariance local_scattering_covariance(double beta,
                                              double phi,
                                              double asd,
                                              std::size_t antennas,
                                              CovarianceModel model = CovarianceModel::exact);

/// All L x K link covariances of a deployment.
class CovarianceField {
public:
    CovarianceField() = default;
    CovarianceField(std::size_t num_aps, std::size_t num_ms, std::size_t antennas,
                    std::vector<SpatialCovariance> links);

    const SpatialCovariance& at(std::size_t l, std::size_t k) const { return links_[l * num_ms_ + k]; }
    const CMatrix& matrix(std::size_t l, std::size_t k) const { return at(l, k).matrix; }

    std::size_t num_aps() const { return num_aps_; }
    std::size_t num_ms() const { return num_ms_; }
    std::size_t antennas() const { return antennas_; }

private:
    std::size_t num_aps_ = 0;
    std::size_t num_ms_ = 0;
    std::size_t antennas_ = 0;
    std::vector<SpatialCovariance> links_;
};

CovarianceField build_covariances(const Deployment& deployment,
                                  double asd,
                                  std::size_t antennas,
                                  CovarianceModel model = CovarianceModel::exact);

/// One channel realization: column l*K + k holds h_lk.
struct ChannelRealization {
    std::size_t num_aps = 0;
    std::size_t num_ms = 0;
    CMatrix h;

    auto link(std::size_t l, std::size_t k) const { return h.col(static_cast<Eigen::Index>(l * num_ms + k)); }
    /// N x K block of all MS channels seen by AP l.
    auto ap_block(std::size_t l) const
    {
        return h.middleCols(static_cast<Eigen::Index>(l * num_ms), static_cast<Eigen::Index>(num_ms));
    }
};

struct ChannelBatch {
    std::vector<ChannelRealization> realizations;

    std::size_t size() const { return realizations.size(); }
};

/// Realization `index` of the batch identified by `batch_seed`. Every
/// realization has its own RNG stream, so realizations can be regenerated
/// independently and in any order.
ChannelRealization sample_realization(const CovarianceField& field, std::uint64_t batch_seed, std::size_t index);

ChannelBatch sample_channels(const CovarianceField& field, std::size_t realizations, std::uint64_t seed);

}  // namespace cfmc
