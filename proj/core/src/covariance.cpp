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

#include "cfmc/covariance.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "cfmc/error.hpp"
#include "cfmc/rng.hpp"

namespace cfmc {

namespace {

// Bessel values J_n(pi * lag) for lag = 0..N-1, n = 0..max_order.
class BesselTable {
public:
    explicit BesselTable(std::size_t antennas)
    {
        const double x_max = std::numbers::pi * static_cast<double>(antennas > 0 ? antennas - 1 : 0);
        max_order_ = static_cast<int>(std::ceil(x_max)) + 30;
        values_.resize(antennas);
        for (std::size_t lag = 0; lag < antennas; ++lag) {
            const double x = std::numbers::pi * static_cast<double>(lag);
            auto& row = values_[lag];
            row.resize(static_cast<std::size_t>(max_order_) + 1);
            for (int n = 0; n <= max_order_; ++n)
                row[static_cast<std::size_t>(n)] = std::cyl_bessel_j(static_cast<double>(n), x);
        }
    }

    int max_order() const { return max_order_; }
    double operator()(std::size_t lag, int n) const { return values_[lag][static_cast<std::size_t>(n)]; }

private:
    int max_order_ = 0;
    std::vector<std::vector<double>> values_;
};

// E{exp(j pi lag sin(phi + delta))}, delta ~ N(0, asd^2), via
// exp(j x sin t) = sum_n J_n(x) exp(j n t) and E{exp(j n delta)} = exp(-n^2 asd^2 / 2).
cplx exact_correlation(const BesselTable& bessel, std::size_t lag, double phi, double asd)
{
    if (lag == 0)
        return 1.0;
    cplx acc = bessel(lag, 0);
    const double half_var = asd * asd / 2.0;
    for (int n = 1; n <= bessel.max_order(); ++n) {
        const double weight = 2.0 * std::exp(-half_var * n * n) * bessel(lag, n);
        if (n % 2 == 0)
            acc += weight * std::cos(n * phi);
        else
            acc += cplx(0.0, weight * std::sin(n * phi));
    }
    return acc;
}

cplx approximate_correlation(std::size_t lag, double phi, double asd)
{
    const double d = static_cast<double>(lag);
    const double spread = std::numbers::pi * d * std::cos(phi);
    return std::polar(std::exp(-asd * asd / 2.0 * spread * spread), std::numbers::pi * d * std::sin(phi));
}

SpatialCovariance synthesize(double beta, double phi, double asd, std::size_t antennas,
                             CovarianceModel model, const BesselTable* bessel)
{
    if (!(beta > 0.0))
        throw InvalidInput("local_scattering_covariance: beta must be positive");
    if (antennas == 0)
        throw InvalidInput("local_scattering_covariance: at least one antenna required");
    if (asd < 0.0)
        throw InvalidInput("local_scattering_covariance: negative angular spread");

    const auto N = static_cast<Eigen::Index>(antennas);
    std::vector<cplx> corr(antennas);
    for (std::size_t lag = 0; lag < antennas; ++lag)
        corr[lag] = model == CovarianceModel::exact ? exact_correlation(*bessel, lag, phi, asd)
                                                    : approximate_correlation(lag, phi, asd);

    SpatialCovariance out;
    out.beta = beta;
    out.nominal_angle = phi;
    out.asd = asd;
    out.matrix.resize(N, N);
    for (Eigen::Index s = 0; s < N; ++s) {
        out.matrix(s, s) = beta;
        for (Eigen::Index m = 0; m < s; ++m) {
            const cplx v = beta * corr[static_cast<std::size_t>(s - m)];
            out.matrix(s, m) = v;
            out.matrix(m, s) = std::conj(v);
        }
    }

    if (N == 1) {
        out.factor = CMatrix::Constant(1, 1, std::sqrt(beta));
        return out;
    }

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(out.matrix);
    if (eig.info() != Eigen::Success)
        throw SynthesisError("local_scattering_covariance: eigendecomposition failed");
    RVector values = eig.eigenvalues();
    const double tol = 1e-10 * beta * static_cast<double>(antennas);
    if (values.minCoeff() < -tol)
        throw SynthesisError("local_scattering_covariance: matrix not PSD (min eigenvalue " +
                             std::to_string(values.minCoeff()) + ")");
    if (values.minCoeff() < 0.0) {
        values = values.cwiseMax(0.0);
        out.matrix = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().adjoint();
    }
    out.factor = eig.eigenvectors() * values.cwiseSqrt().asDiagonal();
    return out;
}

}  // namespace

double nominal_angle(Point ap, Point ms, double side)
{
    const Displacement d = wrapped_displacement(ap, ms, side);
    if (d.dx == 0.0 && d.dy == 0.0)
        return 0.0;
    return std::atan2(d.dy, d.dx);
}

SpatialCovariance local_scattering_covariance(double beta, double phi, double asd, std::size_t antennas,
                                              CovarianceModel model)
{
    if (model == CovarianceModel::exact) {
        const BesselTable bessel(antennas);
        return synthesize(beta, phi, asd, antennas, model, &bessel);
    }
    return synthesize(beta, phi, asd, antennas, model, nullptr);
}

CovarianceField::CovarianceField(std::size_t num_aps, std::size_t num_ms, std::size_t antennas,
                                 std::vector<SpatialCovariance> links)
    : num_aps_(num_aps), num_ms_(num_ms), antennas_(antennas), links_(std::move(links))
{
    if (links_.size() != num_aps_ * num_ms_)
        throw InvalidInput("CovarianceField: expected L*K link covariances");
}

CovarianceField build_covariances(const Deployment& deployment, double asd, std::size_t antennas,
                                  CovarianceModel model)
{
    const std::size_t L = deployment.num_aps();
    const std::size_t K = deployment.num_ms();
    const BesselTable bessel(antennas);

    std::vector<SpatialCovariance> links;
    links.reserve(L * K);
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t k = 0; k < K; ++k) {
            const double phi = nominal_angle(deployment.ap_positions[l], deployment.ms_positions[k],
                                             deployment.area.side);
            links.push_back(synthesize(deployment.beta(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)),
                                       phi, asd, antennas, model, &bessel));
        }
    return CovarianceField(L, K, antennas, std::move(links));
}

ChannelRealization sample_realization(const CovarianceField& field, std::uint64_t batch_seed, std::size_t index)
{
    const std::size_t L = field.num_aps();
    const std::size_t K = field.num_ms();
    const auto N = static_cast<Eigen::Index>(field.antennas());

    ChannelRealization out;
    out.num_aps = L;
    out.num_ms = K;
    out.h.resize(N, static_cast<Eigen::Index>(L * K));

    Rng rng(derive_seed(batch_seed, static_cast<std::uint64_t>(index)));
    ComplexNormal cn;
    CVector z(N);
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t k = 0; k < K; ++k) {
            for (Eigen::Index n = 0; n < N; ++n)
                z(n) = cn(rng);
            out.h.col(static_cast<Eigen::Index>(l * K + k)).noalias() = field.at(l, k).factor * z;
        }
    return out;
}

ChannelBatch sample_channels(const CovarianceField& field, std::size_t realizations, std::uint64_t seed)
{
    if (realizations == 0)
        throw InvalidConfig("sample_channels: at least one realization required");
    ChannelBatch batch;
    batch.realizations.reserve(realizations);
    for (std::size_t t = 0; t < realizations; ++t)
        batch.realizations.push_back(sample_realization(field, seed, t));
    return batch;
}

}  // namespace cfmc
