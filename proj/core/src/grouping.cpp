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

#include "cfmc/grouping.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "cfmc/error.hpp"
#include "cfmc/rng.hpp"

namespace cfmc {

GroupAssignment GroupAssignment::from_labels(const std::vector<std::size_t>& labels)
{
    GroupAssignment out;
    out.group_of.resize(labels.size());
    std::vector<std::size_t> remap;
    std::vector<bool> mapped;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const std::size_t raw = labels[k];
        if (raw >= remap.size()) {
            remap.resize(raw + 1);
            mapped.resize(raw + 1, false);
        }
        if (!mapped[raw]) {
            mapped[raw] = true;
            remap[raw] = out.members.size();
            out.members.emplace_back();
        }
        out.group_of[k] = remap[raw];
        out.members[remap[raw]].push_back(k);
    }
    return out;
}

void GroupAssignment::validate() const
{
    std::vector<int> seen(group_of.size(), 0);
    for (std::size_t g = 0; g < members.size(); ++g) {
        if (members[g].empty())
            throw InvalidInput("group " + std::to_string(g) + " is empty");
        for (std::size_t k : members[g]) {
            if (k >= group_of.size() || group_of[k] != g)
                throw InvalidInput("group membership inconsistent for MS " + std::to_string(k));
            ++seen[k];
        }
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (seen[k] != 1)
            throw InvalidInput("MS " + std::to_string(k) + " is not in exactly one group");
}

std::string_view to_string(TransmissionMode mode)
{
    switch (mode) {
    case TransmissionMode::unicast: return "unicast";
    case TransmissionMode::single: return "single";
    case TransmissionMode::subgroup: return "subgroup";
    }
    return "?";
}

TransmissionMode parse_transmission_mode(std::string_view text)
{
    if (text == "unicast") return TransmissionMode::unicast;
    if (text == "single") return TransmissionMode::single;
    if (text == "subgroup") return TransmissionMode::subgroup;
    throw InvalidConfig("unknown transmission mode '" + std::string(text) + "' (unicast|single|subgroup)");
}

namespace {

struct LloydRun {
    std::vector<std::size_t> labels;
    double objective = std::numeric_limits<double>::infinity();
};

class Lloyd {
public:
    Lloyd(const RMatrix& features, std::size_t clusters)
        : x_(features), G_(clusters), centroids_(static_cast<Eigen::Index>(clusters), features.cols())
    {
    }

    LloydRun run(Rng& rng, std::size_t restart, std::size_t max_iters, const LloydObserver& observer)
    {
        seed_plus_plus(rng);
        std::vector<std::size_t> labels = assign();
        repair(labels);
        update(labels);
        double obj = objective(labels);
        if (observer)
            observer({restart, 0, obj, labels});

        for (std::size_t it = 1; it <= max_iters; ++it) {
            std::vector<std::size_t> next = assign();
            repair(next);
            if (next == labels)
                break;
            labels = std::move(next);
            update(labels);
            obj = objective(labels);
            if (observer)
                observer({restart, it, obj, labels});
        }
        return {std::move(labels), obj};
    }

private:
    double dist2(Eigen::Index k, Eigen::Index c) const { return (x_.row(k) - centroids_.row(c)).squaredNorm(); }

    void seed_plus_plus(Rng& rng)
    {
        const Eigen::Index K = x_.rows();
        std::uniform_int_distribution<Eigen::Index> pick(0, K - 1);
        centroids_.row(0) = x_.row(pick(rng));
        std::vector<double> d2(static_cast<std::size_t>(K), std::numeric_limits<double>::infinity());
        for (std::size_t c = 1; c < G_; ++c) {
            double total = 0.0;
            for (Eigen::Index k = 0; k < K; ++k) {
                auto& d = d2[static_cast<std::size_t>(k)];
                d = std::min(d, dist2(k, static_cast<Eigen::Index>(c - 1)));
                total += d;
            }
            Eigen::Index chosen = 0;
            if (total > 0.0) {
                std::discrete_distribution<Eigen::Index> weighted(d2.begin(), d2.end());
                chosen = weighted(rng);
            } else {
                chosen = pick(rng);
            }
            centroids_.row(static_cast<Eigen::Index>(c)) = x_.row(chosen);
        }
    }

    std::vector<std::size_t> assign() const
    {
        const Eigen::Index K = x_.rows();
        std::vector<std::size_t> labels(static_cast<std::size_t>(K));
        for (Eigen::Index k = 0; k < K; ++k) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t c = 0; c < G_; ++c) {
                const double d = dist2(k, static_cast<Eigen::Index>(c));
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            labels[static_cast<std::size_t>(k)] = arg;
        }
        return labels;
    }

    // Empty clusters take the point farthest from its centroid among clusters
    // that can spare one.
    void repair(std::vector<std::size_t>& labels)
    {
        std::vector<std::size_t> count(G_, 0);
        for (auto c : labels)
            ++count[c];
        for (std::size_t empty = 0; empty < G_; ++empty) {
            if (count[empty] != 0)
                continue;
            double worst = -1.0;
            std::size_t victim = 0;
            for (std::size_t k = 0; k < labels.size(); ++k) {
                if (count[labels[k]] < 2)
                    continue;
                const double d = dist2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(labels[k]));
                if (d > worst) {
                    worst = d;
                    victim = k;
                }
            }
            --count[labels[victim]];
            labels[victim] = empty;
            count[empty] = 1;
            centroids_.row(static_cast<Eigen::Index>(empty)) = x_.row(static_cast<Eigen::Index>(victim));
        }
    }

    void update(const std::vector<std::size_t>& labels)
    {
        centroids_.setZero();
        std::vector<double> count(G_, 0.0);
        for (std::size_t k = 0; k < labels.size(); ++k) {
            centroids_.row(static_cast<Eigen::Index>(labels[k])) += x_.row(static_cast<Eigen::Index>(k));
            count[labels[k]] += 1.0;
        }
        for (std::size_t c = 0; c < G_; ++c)
            centroids_.row(static_cast<Eigen::Index>(c)) /= count[c];
    }

    double objective(const std::vector<std::size_t>& labels) const
    {
        double total = 0.0;
        for (std::size_t k = 0; k < labels.size(); ++k)
            total += dist2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(labels[k]));
        return total;
    }

    const RMatrix& x_;
    std::size_t G_;
    RMatrix centroids_;
};

}  // namespace

GroupAssignment kmeans_subgroups(const RMatrix& beta,
                                 std::size_t num_groups,
                                 const KMeansOptions& options,
                                 std::uint64_t seed,
                                 const LloydObserver& observer)
{
    const auto K = static_cast<std::size_t>(beta.cols());
    if (num_groups == 0)
        throw InvalidConfig("kmeans_subgroups: G must be at least 1");
    if (num_groups > K)
        throw InvalidConfig("kmeans_subgroups: G = " + std::to_string(num_groups) + " exceeds K = " +
                            std::to_string(K));
    if ((beta.array() <= 0.0).any())
        throw InvalidInput("kmeans_subgroups: large-scale gains must be positive");

    if (num_groups == 1)
        return GroupAssignment::from_labels(std::vector<std::size_t>(K, 0));

    // One row per MS: the dB gain vector over all APs.
    const RMatrix features = (10.0 * beta.array().log10()).matrix().transpose();

    LloydRun best;
    Lloyd lloyd(features, num_groups);
    const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        LloydRun run = lloyd.run(rng, r, options.max_iters, observer);
        if (run.objective < best.objective)
            best = std::move(run);
    }
    return GroupAssignment::from_labels(best.labels);
}

GroupAssignment make_plan(TransmissionMode mode,
                          std::size_t num_groups,
                          const RMatrix& beta,
                          const KMeansOptions& options,
                          std::uint64_t seed)
{
    const auto K = static_cast<std::size_t>(beta.cols());
    if (K == 0)
        throw InvalidConfig("make_plan: no MSs");
    switch (mode) {
    case TransmissionMode::unicast: {
        std::vector<std::size_t> labels(K);
        for (std::size_t k = 0; k < K; ++k)
            labels[k] = k;
        return GroupAssignment::from_labels(labels);
    }
    case TransmissionMode::single:
        return GroupAssignment::from_labels(std::vector<std::size_t>(K, 0));
    case TransmissionMode::subgroup:
        return kmeans_subgroups(beta, num_groups, options, seed);
    }
    throw InvalidConfig("make_plan: unknown mode");
}

}  // namespace cfmc
