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
#include <random>
#include <string_view>

#include "cfmc/types.hpp"

namespace cfmc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over the bytes of `text`.
std::uint64_t fnv1a(std::string_view text);

/// Child seed for a named stage, e.g. derive_seed(snapshot_seed, "channels").
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

/// Child seed for an integer index (snapshot number, realization number).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Draws from CN(0, 1): independent real and imaginary parts with variance 1/2.
class ComplexNormal {
public:
    cplx operator()(Rng& rng)
    {
        const double re = normal_(rng);
        const double im = normal_(rng);
        return {re, im};
    }

private:
    std::normal_distribution<double> normal_{0.0, 0.70710678118654752440};
};

}  // namespace cfmc
