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

#include <stdexcept>
#include <string>

namespace cfmc {

// Error categories raised across the pipeline. Each stage throws the most
// specific one; the harness annotates them with the snapshot index.

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Covariance/shadowing synthesis failed (matrix not PSD beyond tolerance).
struct SynthesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Hermitian positive-definite factorization failed.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monte Carlo statistics unusable (zero norm, zero omega, ...).
struct InvalidStats : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cfmc
