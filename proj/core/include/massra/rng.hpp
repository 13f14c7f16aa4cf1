// SPDX-License-Identifier: Apache-2.0
//
// massra: link-level simulator for massive MIMO random access
// Copyright (C) 2026 The massra authors
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

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace massra {

/// Mixes a master seed with a list of stream indices into a 64-bit seed.
/// Work units (trials, frames, replicas) each derive their own stream, so
/// results do not depend on how units are scheduled across workers.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t master, std::initializer_list<std::uint64_t> stream)
        : engine_(derive_seed(master, stream)) {}

    double uniform() { return uniform_(engine_); }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    double normal() { return normal_(engine_); }
    int poisson(double mean) { return std::poisson_distribution<int>(mean)(engine_); }

    /// Circularly-symmetric complex Gaussian with E|x|^2 = variance.
    std::complex<double> complex_normal(double variance);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace massra
