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

#include "massra/preamble.hpp"

#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace massra {

RootSequence root_zc(int n_zc, int u)
{
    if (n_zc < 1 || u < 1 || std::gcd(n_zc, u) != 1) {
        throw std::invalid_argument("root_zc: root must be positive and coprime with the length");
    }
    RootSequence root;
    root.samples.resize(static_cast<std::size_t>(n_zc));
    // The phase numerator u*t*(t+odd) is reduced modulo 2N in integers so the
    // argument stays small and exact for long sequences.
    const std::int64_t n = n_zc;
    const std::int64_t odd = n_zc % 2;
    for (std::int64_t t = 0; t < n; ++t) {
        const std::int64_t q = (t * (t + odd)) % (2 * n);
        const std::int64_t num = (static_cast<std::int64_t>(u) * q) % (2 * n);
        const double phase = -std::numbers::pi * static_cast<double>(num) / static_cast<double>(n);
        root.samples[static_cast<std::size_t>(t)] = std::polar(1.0, phase);
    }
    return root;
}

std::vector<cd> shifted(const RootSequence& root, int c)
{
    const int n = root.size();
    if (c < 0 || c >= n) {
        throw std::out_of_range("shifted: shift outside [0, N_ZC)");
    }
    std::vector<cd> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        out[static_cast<std::size_t>(t)] = root.samples[static_cast<std::size_t>((t - c + n) % n)];
    }
    return out;
}

PreambleFrame build_frame(const RootSequence& root, int c, int guard)
{
    const int n = root.size();
    if (guard < 0 || guard > n) {
        throw std::invalid_argument("build_frame: guard must be in [0, N_ZC]");
    }
    const auto seq = shifted(root, c);
    PreambleFrame frame;
    frame.shift = c;
    frame.samples.assign(static_cast<std::size_t>(n + 2 * guard), cd{});
    for (int t = 0; t < guard; ++t) {
        frame.samples[static_cast<std::size_t>(t)] = seq[static_cast<std::size_t>(t + n - guard)];
    }
    for (int t = 0; t < n; ++t) {
        frame.samples[static_cast<std::size_t>(t + guard)] = seq[static_cast<std::size_t>(t)];
    }
    return frame;
}

}  // namespace massra
