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

#include <vector>

#include "massra/matrix.hpp"

namespace massra {

/// Root Zadoff-Chu sequence s[t], t in [0, N_ZC).
struct RootSequence {
    std::vector<cd> samples;
    int size() const noexcept { return static_cast<int>(samples.size()); }
};

/// Transmitted RA frame x_q: cyclic prefix (G) + shifted ZC (N_ZC) + guard (G).
struct PreambleFrame {
    std::vector<cd> samples;
    int shift = 0;
};

/// s[t] = exp(-j*pi*u*t^2/N) for even N and exp(-j*pi*u*t*(t+1)/N) for odd N.
/// Throws std::invalid_argument unless gcd(u, N) == 1.
RootSequence root_zc(int n_zc, int u);

/// out[t] = root[(t - c) mod N_ZC]. Throws std::out_of_range for c outside [0, N_ZC).
std::vector<cd> shifted(const RootSequence& root, int c);

PreambleFrame build_frame(const RootSequence& root, int c, int guard);

}  // namespace massra
