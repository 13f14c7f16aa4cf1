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

#include <optional>
#include <vector>

#include "massra/sysparams.hpp"

namespace massra {

/// Dimensioning constants shared by the closed forms.
struct LinkConstants {
    int n_rs = 72;
    int n_sc = 24;
    int n_zc = 864;
    int delay_spread = 6;

    static LinkConstants from(const SystemParams& params);
};

/// Inputs of the long-term average SINR of UE i in a fully overlapping group.
struct SinrParams {
    double m = 1.0;                // antennas (real so asymptotics can be probed)
    double gamma = 1.0;            // p_u / sigma^2
    double gamma_d = 1.0;          // (N_RS / N_SC) P_T / sigma^2
    std::vector<double> alphas;    // alpha_q = (1/N_RS) sum_l sigma^2_{h,q,l}; K_g = size
    int i = 1;                     // UE of interest, 1-based
    LinkConstants consts;
};

/// Scaled powers p_u = sigma^2 E_u / sqrt(M), P_T = sigma^2 E_T / sqrt(M).
struct ScaledPowerParams {
    double e_u = 0.0913;
    double e_t = 0.0913;
    double epsilon = 0.5;
};

/// Long-term average SINR (DS power over effective-noise power).
double sinr_closed_form(const SinrParams& p);

/// The same SINR written in terms of E_u and E_T at M antennas.
double sinr_scaled(double m, double e_u, double e_t, const std::vector<double>& alphas, int i,
                   const LinkConstants& c);

/// Large-M limit N_RS^3 N_ZC E_u E_T alpha_i^2 / (L N_SC).
double gamma_u(double e_u, double e_t, double alpha_i, const LinkConstants& c);

/// 1 - (1 - 1/kappa^2)^G. Throws for kappa <= 1.
double pf_bound(double kappa, int guard);

/// gamma_d needed to reach epsilon at M antennas with p_u = sigma^2 E_u / sqrt(M).
/// Empty when epsilon is at or above the zero-downlink-noise ceiling.
std::optional<double> required_gamma_d(double epsilon, double m, double e_u, const std::vector<double>& alphas, int i,
                                       const LinkConstants& c);

/// P_T / sigma^2 corresponding to required_gamma_d.
std::optional<double> required_pt(double epsilon, double m, double e_u, const std::vector<double>& alphas, int i,
                                  const LinkConstants& c);

struct MinAntennas {
    double root = 0.0;       // real-valued M*
    long long ceiled = 0;    // smallest integer M meeting the target
};

/// Smallest M reaching epsilon with p_u = c1 sigma^2/sqrt(M), P_T = c2 sigma^2/sqrt(M).
/// Empty when epsilon >= gamma_u.
std::optional<MinAntennas> min_antennas(const ScaledPowerParams& p, const std::vector<double>& alphas, int i,
                                        const LinkConstants& c);

}  // namespace massra
