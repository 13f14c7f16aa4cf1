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

#include "massra/analytic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace massra {

namespace {

double alpha_of(const std::vector<double>& alphas, int i)
{
    if (alphas.empty() || i < 1 || i > static_cast<int>(alphas.size())) {
        throw std::invalid_argument("UE index outside [1, K_g]");
    }
    for (double a : alphas) {
        if (!(a > 0.0)) {
            throw std::invalid_argument("alphas must be positive");
        }
    }
    return alphas[static_cast<std::size_t>(i - 1)];
}

// sum_q alpha_q / alpha_i
double relative_load(const std::vector<double>& alphas, double alpha_i)
{
    double s = 0.0;
    for (double a : alphas) {
        s += a / alpha_i;
    }
    return s;
}

}  // namespace

LinkConstants LinkConstants::from(const SystemParams& params)
{
    return {params.n_rs, params.n_sc, params.n_zc, params.delay_spread};
}

double sinr_closed_form(const SinrParams& p)
{
    const double ai = alpha_of(p.alphas, p.i);
    if (!(p.m > 0.0 && p.gamma > 0.0 && p.gamma_d > 0.0)) {
        throw std::invalid_argument("sinr_closed_form: M, gamma and gamma_d must be positive");
    }
    const double nrs = p.consts.n_rs, nzc = p.consts.n_zc, l = p.consts.delay_spread;
    const double inv = (1.0 / p.m) * (1.0 + 1.0 / (nrs * ai * p.gamma_d)) * relative_load(p.alphas, ai) +
                       l / (p.m * p.gamma * nrs * nzc * ai) +
                       l / (p.m * p.gamma * p.gamma_d * nrs * nrs * nzc * ai * ai);
    return 1.0 / inv;
}

double sinr_scaled(double m, double e_u, double e_t, const std::vector<double>& alphas, int i, const LinkConstants& c)
{
    const double ai = alpha_of(alphas, i);
    if (!(m > 0.0 && e_u > 0.0 && e_t > 0.0)) {
        throw std::invalid_argument("sinr_scaled: M, E_u and E_T must be positive");
    }
    const double nrs = c.n_rs, nzc = c.n_zc, l = c.delay_spread, nsc = c.n_sc;
    const double root_m = std::sqrt(m);
    const double inv = (1.0 / m) * (1.0 + nsc * root_m / (nrs * nrs * ai * e_t)) * relative_load(alphas, ai) +
                       l / (root_m * e_u * nrs * nzc * ai) + l * nsc / (e_u * e_t * nrs * nrs * nrs * nzc * ai * ai);
    return 1.0 / inv;
}

double gamma_u(double e_u, double e_t, double alpha_i, const LinkConstants& c)
{
    const double nrs = c.n_rs;
    return nrs * nrs * nrs * c.n_zc * e_u * e_t * alpha_i * alpha_i / (static_cast<double>(c.delay_spread) * c.n_sc);
}

double pf_bound(double kappa, int guard)
{
    if (!(kappa > 1.0)) {
        throw std::invalid_argument("pf_bound: kappa must exceed 1");
    }
    if (guard < 1) {
        throw std::invalid_argument("pf_bound: G must be positive");
    }
    return -std::expm1(guard * std::log1p(-1.0 / (kappa * kappa)));
}

std::optional<double> required_gamma_d(double epsilon, double m, double e_u, const std::vector<double>& alphas, int i,
                                       const LinkConstants& c)
{
    const double ai = alpha_of(alphas, i);
    if (!(epsilon > 0.0 && m > 0.0 && e_u > 0.0)) {
        throw std::invalid_argument("required_gamma_d: epsilon, M and E_u must be positive");
    }
    const double nrs = c.n_rs, nzc = c.n_zc, l = c.delay_spread;
    const double root_m = std::sqrt(m);
    double sum_over_ai2 = 0.0;
    for (double a : alphas) {
        sum_over_ai2 += a / (ai * ai);
    }
    const double num = (1.0 / (m * nrs)) * sum_over_ai2 + l / (root_m * e_u * nrs * nrs * nzc * ai * ai);
    const double den = 1.0 / epsilon - (1.0 / m) * relative_load(alphas, ai) - l / (root_m * e_u * nrs * nzc * ai);
    if (!(den > 0.0)) {
        return std::nullopt;
    }
    return num / den;
}

std::optional<double> required_pt(double epsilon, double m, double e_u, const std::vector<double>& alphas, int i,
                                  const LinkConstants& c)
{
    const auto gd = required_gamma_d(epsilon, m, e_u, alphas, i, c);
    if (!gd) {
        return std::nullopt;
    }
    return *gd * c.n_sc / c.n_rs;
}

std::optional<MinAntennas> min_antennas(const ScaledPowerParams& p, const std::vector<double>& alphas, int i,
                                        const LinkConstants& c)
{
    const double ai = alpha_of(alphas, i);
    if (!(p.e_u > 0.0 && p.e_t > 0.0 && p.epsilon > 0.0)) {
        throw std::invalid_argument("min_antennas: c1, c2 and epsilon must be positive");
    }
    const double nrs = c.n_rs, nzc = c.n_zc, l = c.delay_spread, nsc = c.n_sc;
    const double gu = gamma_u(p.e_u, p.e_t, ai, c);
    const double gap = 1.0 / p.epsilon - 1.0 / gu;
    if (!(gap > 0.0)) {
        return std::nullopt;
    }
    const double a1 = relative_load(alphas, ai);
    const double a2 = (nsc / (p.e_t * ai * nrs * nrs)) * relative_load(alphas, ai);
    const double a3 = l / (nzc * nrs * ai * p.e_u);
    const double b = a2 + a3;
    const double root_m = (b + std::sqrt(b * b + 4.0 * a1 * gap)) / (2.0 * gap);
    MinAntennas out;
    out.root = root_m * root_m;
    out.ceiled = static_cast<long long>(std::ceil(out.root - 1e-9 * out.root));
    // Guard against the root landing a hair above an integer after rounding.
    while (out.ceiled > 1 && sinr_scaled(static_cast<double>(out.ceiled - 1), p.e_u, p.e_t, alphas, i, c) >= p.epsilon) {
        --out.ceiled;
    }
    while (sinr_scaled(static_cast<double>(out.ceiled), p.e_u, p.e_t, alphas, i, c) < p.epsilon) {
        ++out.ceiled;
    }
    return out;
}

}  // namespace massra
