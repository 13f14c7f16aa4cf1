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

#include "massra/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace massra {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr int kResourceBlocks = 15;

std::vector<int> preamble_subcarriers(int k, const SystemParams& params)
{
    const auto placement = map_to_grid(k, params);
    std::vector<int> subs;
    for (const auto& copy : placement.copies) {
        for (const auto& re : copy) {
            subs.push_back(re.subcarrier);
        }
    }
    return subs;
}

struct MeanCi {
    double mean = 0.0;
    double half = 0.0;
};

MeanCi batch_ci(const std::vector<double>& batches)
{
    MeanCi out;
    if (batches.empty()) {
        return out;
    }
    const double n = static_cast<double>(batches.size());
    out.mean = std::accumulate(batches.begin(), batches.end(), 0.0) / n;
    if (batches.size() > 1) {
        double ss = 0.0;
        for (double b : batches) {
            ss += (b - out.mean) * (b - out.mean);
        }
        out.half = kZ95 * std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

}  // namespace

Route parse_route(const std::string& name)
{
    if (name == "correlation") return Route::correlation;
    if (name == "waveform") return Route::waveform;
    throw std::invalid_argument("unknown route '" + name + "'");
}

SlotContext::SlotContext(const SystemParams& params)
    : root(root_zc(params.n_zc, params.zc_root)), correlator(root)
{
    for (int k = 1; k <= params.num_preambles; ++k) {
        subcarriers.push_back(preamble_subcarriers(k, params));
    }
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn)
{
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(threads, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

SlotOutcome simulate_slot(const SystemParams& params, std::span<const UserRealization> users, Rng& rng,
                          const SimOptions& options)
{
    const SlotContext context(params);
    return simulate_slot(params, users, rng, options, context);
}

SlotOutcome simulate_slot(const SystemParams& params, std::span<const UserRealization> users, Rng& rng,
                          const SimOptions& options, const SlotContext& context)
{
    const int q = params.num_preambles;
    const int res = 2 * kRarBits;

    CorrelationBank bank;
    if (options.route == Route::correlation) {
        bank.z = synthesize_correlation(users, params, rng);
    } else {
        std::vector<PreambleFrame> frames;
        frames.reserve(users.size());
        for (const auto& ue : users) {
            frames.push_back(build_frame(context.root, params.shift(ue.preamble_idx), params.guard));
        }
        bank = context.correlator.correlate(synthesize_uplink(users, frames, params, rng), params.guard);
    }

    SlotOutcome out;
    std::vector<std::vector<DetectedGroup>> groups(static_cast<std::size_t>(q));
    std::vector<bool> active(static_cast<std::size_t>(q), false);
    for (const auto& ue : users) {
        active[static_cast<std::size_t>(ue.preamble_idx - 1)] = true;
    }
    const double theta0 = params.theta0();
    for (int k = 1; k <= q; ++k) {
        auto& gk = groups[static_cast<std::size_t>(k - 1)];
        gk = group(profile(bank, params, k, theta0), params.delay_spread);
        out.groups.insert(out.groups.end(), gk.begin(), gk.end());
        if (active[static_cast<std::size_t>(k - 1)]) {
            ++out.active_preambles;
            out.active_detected += gk.empty() ? 0 : 1;
        } else {
            ++out.idle_preambles;
            out.idle_with_groups += gk.empty() ? 0 : 1;
        }
    }
    out.k_t = static_cast<int>(out.groups.size());

    // Precoded RAR per preamble (empty matrix when nothing was detected).
    std::vector<CMatrix> tx(static_cast<std::size_t>(q));
    int rb_counter = 0;
    for (int k = 1; k <= q; ++k) {
        const auto& gk = groups[static_cast<std::size_t>(k - 1)];
        if (gk.empty()) {
            continue;
        }
        std::vector<GroupChannelEstimate> estimates;
        std::vector<std::vector<cd>> symbols;
        for (const auto& grp : gk) {
            auto est = estimate_group_cir(bank, grp, params, 0.0);
            est.upsilon = options.empirical_upsilon ? empirical_upsilon(est.fd_gain)
                                                    : group_upsilon(params, users, k, grp.ta_hat);
            estimates.push_back(std::move(est));
            const RarPayload payload{grp.ta_hat, rb_counter++ % kResourceBlocks, 1};
            const auto one_copy = bpsk(encode(payload));
            std::vector<cd> both(one_copy);
            both.insert(both.end(), one_copy.begin(), one_copy.end());
            symbols.push_back(std::move(both));
        }
        tx[static_cast<std::size_t>(k - 1)] =
            precode(estimates, symbols, context.subcarriers[static_cast<std::size_t>(k - 1)], params, out.k_t,
                    options.split)
                .x;
    }

    const CMatrix silent(static_cast<std::size_t>(params.num_antennas), static_cast<std::size_t>(res));
    for (std::size_t u = 0; u < users.size(); ++u) {
        const auto& ue = users[u];
        const auto kidx = static_cast<std::size_t>(ue.preamble_idx - 1);
        const CMatrix& x = tx[kidx].empty() ? silent : tx[kidx];
        const auto gain = frequency_response(ue.cir, params.n_rs);
        const auto y = receive_downlink(x, context.subcarriers[kidx], gain, params, rng);
        const auto result = decode(std::span<const cd>(y.data(), kRarBits),
                                   std::span<const cd>(y.data() + kRarBits, kRarBits));
        UeOutcome o;
        o.preamble_idx = ue.preamble_idx;
        o.tau = ue.tau;
        o.status = result.status;
        o.payload = result.payload;
        for (const auto& grp : groups[kidx]) {
            if (grp.ta_hat <= ue.tau) {
                o.matched_ta = grp.ta_hat;
            }
        }
        if (o.matched_ta) {
            o.ta_error = *o.matched_ta - ue.tau;
        }
        if (o.success()) {
            out.granted.push_back(u);
        }
        out.ues.push_back(std::move(o));
    }
    return out;
}

namespace {

struct PendingUe {
    double distance_km = 0.0;
    int tau = 0;
    int attempts = 0;
    bool measured = false;
};

struct ReplicaTally {
    long long resolved = 0;
    long long failures = 0;
    long long repeats = 0;
    long long attempts = 0;
    long long successes = 0;
    long long idle = 0;
    long long idle_fa = 0;
    long long active = 0;
    long long active_det = 0;
    std::map<int, long long> ta_hist;
};

ReplicaTally run_replica(const SystemParams& params, const CampaignConfig& cfg, const SimOptions& options,
                         const AttemptOverride& override_attempt, const SlotContext& context, std::size_t replica,
                         int measured_frames)
{
    ReplicaTally tally;
    std::vector<PendingUe> backlog;
    const int measure_end = cfg.warmup + measured_frames;
    // Enough trailing frames for every measured UE to finish.
    const int last_frame = measure_end + params.max_repeats + 1;
    for (int frame = 0; frame < last_frame; ++frame) {
        const bool pending_measured =
            std::any_of(backlog.begin(), backlog.end(), [](const PendingUe& p) { return p.measured; });
        if (frame >= measure_end && !pending_measured) {
            break;
        }
        Rng rng(cfg.seed, {static_cast<std::uint64_t>(replica), static_cast<std::uint64_t>(frame)});
        const bool measuring = frame >= cfg.warmup && frame < measure_end;
        const int arrivals = rng.poisson(cfg.mean_requests);
        for (int i = 0; i < arrivals; ++i) {
            PendingUe p;
            p.distance_km = params.cell_radius_km * std::sqrt(rng.uniform());
            p.tau = delay_for_distance(params, p.distance_km);
            p.measured = measuring;
            backlog.push_back(p);
        }
        std::vector<UserRealization> users;
        users.reserve(backlog.size());
        for (const auto& p : backlog) {
            UserRealization ue;
            ue.distance_km = p.distance_km;
            ue.tau = p.tau;
            ue.preamble_idx = rng.uniform_int(1, params.num_preambles);
            ue.cir = draw_cir(params, p.distance_km, rng);
            users.push_back(std::move(ue));
        }
        const auto slot = simulate_slot(params, users, rng, options, context);
        if (measuring) {
            tally.idle += slot.idle_preambles;
            tally.idle_fa += slot.idle_with_groups;
            tally.active += slot.active_preambles;
            tally.active_det += slot.active_detected;
        }

        std::vector<PendingUe> next;
        for (std::size_t u = 0; u < backlog.size(); ++u) {
            PendingUe p = backlog[u];
            const auto& o = slot.ues[u];
            const bool ok = override_attempt ? override_attempt(o) : o.success();
            ++p.attempts;
            if (p.measured) {
                ++tally.attempts;
                if (ok) {
                    ++tally.successes;
                    if (o.matched_ta) {
                        ++tally.ta_hist[o.ta_error];
                    }
                }
            }
            const bool exhausted = !ok && p.attempts > params.max_repeats;
            if (ok || exhausted) {
                if (p.measured) {
                    ++tally.resolved;
                    tally.repeats += ok ? p.attempts - 1 : params.max_repeats;
                    tally.failures += exhausted ? 1 : 0;
                }
            } else {
                next.push_back(p);
            }
        }
        backlog = std::move(next);
    }
    return tally;
}

}  // namespace

CampaignMetrics run_campaign(const SystemParams& params, const CampaignConfig& config, const SimOptions& options,
                             const AttemptOverride& override_attempt)
{
    if (config.frames < 1 || config.replicas < 1 || config.warmup < 0 || !(config.mean_requests > 0.0)) {
        throw std::invalid_argument("run_campaign: frames, replicas must be positive and load > 0");
    }
    const SlotContext context(params);
    const auto replicas = static_cast<std::size_t>(config.replicas);
    const int per_replica = (config.frames + config.replicas - 1) / config.replicas;
    std::vector<ReplicaTally> tallies(replicas);
    parallel_for(replicas, options.workers, [&](std::size_t r) {
        tallies[r] = run_replica(params, config, options, override_attempt, context, r, per_replica);
    });

    CampaignMetrics m;
    ReplicaTally total;
    std::vector<double> rep_batches, fail_batches;
    for (const auto& t : tallies) {
        total.resolved += t.resolved;
        total.failures += t.failures;
        total.repeats += t.repeats;
        total.attempts += t.attempts;
        total.successes += t.successes;
        total.idle += t.idle;
        total.idle_fa += t.idle_fa;
        total.active += t.active;
        total.active_det += t.active_det;
        for (const auto& [err, count] : t.ta_hist) {
            m.ta_error_histogram[err] += count;
        }
        if (t.resolved > 0) {
            rep_batches.push_back(static_cast<double>(t.repeats) / static_cast<double>(t.resolved));
            fail_batches.push_back(static_cast<double>(t.failures) / static_cast<double>(t.resolved));
        }
    }
    const auto ratio = [](long long a, long long b) { return b > 0 ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    m.avg_repeats = ratio(total.repeats, total.resolved);
    m.fail_prob = ratio(total.failures, total.resolved);
    m.pf = ratio(total.idle_fa, total.idle);
    m.pd = ratio(total.active_det, total.active);
    m.success_per_attempt = ratio(total.successes, total.attempts);
    m.ci_avg_repeats = batch_ci(rep_batches).half;
    m.ci_fail_prob = batch_ci(fail_batches).half;
    m.resolved = total.resolved;
    m.failures = total.failures;
    m.attempts = total.attempts;
    return m;
}

double measure_pe(const SystemParams& params, double theta0, int trials, std::uint64_t seed, int workers)
{
    if (trials < 1) {
        throw std::invalid_argument("measure_pe: trials must be positive");
    }
    std::vector<std::uint8_t> error(static_cast<std::size_t>(trials), 0);
    parallel_for(error.size(), workers, [&](std::size_t i) {
        Rng rng(seed, {static_cast<std::uint64_t>(i)});
        UserRealization ue = draw_user(params, rng);
        ue.preamble_idx = 1;
        const std::vector<UserRealization> one{ue};
        const auto prof = profile_from_window(synthesize_window(one, 1, params, rng), 1, theta0, params.noise_power);
        const auto groups = group(prof, params.delay_spread);
        error[i] = (groups.empty() || groups.front().ta_hat != ue.tau) ? 1 : 0;
    });
    return static_cast<double>(std::accumulate(error.begin(), error.end(), 0LL)) / trials;
}

MinPowerResult find_min_power(const SystemParams& params, const MinPowerConfig& cfg)
{
    if (!(cfg.target_pe > 0.0 && cfg.target_pe < 1.0) || cfg.lo_db >= cfg.hi_db || !(cfg.resolution_db > 0.0)) {
        throw std::invalid_argument("find_min_power: invalid search configuration");
    }
    MinPowerResult result;
    Rng cal_rng(cfg.seed, {0xCA11B, static_cast<std::uint64_t>(params.num_antennas)});
    result.theta0 = calibrate_threshold(params, cfg.target_pf, cfg.mode, cal_rng, cfg.calibration_trials);

    const std::uint64_t trial_seed = derive_seed(cfg.seed, {0x7E57});
    auto pe_at = [&](double db) {
        SystemParams p = params;
        p.pu_over_sigma2 = db_to_linear(db);
        return measure_pe(p, result.theta0, cfg.trials, trial_seed, cfg.workers);
    };
    double lo = cfg.lo_db, hi = cfg.hi_db;
    const double pe_hi = pe_at(hi);
    if (pe_hi > cfg.target_pe) {
        result.pe = pe_hi;
        result.message = "target P_e not reached at the top of the search range";
        return result;
    }
    const double pe_lo = pe_at(lo);
    if (pe_lo <= cfg.target_pe) {
        result.pe = pe_lo;
        result.message = "target P_e already met at the bottom of the search range";
        return result;
    }
    double pe_best = pe_hi;
    while (hi - lo > cfg.resolution_db) {
        const double mid = 0.5 * (lo + hi);
        const double pe = pe_at(mid);
        if (pe <= cfg.target_pe) {
            hi = mid;
            pe_best = pe;
        } else {
            lo = mid;
        }
    }
    result.pu_db = hi;
    result.pe = pe_best;
    return result;
}

WorstCaseSinrResult worst_case_sinr_experiment(const SystemParams& params, int k_g, int num_draws, std::uint64_t seed,
                                               int workers)
{
    if (k_g < 1 || num_draws < 1) {
        throw std::invalid_argument("worst_case_sinr_experiment: K_g and draws must be positive");
    }
    const auto m = static_cast<std::size_t>(params.num_antennas);
    const int taps = params.delay_spread;
    const double upsilon = worst_case_upsilon(params, k_g);
    const double pd = downlink_power(params, 1, PowerSplit::total_groups);
    const double expected_gain = params.num_antennas * params.alpha();
    const double est_noise_var = params.noise_power / params.n_zc;
    const auto subs = preamble_subcarriers(1, params);
    const std::vector<int> rar_subs(subs.begin(), subs.begin() + kRarBits);

    struct DrawTotals {
        double ds = 0.0;
        double en = 0.0;
        double sample = 0.0;
    };
    std::vector<DrawTotals> draws(static_cast<std::size_t>(num_draws));
    parallel_for(draws.size(), workers, [&](std::size_t d) {
        Rng rng(seed, {static_cast<std::uint64_t>(d)});
        std::vector<CMatrix> gains;
        CMatrix est_cir(m, static_cast<std::size_t>(taps));
        const double amp = std::sqrt(params.pu());
        for (int q = 0; q < k_g; ++q) {
            CMatrix cir = draw_cir(params, 0.0, rng);
            for (std::size_t a = 0; a < m; ++a) {
                for (int l = 0; l < taps; ++l) {
                    est_cir(a, static_cast<std::size_t>(l)) += amp * cir(a, static_cast<std::size_t>(l));
                }
            }
            gains.push_back(frequency_response(cir, params.n_rs));
        }
        for (auto& v : est_cir.flat()) {
            v += rng.complex_normal(est_noise_var);
        }
        const CMatrix est = frequency_response(est_cir, params.n_rs);

        DrawTotals& tot = draws[d];
        std::vector<cd> h_user(m), h_est(m);
        for (std::size_t s = 0; s < rar_subs.size(); ++s) {
            const auto n = static_cast<std::size_t>(rar_subs[s]);
            for (std::size_t a = 0; a < m; ++a) {
                h_est[a] = est(a, n);
            }
            for (int i = 0; i < k_g; ++i) {
                for (std::size_t a = 0; a < m; ++a) {
                    h_user[a] = gains[static_cast<std::size_t>(i)](a, n);
                }
                const cd noise = params.noise_power > 0.0 ? rng.complex_normal(params.noise_power) : cd{};
                const auto draw =
                    measure_instantaneous_sinr(h_user, h_est, cd{1.0, 0.0}, noise, expected_gain, upsilon, pd, params);
                tot.ds += std::norm(draw.ds);
                tot.en += std::norm(draw.en);
            }
            if (s == 0) {
                std::vector<std::vector<cd>> per_user(static_cast<std::size_t>(k_g), std::vector<cd>(m));
                for (int q = 0; q < k_g; ++q) {
                    for (std::size_t a = 0; a < m; ++a) {
                        per_user[static_cast<std::size_t>(q)][a] = gains[static_cast<std::size_t>(q)](a, n);
                    }
                }
                tot.sample = conditional_sinr(per_user, 0, upsilon, pd, params);
            }
        }
    });

    WorstCaseSinrResult out;
    double ds = 0.0, en = 0.0;
    for (const auto& d : draws) {
        ds += d.ds;
        en += d.en;
        out.samples.push_back(d.sample);
    }
    out.mean_sinr = ds / en;
    const double nd = static_cast<double>(out.samples.size());
    out.sample_mean = std::accumulate(out.samples.begin(), out.samples.end(), 0.0) / nd;
    double ss = 0.0;
    for (double s : out.samples) {
        ss += (s - out.sample_mean) * (s - out.sample_mean);
    }
    out.sample_std = out.samples.size() > 1 ? std::sqrt(ss / (nd - 1.0)) : 0.0;

    SinrParams sp;
    sp.m = params.num_antennas;
    sp.gamma = params.pu_over_sigma2;
    sp.gamma_d = static_cast<double>(params.n_rs) / params.n_sc * params.pt_over_sigma2;
    sp.alphas.assign(static_cast<std::size_t>(k_g), params.alpha());
    sp.i = 1;
    sp.consts = LinkConstants::from(params);
    out.closed_form = sinr_closed_form(sp);
    return out;
}

PowerLaw parse_power_law(const std::string& name)
{
    if (name == "constant") return PowerLaw::constant;
    if (name == "inv_sqrt") return PowerLaw::inv_sqrt;
    if (name == "inv") return PowerLaw::inv;
    throw std::invalid_argument("unknown power law '" + name + "'");
}

const char* to_string(PowerLaw law)
{
    switch (law) {
    case PowerLaw::constant:
        return "constant";
    case PowerLaw::inv_sqrt:
        return "inv_sqrt";
    case PowerLaw::inv:
        return "inv";
    }
    return "unknown";
}

double scale_power(double p_ref, int m_ref, int m, PowerLaw law)
{
    const double ratio = static_cast<double>(m_ref) / m;
    switch (law) {
    case PowerLaw::constant:
        return p_ref;
    case PowerLaw::inv_sqrt:
        return p_ref * std::sqrt(ratio);
    case PowerLaw::inv:
        return p_ref * ratio;
    }
    return p_ref;
}

std::vector<SweepPoint> sweep(const SystemParams& params, const SweepConfig& sc, const CampaignConfig& campaign,
                              const SimOptions& options)
{
    std::vector<SweepPoint> points;
    for (int m : sc.antennas) {
        for (double load : sc.loads) {
            SystemParams p = params;
            p.num_antennas = m;
            p.pu_over_sigma2 = scale_power(params.pu_over_sigma2, sc.reference_antennas, m, sc.pu_law);
            p.pt_over_sigma2 = scale_power(params.pt_over_sigma2, sc.reference_antennas, m, sc.pt_law);
            CampaignConfig c = campaign;
            c.mean_requests = load;
            SweepPoint pt;
            pt.m = m;
            pt.load = load;
            pt.pu_db = linear_to_db(p.pu_over_sigma2);
            pt.pt_db = linear_to_db(p.pt_over_sigma2);
            pt.metrics = run_campaign(p, c, options);
            points.push_back(std::move(pt));
        }
    }
    return points;
}

ResultRow to_row(const SweepPoint& point)
{
    return {point.m,
            point.load,
            point.pu_db,
            point.pt_db,
            point.metrics.avg_repeats,
            point.metrics.fail_prob,
            point.metrics.pf,
            point.metrics.pd,
            point.metrics.ci_avg_repeats};
}

void write_csv(std::ostream& out, std::span<const ResultRow> rows)
{
    std::ostringstream s;
    s << std::setprecision(10);
    s << "m,load,pu_db,pt_db,avg_repeats,fail_prob,pf,pd,ci_halfwidth\n";
    const auto field = [&s](double v) {
        if (std::isfinite(v)) {
            s << v;
        }
    };
    for (const auto& r : rows) {
        s << r.m << ',';
        field(r.load);
        s << ',';
        field(r.pu_db);
        s << ',';
        field(r.pt_db);
        s << ',';
        field(r.avg_repeats);
        s << ',';
        field(r.fail_prob);
        s << ',';
        field(r.pf);
        s << ',';
        field(r.pd);
        s << ',';
        field(r.ci_halfwidth);
        s << '\n';
    }
    out << s.str();
}

nlohmann::json metrics_json(const CampaignMetrics& m)
{
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [err, count] : m.ta_error_histogram) {
        hist[std::to_string(err)] = count;
    }
    return {
        {"avg_repeats", m.avg_repeats},
        {"fail_prob", m.fail_prob},
        {"pf", m.pf},
        {"pd", m.pd},
        {"ci_avg_repeats", m.ci_avg_repeats},
        {"ci_fail_prob", m.ci_fail_prob},
        {"success_per_attempt", m.success_per_attempt},
        {"resolved", m.resolved},
        {"failures", m.failures},
        {"attempts", m.attempts},
        {"ta_error_histogram", hist},
    };
}

}  // namespace massra
