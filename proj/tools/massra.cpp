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

// massra command-line front end.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "massra/analytic.hpp"
#include "massra/harness.hpp"

using namespace massra;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::uint64_t seed = 1;
    std::string out;
    std::string sidecar;
    int workers = 1;
};

void add_common(CLI::App* app, Common& c, bool with_output = true)
{
    app->add_option("-c,--config", c.config, "JSON config file");
    app->add_option("--set", c.overrides, "override, section.key=value (repeatable)");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("-j,--workers", c.workers, "worker threads");
    if (with_output) {
        app->add_option("-o,--out", c.out, "output file (default stdout)");
        app->add_option("--json", c.sidecar, "JSON sidecar path (default <out>.json)");
    }
}

json raw_config(const Common& c)
{
    json raw = c.config.empty() ? json::object() : load_config(c.config);
    for (const auto& o : c.overrides) {
        apply_override(raw, o);
    }
    return raw;
}

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw std::invalid_argument("cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_sidecar(const Common& c, const SystemParams& params, const json& extra)
{
    std::string path = c.sidecar;
    if (path.empty()) {
        if (c.out.empty()) {
            return;
        }
        path = c.out + ".json";
    }
    json doc = extra;
    doc["seed"] = c.seed;
    doc["config"] = to_json(params);
    std::ofstream f(path);
    if (!f) {
        throw std::invalid_argument("cannot write " + path);
    }
    f << std::setw(2) << doc << '\n';
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) {
            parts.push_back(item);
        }
    }
    return parts;
}

void write_matrix_csv(std::ostream& out, const CMatrix& mat)
{
    out << std::setprecision(17) << "m,t,re,im\n";
    for (std::size_t m = 0; m < mat.rows(); ++m) {
        for (std::size_t t = 0; t < mat.cols(); ++t) {
            out << m << ',' << t << ',' << mat(m, t).real() << ',' << mat(m, t).imag() << '\n';
        }
    }
}

CMatrix read_matrix_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    std::string line;
    std::getline(in, line);
    struct Entry {
        std::size_t m, t;
        cd v;
    };
    std::vector<Entry> entries;
    std::size_t rows = 0, cols = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 4) {
            throw std::invalid_argument("malformed uplink row: " + line);
        }
        Entry e{std::stoul(f[0]), std::stoul(f[1]), cd(std::stod(f[2]), std::stod(f[3]))};
        rows = std::max(rows, e.m + 1);
        cols = std::max(cols, e.t + 1);
        entries.push_back(e);
    }
    CMatrix mat(rows, cols);
    for (const auto& e : entries) {
        mat(e.m, e.t) = e.v;
    }
    return mat;
}

std::vector<UserRealization> parse_users(const std::string& spec, const SystemParams& params, Rng& rng)
{
    // "k:tau,k:tau,..."
    std::vector<UserRealization> users;
    for (const auto& item : split(spec, ',')) {
        const auto kv = split(item, ':');
        if (kv.size() != 2) {
            throw std::invalid_argument("users must look like k:tau,k:tau");
        }
        UserRealization ue;
        ue.preamble_idx = std::stoi(kv[0]);
        ue.tau = std::stoi(kv[1]);
        params.shift(ue.preamble_idx);
        if (ue.tau < 0 || ue.tau > params.max_round_trip()) {
            throw std::invalid_argument("tau outside [0, G - L]");
        }
        ue.cir = draw_cir(params, 0.0, rng);
        users.push_back(std::move(ue));
    }
    return users;
}

SimOptions sim_options(const std::string& route, const std::string& split_name, bool emp_ups, int workers)
{
    SimOptions o;
    o.route = parse_route(route);
    o.split = parse_power_split(split_name);
    o.empirical_upsilon = emp_ups;
    o.workers = workers;
    return o;
}

// 95% normal-approximation half-width of a Bernoulli rate.
double bernoulli_ci(double p, int n)
{
    return 1.959963984540054 * std::sqrt(p * (1.0 - p) / n);
}

std::vector<int> parse_ints(const std::string& s)
{
    std::vector<int> out;
    for (const auto& p : split(s, ',')) {
        out.push_back(std::stoi(p));
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> out;
    for (const auto& p : split(s, ',')) {
        out.push_back(std::stod(p));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"massra: massive MIMO random-access link simulator"};
    app.require_subcommand(1);

    // dump-preamble
    Common dp;
    int dp_shift = 0;
    bool dp_frame = false;
    auto* cmd_dump = app.add_subcommand("dump-preamble", "write the root or shifted ZC sequence as CSV (t,re,im)");
    add_common(cmd_dump, dp, false);
    cmd_dump->add_option("-o,--out", dp.out, "output file");
    cmd_dump->add_option("--shift", dp_shift, "cyclic shift c");
    cmd_dump->add_flag("--frame", dp_frame, "emit the full CP + ZC + guard frame");

    // synth-uplink
    Common su;
    std::string su_users;
    double su_load = 0.0;
    auto* cmd_synth = app.add_subcommand("synth-uplink", "synthesize received uplink samples (m,t,re,im)");
    add_common(cmd_synth, su);
    cmd_synth->add_option("--users", su_users, "explicit users k:tau,... (CIRs drawn from the seed)");
    cmd_synth->add_option("--load", su_load, "draw Poisson(load) users instead");

    // detect
    Common de;
    std::string de_input, de_profiles, de_groups;
    auto* cmd_detect = app.add_subcommand("detect", "correlate an uplink CSV, emit profiles and groups");
    add_common(cmd_detect, de, false);
    cmd_detect->add_option("-i,--input", de_input, "uplink CSV from synth-uplink")->required();
    cmd_detect->add_option("--profiles", de_profiles, "profile CSV (k,t,v,p); default stdout");
    cmd_detect->add_option("--groups", de_groups, "group CSV (k,group,ta_hat); default stdout");

    // codec
    auto* cmd_codec = app.add_subcommand("codec", "encode or decode 24-bit RAR frames as hex");
    cmd_codec->require_subcommand(1);
    int cx_ta = 0, cx_rb = 0, cx_num = 1;
    std::string cx_hex;
    auto* cmd_enc = cmd_codec->add_subcommand("encode", "payload fields to hex");
    cmd_enc->add_option("--ta", cx_ta)->required();
    cmd_enc->add_option("--rb-start", cx_rb)->required();
    cmd_enc->add_option("--num-rb", cx_num)->required();
    auto* cmd_dec = cmd_codec->add_subcommand("decode", "hex to status and payload fields");
    cmd_dec->add_option("hex", cx_hex)->required();

    // analytic
    Common an;
    std::string an_what = "sinr";
    double an_m = 20, an_eu = 0.0913, an_et = 0.0913, an_eps = std::pow(10.0, -0.3), an_kappa = 5.0;
    double an_gamma = -1, an_gamma_d = -1;
    int an_kg = 2;
    auto* cmd_an = app.add_subcommand("analytic", "closed-form evaluations, one-row CSV");
    add_common(cmd_an, an, false);
    cmd_an->add_option("-o,--out", an.out, "output file");
    cmd_an->add_option("--what", an_what, "sinr | sinr-scaled | gamma-u | pf-bound | required-pt | min-antennas")
        ->check(CLI::IsMember({"sinr", "sinr-scaled", "gamma-u", "pf-bound", "required-pt", "min-antennas"}));
    cmd_an->add_option("--m", an_m, "antennas");
    cmd_an->add_option("--kg", an_kg, "UEs in the group");
    cmd_an->add_option("--eu", an_eu, "E_u (c_1)");
    cmd_an->add_option("--et", an_et, "E_T (c_2)");
    cmd_an->add_option("--epsilon", an_eps, "target SINR (linear)");
    cmd_an->add_option("--kappa", an_kappa, "threshold scale");
    cmd_an->add_option("--gamma", an_gamma, "p_u/sigma^2 for --what sinr (default from config)");
    cmd_an->add_option("--gamma-d", an_gamma_d, "gamma_d for --what sinr (default from config)");

    // campaigns
    Common sim;
    double sim_load = 11.0;
    int sim_frames = 2000, sim_replicas = 16, sim_warmup = 10;
    std::string sim_route = "correlation", sim_split = "per_preamble";
    bool sim_emp_ups = false;
    auto* cmd_sim = app.add_subcommand("simulate", "one RA campaign");
    add_common(cmd_sim, sim);
    auto add_campaign = [&](CLI::App* a) {
        a->add_option("--frames", sim_frames, "measured frames");
        a->add_option("--replicas", sim_replicas, "independent chains");
        a->add_option("--warmup", sim_warmup, "warm-up frames per chain");
        a->add_option("--route", sim_route, "correlation | waveform");
        a->add_option("--power-split", sim_split, "per_preamble | total_groups");
        a->add_flag("--empirical-upsilon", sim_emp_ups, "normalize beams per draw");
    };
    add_campaign(cmd_sim);
    cmd_sim->add_option("--load", sim_load, "mean new RA requests per frame");

    Common sw;
    std::string sw_m = "20,80", sw_loads = "11", sw_pu_law = "constant", sw_pt_law = "constant";
    int sw_ref = 20;
    auto* cmd_sweep = app.add_subcommand("sweep", "campaign grid over M, load and power laws");
    add_common(cmd_sweep, sw);
    add_campaign(cmd_sweep);
    cmd_sweep->add_option("--antennas", sw_m, "comma list of M");
    cmd_sweep->add_option("--loads", sw_loads, "comma list of loads");
    cmd_sweep->add_option("--pu-law", sw_pu_law, "constant | inv_sqrt | inv");
    cmd_sweep->add_option("--pt-law", sw_pt_law, "constant | inv_sqrt | inv");
    cmd_sweep->add_option("--reference-antennas", sw_ref, "M at which configured powers apply");

    Common fm;
    std::string fm_m = "20,40,80,160,320", fm_mode = "empirical";
    MinPowerConfig fm_cfg;
    auto* cmd_fmp = app.add_subcommand("find-min-power", "minimum p_u/sigma^2 for a target TA error rate");
    add_common(cmd_fmp, fm);
    cmd_fmp->add_option("--antennas", fm_m, "comma list of M");
    cmd_fmp->add_option("--target-pe", fm_cfg.target_pe);
    cmd_fmp->add_option("--target-pf", fm_cfg.target_pf);
    cmd_fmp->add_option("--mode", fm_mode, "bound | gaussian | empirical");
    cmd_fmp->add_option("--trials", fm_cfg.trials);
    cmd_fmp->add_option("--calibration-trials", fm_cfg.calibration_trials);
    cmd_fmp->add_option("--lo-db", fm_cfg.lo_db);
    cmd_fmp->add_option("--hi-db", fm_cfg.hi_db);

    Common pp;
    std::string pp_m = "20,40,80,160,320", pp_kappa = "";
    int pp_trials = 10000;
    auto* cmd_pfpd = app.add_subcommand("pf-pd", "false-alarm and detection rates against M");
    add_common(cmd_pfpd, pp);
    cmd_pfpd->add_option("--antennas", pp_m, "comma list of M");
    cmd_pfpd->add_option("--kappa", pp_kappa, "comma list of kappa (default from config)");
    cmd_pfpd->add_option("--trials", pp_trials);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_dump->parsed()) {
            const auto params = derive(raw_config(dp));
            const auto root = root_zc(params.n_zc, params.zc_root);
            const auto samples =
                dp_frame ? build_frame(root, dp_shift, params.guard).samples : shifted(root, dp_shift);
            Output out(dp.out);
            out.stream() << std::setprecision(17) << "t,re,im\n";
            for (std::size_t t = 0; t < samples.size(); ++t) {
                out.stream() << t << ',' << samples[t].real() << ',' << samples[t].imag() << '\n';
            }
        } else if (cmd_synth->parsed()) {
            const auto params = derive(raw_config(su));
            Rng rng(su.seed, {0});
            std::vector<UserRealization> users;
            if (!su_users.empty()) {
                users = parse_users(su_users, params, rng);
            } else if (su_load > 0.0) {
                users = draw_users(params, su_load, rng);
            }
            const auto root = root_zc(params.n_zc, params.zc_root);
            std::vector<PreambleFrame> frames;
            for (const auto& ue : users) {
                frames.push_back(build_frame(root, params.shift(ue.preamble_idx), params.guard));
            }
            const auto rx = synthesize_uplink(users, frames, params, rng);
            Output out(su.out);
            write_matrix_csv(out.stream(), rx.samples);
            json truth = json::array();
            for (const auto& ue : users) {
                truth.push_back({{"preamble_idx", ue.preamble_idx}, {"tau", ue.tau}});
            }
            write_sidecar(su, params, {{"users", truth}});
        } else if (cmd_detect->parsed()) {
            json raw = raw_config(de);
            RxUplink rx{read_matrix_csv(de_input)};
            raw["array"]["num_antennas"] = static_cast<int>(rx.samples.rows());
            const auto params = derive(raw);
            const auto bank = correlate(rx, root_zc(params.n_zc, params.zc_root), params.guard);
            Output prof_out(de_profiles);
            Output grp_out(de_groups);
            std::ostringstream prof_s, grp_s;
            prof_s << std::setprecision(17) << "k,t,v,p\n";
            grp_s << "k,group,ta_hat\n";
            for (int k = 1; k <= params.num_preambles; ++k) {
                const auto prof = profile(bank, params, k, params.theta0());
                for (std::size_t t = 0; t < prof.v.size(); ++t) {
                    prof_s << k << ',' << t << ',' << prof.v[t] << ',' << prof.p[t] << '\n';
                }
                const auto groups = group(prof, params.delay_spread);
                for (std::size_t g = 0; g < groups.size(); ++g) {
                    grp_s << k << ',' << g + 1 << ',' << groups[g].ta_hat << '\n';
                }
            }
            prof_out.stream() << prof_s.str();
            grp_out.stream() << grp_s.str();
        } else if (cmd_enc->parsed()) {
            std::cout << to_hex(encode({cx_ta, cx_rb, cx_num})) << '\n';
        } else if (cmd_dec->parsed()) {
            const auto result = decode_bits(from_hex(cx_hex));
            std::cout << "status,ta,rb_start,num_rb\n" << to_string(result.status);
            if (result.payload) {
                std::cout << ',' << result.payload->ta << ',' << result.payload->rb_start << ','
                          << result.payload->num_rb;
            } else {
                std::cout << ",,,";
            }
            std::cout << '\n';
            return result.status == DecodeStatus::success ? 0 : 2;
        } else if (cmd_an->parsed()) {
            const auto params = derive(raw_config(an));
            const auto consts = LinkConstants::from(params);
            const std::vector<double> alphas(static_cast<std::size_t>(an_kg), params.alpha());
            Output out(an.out);
            auto& o = out.stream();
            o << std::setprecision(12);
            if (an_what == "sinr") {
                SinrParams sp;
                sp.m = an_m;
                sp.gamma = an_gamma > 0 ? an_gamma : params.pu_over_sigma2;
                sp.gamma_d = an_gamma_d > 0 ? an_gamma_d
                                            : static_cast<double>(params.n_rs) / params.n_sc * params.pt_over_sigma2;
                sp.alphas = alphas;
                sp.consts = consts;
                o << "m,kg,gamma,gamma_d,sinr,sinr_db\n";
                const double s = sinr_closed_form(sp);
                o << an_m << ',' << an_kg << ',' << sp.gamma << ',' << sp.gamma_d << ',' << s << ','
                  << linear_to_db(s) << '\n';
            } else if (an_what == "sinr-scaled") {
                const double s = sinr_scaled(an_m, an_eu, an_et, alphas, 1, consts);
                o << "m,kg,eu,et,sinr,sinr_db\n"
                  << an_m << ',' << an_kg << ',' << an_eu << ',' << an_et << ',' << s << ',' << linear_to_db(s) << '\n';
            } else if (an_what == "gamma-u") {
                const double g = gamma_u(an_eu, an_et, params.alpha(), consts);
                o << "eu,et,gamma_u,gamma_u_db\n" << an_eu << ',' << an_et << ',' << g << ',' << linear_to_db(g) << '\n';
            } else if (an_what == "pf-bound") {
                o << "kappa,guard,pf_bound\n" << an_kappa << ',' << params.guard << ',' << pf_bound(an_kappa, params.guard)
                  << '\n';
            } else if (an_what == "required-pt") {
                const auto pt = required_pt(an_eps, an_m, an_eu, alphas, 1, consts);
                if (!pt) {
                    std::cerr << "infeasible: epsilon at or above the zero-downlink-noise ceiling\n";
                    return 3;
                }
                o << "m,kg,eu,epsilon,pt_over_sigma2,pt_db\n"
                  << an_m << ',' << an_kg << ',' << an_eu << ',' << an_eps << ',' << *pt << ',' << linear_to_db(*pt)
                  << '\n';
            } else {
                const auto ma = min_antennas({an_eu, an_et, an_eps}, alphas, 1, consts);
                if (!ma) {
                    std::cerr << "infeasible: epsilon >= gamma_u\n";
                    return 3;
                }
                o << "kg,eu,et,epsilon,m_star,m_ceil\n"
                  << an_kg << ',' << an_eu << ',' << an_et << ',' << an_eps << ',' << ma->root << ',' << ma->ceiled
                  << '\n';
            }
        } else if (cmd_sim->parsed() || cmd_sweep->parsed()) {
            Common& c = cmd_sim->parsed() ? sim : sw;
            const auto params = derive(raw_config(c));
            const auto opts = sim_options(sim_route, sim_split, sim_emp_ups, c.workers);
            CampaignConfig cc;
            cc.mean_requests = sim_load;
            cc.frames = sim_frames;
            cc.replicas = sim_replicas;
            cc.warmup = sim_warmup;
            cc.seed = c.seed;
            SweepConfig sc;
            if (cmd_sim->parsed()) {
                sc.antennas = {params.num_antennas};
                sc.loads = {sim_load};
                sc.reference_antennas = params.num_antennas;
            } else {
                sc.antennas = parse_ints(sw_m);
                sc.loads = parse_doubles(sw_loads);
                sc.pu_law = parse_power_law(sw_pu_law);
                sc.pt_law = parse_power_law(sw_pt_law);
                sc.reference_antennas = sw_ref;
            }
            const auto points = sweep(params, sc, cc, opts);
            std::vector<ResultRow> rows;
            json details = json::array();
            for (const auto& p : points) {
                rows.push_back(to_row(p));
                auto d = metrics_json(p.metrics);
                d["m"] = p.m;
                d["load"] = p.load;
                details.push_back(d);
            }
            Output out(c.out);
            write_csv(out.stream(), rows);
            write_sidecar(c, params,
                          {{"command", cmd_sim->parsed() ? "simulate" : "sweep"},
                           {"campaign",
                            {{"frames", cc.frames}, {"replicas", cc.replicas}, {"warmup", cc.warmup},
                             {"route", sim_route}, {"power_split", sim_split}, {"empirical_upsilon", sim_emp_ups}}},
                           {"sweep",
                            {{"pu_law", to_string(sc.pu_law)}, {"pt_law", to_string(sc.pt_law)},
                             {"reference_antennas", sc.reference_antennas}}},
                           {"points", details}});
        } else if (cmd_fmp->parsed()) {
            const auto params = derive(raw_config(fm));
            fm_cfg.mode = parse_threshold_mode(fm_mode);
            fm_cfg.seed = fm.seed;
            fm_cfg.workers = fm.workers;
            std::vector<ResultRow> rows;
            json details = json::array();
            bool all_found = true;
            for (int m : parse_ints(fm_m)) {
                SystemParams p = params;
                p.num_antennas = m;
                const auto r = find_min_power(p, fm_cfg);
                const double nan = std::nan("");
                rows.push_back({m, nan, r.pu_db ? *r.pu_db : nan, linear_to_db(p.pt_over_sigma2), nan, nan,
                                fm_cfg.target_pf, 1.0 - r.pe, nan});
                details.push_back({{"m", m}, {"theta0", r.theta0}, {"pe", r.pe}, {"found", r.pu_db.has_value()},
                                   {"message", r.message}});
                if (!r.pu_db) {
                    all_found = false;
                    std::cerr << "M=" << m << ": " << r.message << '\n';
                }
            }
            Output out(fm.out);
            write_csv(out.stream(), rows);
            write_sidecar(fm, params,
                          {{"command", "find-min-power"},
                           {"search",
                            {{"target_pe", fm_cfg.target_pe}, {"target_pf", fm_cfg.target_pf}, {"mode", fm_mode},
                             {"trials", fm_cfg.trials}, {"calibration_trials", fm_cfg.calibration_trials},
                             {"lo_db", fm_cfg.lo_db}, {"hi_db", fm_cfg.hi_db}}},
                           {"points", details}});
            return all_found ? 0 : 3;
        } else if (cmd_pfpd->parsed()) {
            const auto params = derive(raw_config(pp));
            std::vector<double> kappas = pp_kappa.empty() ? std::vector<double>{params.kappa} : parse_doubles(pp_kappa);
            std::vector<ResultRow> rows;
            json details = json::array();
            for (double kappa : kappas) {
                for (int m : parse_ints(pp_m)) {
                    SystemParams p = params;
                    p.num_antennas = m;
                    p.kappa = kappa;
                    const auto r = measure_pf_pd(p, pp_trials, pp.seed);
                    const double nan = std::nan("");
                    rows.push_back({m, nan, linear_to_db(p.pu_over_sigma2), linear_to_db(p.pt_over_sigma2), nan, nan,
                                    r.pf, r.pd, bernoulli_ci(r.pf, pp_trials)});
                    details.push_back({{"m", m}, {"kappa", kappa}, {"pf", r.pf}, {"pd", r.pd},
                                       {"pd_exact_ta", r.pd_exact}, {"trials", r.trials}});
                }
            }
            Output out(pp.out);
            write_csv(out.stream(), rows);
            write_sidecar(pp, params, {{"command", "pf-pd"}, {"points", details}});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
