#ifndef BEAMCOMB_HARNESS_HPP
#define BEAMCOMB_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "beamcomb/beamspace.hpp"
#include "beamcomb/channel.hpp"
#include "beamcomb/combiner.hpp"
#include "beamcomb/core.hpp"
#include "beamcomb/report.hpp"
#include "beamcomb/rng.hpp"
#include "beamcomb/solvers.hpp"

namespace beamcomb {

enum class Scheme { none, sgbc, bbbc, optimal, exhaustive };

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::none: return "none";
        case Scheme::sgbc: return "sgbc";
        case Scheme::bbbc: return "bbbc";
        case Scheme::optimal: return "optimal";
        case Scheme::exhaustive: return "exhaustive";
    }
    return "?";
}

inline Scheme scheme_from_name(const std::string& s) {
    if (s == "none") return Scheme::none;
    if (s == "sgbc") return Scheme::sgbc;
    if (s == "bbbc") return Scheme::bbbc;
    if (s == "optimal") return Scheme::optimal;
    if (s == "exhaustive") return Scheme::exhaustive;
    throw ConfigError("unknown scheme '" + s + "'");
}

// Monte Carlo experiment configuration. Desk-scale defaults run a full sweep
// in minutes; paper_scale() switches to the large-array preset.
struct ExperimentConfig {
    int antennas = 64;
    int users = 2;
    int rays = 6;
    double spread_deg = 45.0;
    double sector_deg = 120.0;
    int beams = 16;
    std::vector<int> rf_chains = {2, 4, 6, 8, 10, 12};
    std::vector<int> bits = {1, 2};
    std::vector<double> snr_db = {0.0};
    size_t samples = 2048;  // time-frequency samples for the sample CCM
    int trials = 50;
    uint64_t master_seed = 1;
    std::vector<Scheme> schemes = {Scheme::none, Scheme::sgbc, Scheme::bbbc, Scheme::optimal};
    double epsilon = 0.01;
    uint64_t node_budget = 1000000;
    bool use_corollary1_bound = false;
    bool record_timing = false;  // off by default so reports are byte-reproducible
    double ray_power_decay = 0.0;

    static ExperimentConfig paper_scale() {
        ExperimentConfig c;
        c.antennas = 128;
        c.beams = 32;
        c.rf_chains = {4, 8, 12, 16, 20, 24};
        return c;
    }

    void validate() const {
        if (trials < 1) throw ConfigError("config: trials must be >= 1");
        if (schemes.empty()) throw ConfigError("config: scheme list must be non-empty");
        if (beams < 1 || beams > antennas) throw ConfigError("config: need 1 <= beams <= antennas");
        if (rf_chains.empty() || bits.empty() || snr_db.empty())
            throw ConfigError("config: sweep lists must be non-empty");
        for (int k : rf_chains)
            if (k < 1 || k > beams) throw ConfigError("config: need 1 <= rf_chains <= beams");
        for (int b : bits)
            if (b < 1 || b > 16) throw ConfigError("config: bits out of range");
        if (samples < 1) throw ConfigError("config: samples must be >= 1");
        if (epsilon < 0.0) throw ConfigError("config: epsilon must be >= 0");
        ChannelConfig ch = channel_config();
        Rng probe(1);
        sample_geometry(ch, probe);  // validates the geometry parameters
    }

    ChannelConfig channel_config() const {
        ChannelConfig ch;
        ch.users = users;
        ch.rays = rays;
        ch.spread_deg = spread_deg;
        ch.sector_deg = sector_deg;
        ch.antennas = antennas;
        ch.ray_power_decay = ray_power_decay;
        return ch;
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& s, F&& conv) {
    std::vector<T> out;
    for (const std::string& tok : split_list(s)) out.push_back(conv(tok));
    if (out.empty()) throw ConfigError("empty list value '" + s + "'");
    return out;
}

inline bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("expected boolean, got '" + v + "'");
}

}  // namespace detail

// Apply one key=value assignment (config-file key or CLI flag name).
inline void config_set(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "antennas") cfg.antennas = std::stoi(value);
        else if (key == "users") cfg.users = std::stoi(value);
        else if (key == "rays") cfg.rays = std::stoi(value);
        else if (key == "spread_deg" || key == "spread") cfg.spread_deg = std::stod(value);
        else if (key == "sector_deg" || key == "sector") cfg.sector_deg = std::stod(value);
        else if (key == "beams") cfg.beams = std::stoi(value);
        else if (key == "rf_chains" || key == "rf-chains")
            cfg.rf_chains = detail::parse_list<int>(value, [](const std::string& t) { return std::stoi(t); });
        else if (key == "bits")
            cfg.bits = detail::parse_list<int>(value, [](const std::string& t) { return std::stoi(t); });
        else if (key == "snr_db" || key == "snr-db")
            cfg.snr_db = detail::parse_list<double>(value, [](const std::string& t) { return std::stod(t); });
        else if (key == "samples") cfg.samples = std::stoull(value);
        else if (key == "trials") cfg.trials = std::stoi(value);
        else if (key == "seed" || key == "master_seed") cfg.master_seed = std::stoull(value);
        else if (key == "schemes" || key == "scheme") {
            cfg.schemes.clear();
            for (const std::string& t : detail::split_list(value)) cfg.schemes.push_back(scheme_from_name(t));
        } else if (key == "epsilon") cfg.epsilon = std::stod(value);
        else if (key == "node_budget" || key == "node-budget") cfg.node_budget = std::stoull(value);
        else if (key == "use_corollary1_bound") cfg.use_corollary1_bound = detail::parse_bool(value);
        else if (key == "timing") cfg.record_timing = detail::parse_bool(value);
        else if (key == "ray_power_decay") cfg.ray_power_decay = std::stod(value);
        else if (key == "preset") {
            if (value == "paper") cfg = ExperimentConfig::paper_scale();
            else if (value != "desk") throw ConfigError("unknown preset '" + value + "'");
        } else throw ConfigError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value '" + value + "' for key '" + key + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("value out of range '" + value + "' for key '" + key + "'");
    }
}

// key=value lines; '#' starts a comment.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        config_set(cfg, key, value);
    }
    return cfg;
}

namespace detail {

struct TrialPipeline {
    Ccm R_sel;           // selected-beam CCM (L x L)
    double total_power;  // trace of the antenna-domain signal-estimate CCM
    std::vector<double> sel_eigs;  // eigenvalues of R_sel, non-increasing
};

inline TrialPipeline trial_pipeline(const ExperimentConfig& cfg, const MpcSet& geo,
                                    double snr_db, Rng& rng) {
    TrialPipeline out;
    const Ccm rt = sample_ccm(geo, cfg.samples, 1, snr_db, rng);
    const Ccm rs = signal_ccm_estimate(rt);
    out.total_power = trace(rs.matrix).real();
    BeamspaceOperator op = dft_operator(cfg.antennas);
    const Ccm rbs = beamspace_ccm(op, rs);
    const std::vector<int> sel = select_beams(rbs, cfg.beams);
    out.R_sel.kind = rs.kind;
    out.R_sel.sample_count = rs.sample_count;
    out.R_sel.noise_variance = rs.noise_variance;
    out.R_sel.matrix = submatrix(rbs.matrix, sel, sel);
    out.R_sel.matrix = hermitian_part(out.R_sel.matrix);
    out.sel_eigs = herm_eig(out.R_sel.matrix).values;
    return out;
}

// Efficiency of the first K columns against the antenna-domain total power.
inline double sliced_efficiency(const CombinerMatrix& comb, int K, const Ccm& R_sel,
                                double total_power) {
    const int L = comb.columns.rows;
    CMat cols(L, K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < L; ++i) cols(i, k) = comb.columns(i, k);
    return detail::span_efficiency(cols, R_sel, total_power);
}

}  // namespace detail

// Full experiment: per trial derive a seed, generate geometry and a sample
// CCM, run the beamspace pipeline and every requested scheme over the sweep
// axes. Column-sequential solvers run once at the largest K and are sliced
// for smaller K values (the per-column results coincide by construction).
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const ChannelConfig chan = cfg.channel_config();
    const int K_max = *std::max_element(cfg.rf_chains.begin(), cfg.rf_chains.end());

    std::vector<TrialRecord> records;
    for (int t = 0; t < cfg.trials; ++t) {
        const uint64_t trial_seed = Rng::derive(cfg.master_seed, static_cast<uint64_t>(t));
        Rng geo_rng(trial_seed);
        const MpcSet geo = sample_geometry(chan, geo_rng);

        for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
            const double snr = cfg.snr_db[si];
            Rng ccm_rng(Rng::derive(trial_seed, 1000 + si));
            const detail::TrialPipeline pipe = detail::trial_pipeline(cfg, geo, snr, ccm_rng);

            std::vector<double> eta_opt_by_k(cfg.rf_chains.size());
            for (size_t ki = 0; ki < cfg.rf_chains.size(); ++ki) {
                double s = 0.0;
                for (int i = 0; i < cfg.rf_chains[ki]; ++i) s += std::max(pipe.sel_eigs[i], 0.0);
                eta_opt_by_k[ki] = s / pipe.total_power;
            }

            for (Scheme scheme : cfg.schemes) {
                int order = 0;
                auto base_record = [&](int K, int B) {
                    TrialRecord r;
                    r.trial = static_cast<uint64_t>(t);
                    r.seed = trial_seed;
                    r.scheme = scheme_name(scheme);
                    r.M = cfg.antennas;
                    r.L = cfg.beams;
                    r.K = K;
                    r.B = B;
                    r.snr_db = snr;
                    r.sweep_order = order++;
                    return r;
                };

                if (scheme == Scheme::none) {
                    for (size_t ki = 0; ki < cfg.rf_chains.size(); ++ki) {
                        TrialRecord r = base_record(cfg.rf_chains[ki], 0);
                        double s = 0.0;
                        for (int i = 0; i < cfg.rf_chains[ki]; ++i)
                            s += pipe.R_sel.matrix(i, i).real();
                        r.eta = s / pipe.total_power;
                        r.eta_opt = eta_opt_by_k[ki];
                        records.push_back(std::move(r));
                    }
                } else if (scheme == Scheme::optimal) {
                    for (size_t ki = 0; ki < cfg.rf_chains.size(); ++ki) {
                        TrialRecord r = base_record(cfg.rf_chains[ki], 0);
                        r.eta = eta_opt_by_k[ki];
                        r.eta_opt = eta_opt_by_k[ki];
                        records.push_back(std::move(r));
                    }
                } else {
                    for (int B : cfg.bits) {
                        const PhaseAlphabet alphabet = PhaseAlphabet::make(B);
                        CombinerMatrix comb;
                        SolverReport rep;
                        bool ok = true;
                        std::string err;
                        try {
                            if (scheme == Scheme::sgbc) {
                                std::tie(comb, rep) = sg_bc(pipe.R_sel, K_max, alphabet);
                            } else if (scheme == Scheme::bbbc) {
                                std::tie(comb, rep) = bb_bc(pipe.R_sel, K_max, alphabet, cfg.epsilon,
                                                            cfg.node_budget, cfg.use_corollary1_bound);
                            } else {  // exhaustive
                                comb = exhaustive(pipe.R_sel, K_max, alphabet);
                            }
                        } catch (const std::exception& e) {
                            ok = false;
                            err = e.what();
                        }
                        for (size_t ki = 0; ki < cfg.rf_chains.size(); ++ki) {
                            const int K = cfg.rf_chains[ki];
                            TrialRecord r = base_record(K, B);
                            r.eta_opt = eta_opt_by_k[ki];
                            if (!ok) {
                                r.failed = true;
                                r.error = err;
                            } else {
                                r.eta = detail::sliced_efficiency(comb, K, pipe.R_sel,
                                                                  pipe.total_power);
                                uint64_t nodes = 0;
                                double ms = 0.0;
                                for (int c = 0; c < K && c < static_cast<int>(rep.columns.size()); ++c) {
                                    nodes += rep.columns[c].nodes_expanded;
                                    ms += rep.columns[c].wall_ms;
                                }
                                r.nodes = nodes;
                                if (cfg.record_timing) r.ms = static_cast<uint64_t>(std::llround(ms));
                            }
                            records.push_back(std::move(r));
                        }
                    }
                }
            }
        }
    }

    std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        if (a.trial != b.trial) return a.trial < b.trial;
        if (a.scheme != b.scheme) return a.scheme < b.scheme;
        return a.sweep_order < b.sweep_order;
    });
    return records;
}

// ---------------------------------------------------------------------------
// Embedded self-check suite (release gate for a fresh build).

namespace detail {

inline CMat random_psd(int n, Rng& rng, double noise_floor = 0.0) {
    CMat G(n, n);
    for (cx& v : G.a) v = rng.cgaussian(1.0);
    CMat R = G * adjoint(G);
    const double inv = 1.0 / n;
    for (cx& v : R.a) v *= inv;
    for (int i = 0; i < n; ++i) R(i, i) += noise_floor;
    return hermitian_part(R);
}

inline CVec random_cvec(int n, Rng& rng) {
    CVec v(n);
    for (cx& x : v) x = rng.cgaussian(1.0);
    return v;
}

}  // namespace detail

struct SelftestResult {
    int passed = 0;
    std::vector<std::string> failed;
    bool ok() const { return failed.empty(); }
};

// Invariant suite: secular residuals, closed-form sub-problem optimality vs a
// random-sampling oracle, branch-and-bound vs exhaustive enumeration, and an
// eigensolver reconstruction check. `tol_scale` tightens/loosens every
// tolerance and exists so the failure path itself can be exercised.
inline SelftestResult selftest(std::ostream& os, double tol_scale = 1.0) {
    SelftestResult res;
    auto check = [&](const std::string& name, bool ok) {
        os << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (ok)
            ++res.passed;
        else
            res.failed.push_back(name);
    };

    {  // eigensolver reconstruction
        Rng rng(11);
        bool ok = true;
        for (int rep = 0; rep < 5 && ok; ++rep) {
            const CMat A = detail::random_psd(8, rng);
            const HermEig e = herm_eig(A);
            CMat recon(8, 8);
            for (int k = 0; k < 8; ++k) {
                CVec v(8);
                for (int i = 0; i < 8; ++i) v[i] = e.vectors(i, k);
                add_outer(recon, v, e.values[k]);
            }
            ok = fro_norm(recon - A) <= tol_scale * 1e-9 * fro_norm(A);
        }
        check("herm_eig reconstruction", ok);
    }

    {  // secular residuals
        Rng rng(12);
        bool ok = true;
        for (int rep = 0; rep < 200 && ok; ++rep) {
            SecularProblem p;
            const int n = 1 + static_cast<int>(rng.next_u64() % 5);
            for (int i = 0; i < n; ++i) {
                p.poles.push_back(rng.uniform(0.0, 4.0));
                p.weights.push_back(rng.uniform(0.01, 2.0));
            }
            std::sort(p.poles.rbegin(), p.poles.rend());
            p.d = rng.uniform(0.5, 3.0);
            p.r = rng.uniform(0.0, 4.0);
            const double root = solve_secular(p);
            ok = std::abs(secular_f(p, root)) <= tol_scale * 1e-10 * std::max(1.0, p.d * root) &&
                 root > p.poles.front() && root <= secular_upper_bound(p) + 1e-12;
        }
        check("secular residual and interval", ok);
    }

    {  // closed-form sub-problem vs sampling oracle, 20 seeded instances
        Rng rng(13);
        bool ok = true;
        for (int rep = 0; rep < 20 && ok; ++rep) {
            const int L = 3 + static_cast<int>(rng.next_u64() % 3);
            const CMat R = detail::random_psd(L, rng);
            const SubproblemInstance inst = SubproblemInstance::make(R, {cx(1.0, 0.0)});
            const SubproblemSolution sol = solve_subproblem(inst);
            for (int s = 0; s < 2000 && ok; ++s) {
                CVec x = detail::random_cvec(L, rng);
                x[0] = cx(1.0, 0.0);
                ok = sol.lambda_star >= rayleigh(x, R) - tol_scale * 1e-9;
            }
            if (ok && sol.kind == SubproblemCase::secular) {
                CVec x = inst.d_I;
                x.insert(x.end(), sol.w_J.begin(), sol.w_J.end());
                ok = std::abs(rayleigh(x, R) - sol.lambda_star) <=
                     tol_scale * 1e-8 * std::max(1.0, sol.lambda_star);
            }
        }
        check("sub-problem optimum vs sampling oracle", ok);
    }

    {  // branch-and-bound matches exhaustive enumeration
        Rng rng(14);
        const PhaseAlphabet a1 = PhaseAlphabet::make(1);
        bool ok = true;
        for (int rep = 0; rep < 10 && ok; ++rep) {
            Ccm R;
            R.matrix = detail::random_psd(6, rng);
            const CombinerMatrix ex = exhaustive(R, 1, a1);
            auto [bb, rep_bb] = bb_bc(R, 1, a1, 0.0, 1000000);
            CVec we(6), wb(6);
            for (int i = 0; i < 6; ++i) {
                we[i] = ex.columns(i, 0);
                wb[i] = bb.columns(i, 0);
            }
            ok = std::abs(rayleigh(we, R.matrix) - rayleigh(wb, R.matrix)) <= tol_scale * 1e-12;
        }
        check("branch-and-bound vs exhaustive", ok);
    }

    {  // beamspace leakage profile is a probability vector
        bool ok = true;
        for (double theta : {0.0, 0.063, -0.41, 1.2}) {
            const std::vector<double> prof = leakage_profile(theta, 16);
            double s = 0.0;
            for (double v : prof) {
                if (v < -1e-14) ok = false;
                s += v;
            }
            ok = ok && std::abs(s - 1.0) <= tol_scale * 1e-10;
        }
        check("leakage profile normalization", ok);
    }

    os << res.passed << " passed, " << res.failed.size() << " failed\n";
    return res;
}

}  // namespace beamcomb

#endif
