// Acceptance gate: one pass/fail line per release criterion, nonzero exit if
// any criterion fails. Each check pins its own parameters and seeds so reruns
// are reproducible.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "beamcomb/beamcomb.hpp"

using namespace beamcomb;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

CMat random_psd(int n, Rng& rng) {
    CMat G(n, n);
    for (cx& v : G.a) v = rng.cgaussian(1.0);
    CMat R = G * adjoint(G);
    for (cx& v : R.a) v *= 1.0 / n;
    return hermitian_part(R);
}

CVec random_cvec(int n, Rng& rng) {
    CVec v(n);
    for (cx& x : v) x = rng.cgaussian(1.0);
    return v;
}

// --- criterion 1: closed-form unconstrained optimum vs projector efficiency --

void criterion1() {
    Rng rng(101);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int N = 16;
        const CMat Rs = random_psd(N, rng);
        const HermEig eig = herm_eig(Rs);
        const double lmin = eig.values.back();
        for (double s2 : {0.0, 0.5 * lmin}) {
            // CCM carrying a recorded noise floor; its signal part has
            // eigenvalues l_i - s2, all positive by construction
            Ccm R;
            R.matrix = Rs;
            for (int i = 0; i < N; ++i) R.matrix(i, i) += s2;
            R.matrix = hermitian_part(R.matrix);
            R.noise_variance = s2;

            // noise-free part reconstructed from the same eigenbasis
            Ccm Rsig;
            Rsig.matrix = CMat(N, N);
            double tr_sig = 0.0;
            for (int k = 0; k < N; ++k) {
                CVec v(N);
                for (int i = 0; i < N; ++i) v[i] = eig.vectors(i, k);
                add_outer(Rsig.matrix, v, eig.values[k]);
                tr_sig += eig.values[k];
            }

            for (int ns : {1, 4, 8}) {
                const auto [F, eta_formula] = optimal_unconstrained(R, ns);
                const double eta_direct = efficiency(F, Rsig, tr_sig);
                worst = std::max(worst, std::abs(eta_formula - eta_direct));
            }
        }
    }
    report(1, worst <= 1e-9,
           "closed-form optimum efficiency matches projector efficiency, max |diff| = " + fmt(worst) +
               " (tol 1e-9, 100 CCMs, N=16, N_s in {1,4,8}, noise in {0, lmin/2})");
}

// --- criterion 2: partitioned sub-problem optimum is a true upper bound ------

void criterion2() {
    Rng rng(202);
    double worst_gap = 0.0;       // most negative (lambda* - sampled eta)
    double worst_self = 0.0;      // secular self-consistency
    int instances = 0;
    long points = 0;
    auto run_instance = [&](const CMat& R, const CVec& d_I) {
        ++instances;
        const SubproblemInstance inst = SubproblemInstance::make(R, d_I);
        const SubproblemSolution sol = solve_subproblem(inst);
        const int L = R.rows;
        const int l = static_cast<int>(d_I.size());
        const int nj = L - l;

        auto probe = [&](const CVec& tail) {
            CVec x = d_I;
            x.insert(x.end(), tail.begin(), tail.end());
            if (norm_sq(x) <= 0.0) return;
            worst_gap = std::max(worst_gap, rayleigh(x, R) - sol.lambda_star);
            ++points;
        };

        if (nj == 0) {
            CVec empty;
            probe(empty);
            return;
        }
        // random tails
        for (int s = 0; s < 140; ++s) probe(random_cvec(nj, rng));
        // dominant-ray scaling of the tail block's top eigenvector
        const HermEig ej = herm_eig(inst.R_J);
        CVec u1(nj);
        for (int i = 0; i < nj; ++i) u1[i] = ej.vectors(i, 0);
        for (double beta : {1.0, 1e3, 1e6}) {
            CVec t = u1;
            for (cx& v : t) v *= beta;
            probe(t);
        }
        // grid refinements around the returned finite optimizer
        if (sol.kind == SubproblemCase::secular) {
            const double self = std::abs([&] {
                CVec x = d_I;
                x.insert(x.end(), sol.w_J.begin(), sol.w_J.end());
                return rayleigh(x, R);
            }() - sol.lambda_star);
            worst_self = std::max(worst_self, self / std::max(1.0, sol.lambda_star));
            for (int s = 0; s < 57; ++s) {
                CVec t = sol.w_J;
                const CVec d = random_cvec(nj, rng);
                const double eps = std::pow(10.0, -1.0 - (s % 6));
                for (int i = 0; i < nj; ++i) t[i] += eps * d[i];
                probe(t);
            }
        }
    };

    for (int rep = 0; rep < 450; ++rep) {
        const int nj = 1 + static_cast<int>(rng.next_u64() % 5);  // tail size <= 5
        const int l = 1 + static_cast<int>(rng.next_u64() % 3);
        const CMat R = random_psd(l + nj, rng);
        CVec d_I = random_cvec(l, rng);
        run_instance(R, d_I);
    }
    // 3-dimensional CCMs with a scalar fixed head
    for (int rep = 0; rep < 50; ++rep) {
        const CMat R = random_psd(3, rng);
        run_instance(R, {cx(1.0, 0.0)});
    }

    const bool ok = worst_gap <= 1e-9 && worst_self <= 1e-8;
    report(2, ok,
           "sub-problem optimum dominates " + std::to_string(points) + " sampled points over " +
               std::to_string(instances) + " instances, worst overshoot = " + fmt(worst_gap) +
               " (tol 1e-9), secular self-consistency = " + fmt(worst_self) + " (tol 1e-8)");
}

// --- criterion 3: secular root residual and interval --------------------------

void criterion3() {
    Rng rng(303);
    double worst_res = 0.0;
    bool interval_ok = true;
    for (int rep = 0; rep < 10000; ++rep) {
        SecularProblem p;
        const int n = 1 + static_cast<int>(rng.next_u64() % 6);
        for (int i = 0; i < n; ++i) {
            p.poles.push_back(rng.uniform(-2.0, 4.0));
            p.weights.push_back(rng.uniform(0.01, 2.0));
        }
        std::sort(p.poles.rbegin(), p.poles.rend());
        p.d = rng.uniform(0.1, 3.0);
        p.r = rng.uniform(0.0, 4.0);
        const double root = solve_secular(p);
        worst_res = std::max(worst_res,
                             std::abs(secular_f(p, root)) / std::max(1.0, p.d * root));
        if (!(root > p.poles.front() && root <= secular_upper_bound(p) + 1e-12 * (1.0 + std::abs(root))))
            interval_ok = false;
    }
    report(3, worst_res <= 1e-10 && interval_ok,
           "secular residual on 10^4 problems, worst |f(root)|/max(1,d*root) = " + fmt(worst_res) +
               " (tol 1e-10), root interval " + (interval_ok ? "respected" : "VIOLATED"));
}

// --- criterion 4: branch-and-bound equals exhaustive enumeration -------------

void criterion4() {
    Rng rng(404);
    double worst = 0.0;
    auto run_case = [&](int L, int B, int reps) {
        const PhaseAlphabet a = PhaseAlphabet::make(B);
        for (int rep = 0; rep < reps; ++rep) {
            Ccm R;
            R.matrix = random_psd(L, rng);
            const int K = 2;
            const CombinerMatrix ex = exhaustive(R, K, a);
            auto [bb, rep_bb] = bb_bc(R, K, a, 0.0, 1u << 30);
            Ccm Rb_ex = R, Rb_bb = R;
            for (int k = 0; k < K; ++k) {
                CVec we(L), wb(L);
                for (int i = 0; i < L; ++i) {
                    we[i] = ex.columns(i, k);
                    wb[i] = bb.columns(i, k);
                }
                worst = std::max(worst, std::abs(rayleigh(we, Rb_ex.matrix) -
                                                 rayleigh(wb, Rb_bb.matrix)));
                CMat se(L, k + 1), sb(L, k + 1);
                for (int c = 0; c <= k; ++c)
                    for (int i = 0; i < L; ++i) {
                        se(i, c) = ex.columns(i, c);
                        sb(i, c) = bb.columns(i, c);
                    }
                Rb_ex = deflate(Rb_ex, se);
                Rb_bb = deflate(Rb_bb, sb);
            }
        }
    };
    run_case(6, 1, 100);
    run_case(5, 2, 50);
    report(4, worst <= 1e-12,
           "branch-and-bound at eps=0 matches exhaustive per-column quotient, max |diff| = " +
               fmt(worst) + " (tol 1e-12, 100x L=6/B=1 + 50x L=5/B=2)");
}

// --- criterion 5: pruning power on channel-derived CCMs ----------------------

void criterion5() {
    ExperimentConfig cfg;
    cfg.antennas = 64;
    cfg.users = 2;
    cfg.beams = 12;
    cfg.samples = 2048;
    cfg.master_seed = 505;
    const ChannelConfig chan = cfg.channel_config();
    const PhaseAlphabet a2 = PhaseAlphabet::make(2);

    double total_nodes = 0.0;
    bool all_certified = true;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        const uint64_t ts = Rng::derive(cfg.master_seed, static_cast<uint64_t>(t));
        Rng geo_rng(ts);
        const MpcSet geo = sample_geometry(chan, geo_rng);
        Rng ccm_rng(Rng::derive(ts, 1000));
        const detail::TrialPipeline pipe = detail::trial_pipeline(cfg, geo, 20.0, ccm_rng);
        auto [comb, rep] = bb_bc(pipe.R_sel, 1, a2, 0.0, 1u << 26);
        total_nodes += static_cast<double>(rep.nodes_expanded);
        all_certified = all_certified && rep.certified;
    }
    const double mean_nodes = total_nodes / trials;
    const double budget = 0.01 * std::pow(2.0, 22);  // 1% of the full search space
    report(5, mean_nodes <= budget && all_certified,
           "mean expanded nodes at L=12/B=2 over 20 channel trials = " + fmt(mean_nodes) +
               " (limit " + fmt(budget) + ", certified exact: " + (all_certified ? "yes" : "NO") + ")");
}

// --- criteria 6: greedy tracks branch-and-bound ------------------------------

void criterion6() {
    ExperimentConfig cfg;
    cfg.antennas = 64;
    cfg.users = 2;
    cfg.beams = 12;
    cfg.rf_chains = {4};
    cfg.bits = {1, 2};
    cfg.snr_db = {20.0};
    cfg.trials = 100;
    cfg.samples = 2048;
    cfg.master_seed = 606;
    cfg.epsilon = 0.01;
    cfg.schemes = {Scheme::sgbc, Scheme::bbbc};
    const std::vector<TrialRecord> rec = run_experiment(cfg);

    std::map<std::pair<std::string, int>, std::pair<double, int>> acc;  // (scheme,B) -> (sum,count)
    for (const TrialRecord& r : rec) {
        if (r.failed) continue;
        auto& [s, c] = acc[{r.scheme, r.B}];
        s += r.eta;
        ++c;
    }
    bool ok = true;
    std::string detail_str;
    for (int B : {1, 2}) {
        const auto sg = acc[{"sgbc", B}];
        const auto bb = acc[{"bbbc", B}];
        const double mean_sg = sg.first / std::max(sg.second, 1);
        const double mean_bb = bb.first / std::max(bb.second, 1);
        ok = ok && sg.second == 100 && bb.second == 100 && mean_sg >= 0.95 * mean_bb;
        detail_str += "B=" + std::to_string(B) + ": greedy " + fmt(mean_sg) + " vs " +
                      fmt(mean_bb) + " bb; ";
    }
    report(6, ok, "greedy mean efficiency within 95% of branch-and-bound (eps=0.01), " + detail_str +
                      "100 trials, L=12, K=4");
}

// --- criteria 7/11: default sweep ordering and determinism --------------------

void criterion7() {
    ExperimentConfig cfg;  // default sweep
    cfg.epsilon = 0.0;     // exact per-column branch-and-bound for the ordering clause
    const std::vector<TrialRecord> rec = run_experiment(cfg);

    // index: (trial, scheme, K, B) -> eta
    std::map<std::tuple<uint64_t, std::string, int, int>, double> eta;
    int failed_records = 0;
    for (const TrialRecord& r : rec) {
        if (r.failed) {
            ++failed_records;
            continue;
        }
        eta[{r.trial, r.scheme, r.K, r.B}] = r.eta;
    }

    const double slack = 1e-9;
    long v_opt_bb = 0, v_bb_sg = 0, v_sg_none = 0;
    double w_opt_bb = 0.0, w_bb_sg = 0.0, w_sg_none = 0.0;
    long comparisons = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        for (int K : cfg.rf_chains) {
            const double e_none = eta.at({static_cast<uint64_t>(t), "none", K, 0});
            const double e_opt = eta.at({static_cast<uint64_t>(t), "optimal", K, 0});
            for (int B : cfg.bits) {
                ++comparisons;
                const double e_bb = eta.at({static_cast<uint64_t>(t), "bbbc", K, B});
                const double e_sg = eta.at({static_cast<uint64_t>(t), "sgbc", K, B});
                if (e_opt < e_bb - slack) { ++v_opt_bb; w_opt_bb = std::max(w_opt_bb, e_bb - e_opt); }
                if (e_bb < e_sg - slack) { ++v_bb_sg; w_bb_sg = std::max(w_bb_sg, e_sg - e_bb); }
                if (e_sg < e_none - slack) { ++v_sg_none; w_sg_none = std::max(w_sg_none, e_none - e_sg); }
            }
        }
    }

    // trial-mean bit ordering for the branch-and-bound scheme
    std::map<int, std::pair<double, long>> bb_by_bits;
    std::pair<double, long> none_mean{0.0, 0};
    for (const TrialRecord& r : rec) {
        if (r.failed) continue;
        if (r.scheme == "bbbc") {
            bb_by_bits[r.B].first += r.eta;
            ++bb_by_bits[r.B].second;
        } else if (r.scheme == "none") {
            none_mean.first += r.eta;
            ++none_mean.second;
        }
    }
    const double m_b1 = bb_by_bits[1].first / std::max<long>(bb_by_bits[1].second, 1);
    const double m_b2 = bb_by_bits[2].first / std::max<long>(bb_by_bits[2].second, 1);
    const double m_none = none_mean.first / std::max<long>(none_mean.second, 1);
    const bool mean_order = m_b2 >= m_b1 - slack && m_b1 >= m_none - slack;

    const bool ok = v_opt_bb == 0 && v_bb_sg == 0 && v_sg_none == 0 && mean_order &&
                    failed_records == 0;
    report(7, ok,
           "scheme ordering on the default sweep (" + std::to_string(comparisons) +
               " comparisons): optimal>=bb violations " + std::to_string(v_opt_bb) + " (worst " +
               fmt(w_opt_bb) + "), bb>=greedy violations " + std::to_string(v_bb_sg) + " (worst " +
               fmt(w_bb_sg) + "), greedy>=selection violations " + std::to_string(v_sg_none) +
               " (worst " + fmt(w_sg_none) + "); trial means B2/B1/none = " + fmt(m_b2) + "/" +
               fmt(m_b1) + "/" + fmt(m_none));
}

// --- criterion 8: bit-resolution gains at desk scale ---------------------------

void criterion8() {
    ExperimentConfig cfg;
    cfg.antennas = 64;
    cfg.beams = 16;
    cfg.rf_chains = {6};
    cfg.bits = {1, 2, 3};
    cfg.trials = 50;
    cfg.master_seed = 808;
    cfg.schemes = {Scheme::none, Scheme::sgbc};
    const std::vector<TrialRecord> rec = run_experiment(cfg);

    std::map<int, std::pair<double, long>> by_bits;
    std::pair<double, long> none{0.0, 0};
    for (const TrialRecord& r : rec) {
        if (r.failed) continue;
        if (r.scheme == "sgbc") {
            by_bits[r.B].first += r.eta;
            ++by_bits[r.B].second;
        } else if (r.scheme == "none") {
            none.first += r.eta;
            ++none.second;
        }
    }
    const double m_none = none.first / std::max<long>(none.second, 1);
    const double m1 = by_bits[1].first / std::max<long>(by_bits[1].second, 1);
    const double m2 = by_bits[2].first / std::max<long>(by_bits[2].second, 1);
    const double m3 = by_bits[3].first / std::max<long>(by_bits[3].second, 1);
    const double g1 = m1 - m_none;
    const bool ok = g1 >= 0.03 && g1 <= 0.25 && (m2 - m1) > 0.0 && (m3 - m2) < (m2 - m1);
    report(8, ok,
           "bit-resolution gains (M=64, L=16, K=6, 50 trials): combination-over-selection gain at B=1 = " +
               fmt(g1) + " (want [0.03, 0.25]), B2-B1 = " + fmt(m2 - m1) + " (want > 0), B3-B2 = " +
               fmt(m3 - m2) + " (want < B2-B1)");
}

// --- criterion 9: beamspace leakage profile -----------------------------------

void criterion9() {
    const int M = 16;
    // grid-aligned direction: sine = (i - (M+1)/2) / (0.5 M) at i = 10
    const double grid_sine = (10.0 - 0.5 * (M + 1)) / (0.5 * M);
    const std::vector<double> on = leakage_profile(std::asin(grid_sine), M);
    const double top_on = *std::max_element(on.begin(), on.end());

    // 0.063 rad is within 5e-4 rad of the M=16 grid angle asin(0.0625), so
    // under this grid convention the profile is necessarily concentrated; a
    // leaked profile would require a direction near the midpoint between two
    // grid sines.
    const std::vector<double> off = leakage_profile(0.063, M);
    const double top_off = *std::max_element(off.begin(), off.end());
    int above_1pct = 0;
    for (double v : off) above_1pct += v > 0.01;

    const bool ok = top_on >= 0.999 && top_off < 0.95 && above_1pct >= 3;
    report(9, ok,
           "leakage at M=16: grid-aligned top beam " + fmt(top_on) +
               " (want >= 0.999); 0.063 rad top beam " + fmt(top_off) + " (want < 0.95) with " +
               std::to_string(above_1pct) + " beams above 1% (want >= 3)");
}

// --- criterion 10: beam-count estimate vs measured 99%-power count -------------

void criterion10() {
    const int M = 1024;
    const double lo = 0.1, hi = 0.3;  // directional-sine measure 0.2
    const int rays = 201;

    // beamspace diagonal accumulated ray by ray (avoids the M x M CCM product)
    const BeamspaceOperator op = dft_operator(M);
    std::vector<double> diag(M, 0.0);
    const double gamma = 1.0 / rays;
    for (int r = 0; r < rays; ++r) {
        const double sine = lo + (hi - lo) * r / (rays - 1.0);
        const CVec b = matvec(op.matrix, steering(std::asin(sine), M));
        for (int i = 0; i < M; ++i) diag[i] += M * gamma * std::norm(b[i]);
    }
    std::sort(diag.rbegin(), diag.rend());
    const double total = M;  // trace of the ensemble CCM
    double cum = 0.0;
    int count = 0;
    while (count < M && cum < 0.99 * total) cum += diag[count++];

    const double est = estimate_beam_count({{lo, hi}}, M);
    const bool within = std::abs(count - est) <= 0.10 * est;

    // two-user example: sine intervals of joint measure sqrt(3)/2
    const double s = std::sin(std::numbers::pi / 6.0);
    const double est2 = estimate_beam_count(
        {{std::sin(-std::numbers::pi / 3.0), std::sin(-std::numbers::pi / 6.0)}, {0.0, s}}, M);
    const double expect2 = std::sqrt(3.0) / 4.0 * M;
    const bool exact2 = std::abs(est2 - expect2) <= 1e-9 * M;

    report(10, within && exact2,
           "M=1024 measure-0.2 spread: 99%-power beams = " + std::to_string(count) +
               " vs estimate " + fmt(est) + " (want within 10%); two-user example = " + fmt(est2) +
               " vs exact " + fmt(expect2));
}

// --- criterion 11: byte-identical reports --------------------------------------

void criterion11() {
    ExperimentConfig cfg;
    cfg.antennas = 32;
    cfg.beams = 8;
    cfg.rf_chains = {2, 4, 8};
    cfg.bits = {1, 2};
    cfg.trials = 5;
    cfg.master_seed = 1111;
    const std::string a = render_csv(run_experiment(cfg));
    const std::string b = render_csv(run_experiment(cfg));
    report(11, !a.empty() && a == b,
           "two identical runs produce byte-identical CSV (" + std::to_string(a.size()) + " bytes)");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    std::printf("%d of 11 criteria passed\n", 11 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
