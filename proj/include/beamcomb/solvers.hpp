#ifndef BEAMCOMB_SOLVERS_HPP
#define BEAMCOMB_SOLVERS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "beamcomb/combiner.hpp"
#include "beamcomb/core.hpp"

namespace beamcomb {

struct ColumnReport {
    std::vector<double> incumbent_trajectory;  // eta after each improvement
    uint64_t nodes_expanded = 0;
    uint64_t nodes_pruned = 0;
    double wall_ms = 0.0;
    bool certified = true;  // exact/epsilon certificate intact
    double column_eta = 0.0;          // Rayleigh quotient of the chosen column on R_b
    double deflation_residual = 0.0;  // ||R_b w_prev|| after deflating this column
};

struct SolverReport {
    std::vector<ColumnReport> columns;
    uint64_t nodes_expanded = 0;
    uint64_t nodes_pruned = 0;
    double wall_ms = 0.0;
    double epsilon_used = 0.0;
    bool certified = true;
    double final_efficiency = 0.0;  // tr(P R) / tr(R) for the input CCM
};

// Deflation step between columns: R_b <- P† R_b P with P = I - (1/L) A A†.
// For a single unit-modulus column w (||w||^2 = L) this annihilates w exactly;
// for several non-orthogonal columns it is only approximate, which is why the
// per-column residual is surfaced in the report.
inline Ccm deflate(const Ccm& R_b, const CMat& combiner_columns) {
    const int L = R_b.matrix.rows;
    if (combiner_columns.cols == 0) return R_b;
    if (combiner_columns.rows != L) throw DimensionError("deflate: dimensions disagree");
    CMat P = CMat::identity(L);
    const double inv = 1.0 / static_cast<double>(L);
    for (int k = 0; k < combiner_columns.cols; ++k)
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j)
                P(i, j) -= inv * combiner_columns(i, k) * std::conj(combiner_columns(j, k));
    Ccm out = R_b;
    out.matrix = adjoint(P) * R_b.matrix * P;
    return out;
}

inline Ccm deflate(const Ccm& R_b, const CombinerMatrix& A_C) { return deflate(R_b, A_C.columns); }

namespace detail {

// Per-depth partition cache for one working CCM: eig of the trailing block
// plus the coupling block, shared by every node at that prefix length.
struct PartitionCache {
    int L = 0;
    const CMat* R = nullptr;
    std::vector<HermEig> eig_J;   // index l = prefix length, 1..L-1
    std::vector<CMat> R_JI;      // tail rows x head cols

    explicit PartitionCache(const CMat& Rb) : L(Rb.rows), R(&Rb) {
        eig_J.resize(L);
        R_JI.resize(L);
        for (int l = 1; l < L; ++l) {
            std::vector<int> head(l), tail(L - l);
            for (int i = 0; i < l; ++i) head[i] = i;
            for (int i = 0; i < L - l; ++i) tail[i] = l + i;
            eig_J[l] = herm_eig(submatrix(Rb, tail, tail));
            R_JI[l] = submatrix(Rb, tail, head);
        }
    }

    // Closed-form relaxation bound for a prefix; fills the relaxed optimizer tail.
    SubproblemSolution bound(const CVec& prefix) const {
        const int l = static_cast<int>(prefix.size());
        if (l == L) {
            SubproblemSolution sol;
            sol.kind = SubproblemCase::full_prefix;
            sol.lambda_star = rayleigh(prefix, *R);
            return sol;
        }
        CVec p = matvec(R_JI[l], prefix);
        double r = 0.0;
        for (int i = 0; i < l; ++i) {
            cx s{};
            for (int j = 0; j < l; ++j) s += (*R)(i, j) * prefix[j];
            r += (std::conj(prefix[i]) * s).real();
        }
        const double d = norm_sq(prefix);
        return solve_subproblem_core(eig_J[l], p, r, d);
    }
};

struct BbNode {
    double bound = 0.0;
    uint64_t seq = 0;  // FIFO tie-break
    std::vector<int> prefix;
};

struct BbNodeLess {
    bool operator()(const BbNode& a, const BbNode& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.seq > b.seq;
    }
};

inline CVec indices_to_vec(const std::vector<int>& idx, const PhaseAlphabet& alphabet) {
    CVec v(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) v[i] = alphabet.elements[idx[i]];
    return v;
}

inline double deflation_residual(const CMat& Rb, const CVec& w) {
    return norm(matvec(Rb, w)) / std::sqrt(static_cast<double>(w.size()));
}

// Greedy column on R_b: entries chosen left to right maximizing the
// closed-form relaxation bound, ties to the lowest alphabet index.
inline std::vector<int> greedy_column(const PartitionCache& cache, const PhaseAlphabet& alphabet,
                                      uint64_t* bound_evals = nullptr) {
    const int L = cache.L;
    std::vector<int> idx;
    idx.reserve(L);
    CVec prefix;
    prefix.reserve(L);
    for (int l = 0; l < L; ++l) {
        if (l == 0) {
            // all states are equivalent up to a global phase
            idx.push_back(0);
            prefix.push_back(alphabet.elements[0]);
            continue;
        }
        int best_i = 0;
        double best_v = -1.0;
        prefix.push_back(cx{});
        for (int i = 0; i < alphabet.size(); ++i) {
            prefix.back() = alphabet.elements[i];
            const double v = cache.bound(prefix).lambda_star;
            if (bound_evals) ++*bound_evals;
            if (v > best_v) {
                best_v = v;
                best_i = i;
            }
        }
        idx.push_back(best_i);
        prefix.back() = alphabet.elements[best_i];
    }
    return idx;
}

}  // namespace detail

// Ground-truth enumeration: all alphabet vectors with the first entry fixed,
// maximizing the Rayleigh quotient; deflation between columns.
inline CombinerMatrix exhaustive(const Ccm& R, int K, const PhaseAlphabet& alphabet) {
    const int L = R.matrix.rows;
    if (K < 1 || K > L) throw InputError("exhaustive: need 1 <= K <= L");
    const long space_bits = static_cast<long>(alphabet.bits) * (L - 1);
    if (space_bits > 24) throw InputError("exhaustive: search space exceeds 2^24 candidates");

    CombinerMatrix out;
    out.alphabet = alphabet;
    out.columns = CMat(L, K);
    out.indices.assign(K, std::vector<int>(L, 0));

    Ccm Rb = R;
    const uint64_t count = 1ull << space_bits;
    const int base = alphabet.size();
    for (int k = 0; k < K; ++k) {
        std::vector<int> best(L, 0);
        double best_v = -1.0;
        std::vector<int> idx(L, 0);
        CVec w(L);
        for (uint64_t code = 0; code < count; ++code) {
            uint64_t c = code;
            for (int i = 1; i < L; ++i) {
                idx[i] = static_cast<int>(c % base);
                c /= base;
            }
            for (int i = 0; i < L; ++i) w[i] = alphabet.elements[idx[i]];
            const double v = rayleigh(w, Rb.matrix);
            if (v > best_v) {
                best_v = v;
                best = idx;
            }
        }
        out.indices[k] = best;
        for (int i = 0; i < L; ++i) out.columns(i, k) = alphabet.elements[best[i]];
        CMat sofar(L, k + 1);
        for (int c = 0; c <= k; ++c)
            for (int i = 0; i < L; ++i) sofar(i, c) = out.columns(i, c);
        Rb = deflate(Rb, sofar);
    }
    return out;
}

// Branch-and-bound column-by-column combiner (best-first, relaxation bounds,
// epsilon-certificate exit). With epsilon = 0 and enough budget each column
// is the exact discrete optimum on the current deflated CCM.
inline std::pair<CombinerMatrix, SolverReport> bb_bc(const Ccm& R, int K,
                                                     const PhaseAlphabet& alphabet,
                                                     double epsilon = 0.0,
                                                     uint64_t node_budget = 1000000,
                                                     bool use_corollary1_bound = false) {
    const int L = R.matrix.rows;
    if (K < 1 || K > L) throw InputError("bb_bc: need 1 <= K <= L");
    if (epsilon < 0.0) throw InputError("bb_bc: epsilon must be >= 0");

    CombinerMatrix out;
    out.alphabet = alphabet;
    out.columns = CMat(L, K);
    out.indices.assign(K, std::vector<int>(L, 0));
    SolverReport report;
    report.epsilon_used = epsilon;

    const auto t_start = std::chrono::steady_clock::now();
    Ccm Rb = R;
    for (int k = 0; k < K; ++k) {
        const auto t_col = std::chrono::steady_clock::now();
        ColumnReport col;
        const detail::PartitionCache cache(Rb.matrix);

        // incumbent: rounded dominant eigenvector, plus the greedy column
        const HermEig eig_b = herm_eig(Rb.matrix);
        CVec u1(L);
        for (int i = 0; i < L; ++i) u1[i] = eig_b.vectors(i, 0);
        std::vector<int> inc_idx;
        const CVec u1_round = round_to_alphabet(u1, alphabet, &inc_idx);
        double inc_eta = rayleigh(u1_round, Rb.matrix);
        col.incumbent_trajectory.push_back(inc_eta);

        const std::vector<int> greedy_idx = detail::greedy_column(cache, alphabet, nullptr);
        const double greedy_eta = rayleigh(detail::indices_to_vec(greedy_idx, alphabet), Rb.matrix);
        if (greedy_eta > inc_eta) {
            inc_eta = greedy_eta;
            inc_idx = greedy_idx;
            col.incumbent_trajectory.push_back(inc_eta);
        }

        std::priority_queue<detail::BbNode, std::vector<detail::BbNode>, detail::BbNodeLess> frontier;
        uint64_t seq = 0;
        if (L > 1) frontier.push({std::numeric_limits<double>::infinity(), seq++, {0}});

        const double exit_slack = 1e-15;
        while (!frontier.empty()) {
            if (col.nodes_expanded >= node_budget) {
                col.certified = false;  // budget exhausted; incumbent is heuristic
                break;
            }
            detail::BbNode node = frontier.top();
            frontier.pop();
            if (node.bound - inc_eta <= epsilon * inc_eta + exit_slack * std::max(1.0, inc_eta))
                break;  // epsilon certificate holds for everything left
            ++col.nodes_expanded;

            CVec prefix = detail::indices_to_vec(node.prefix, alphabet);
            prefix.push_back(cx{});
            std::vector<int> child_idx = node.prefix;
            child_idx.push_back(0);
            const bool child_full = static_cast<int>(child_idx.size()) == L;
            for (int i = 0; i < alphabet.size(); ++i) {
                child_idx.back() = i;
                prefix.back() = alphabet.elements[i];
                if (child_full) {
                    const double eta = rayleigh(prefix, Rb.matrix);
                    if (eta > inc_eta) {
                        inc_eta = eta;
                        inc_idx = child_idx;
                        col.incumbent_trajectory.push_back(inc_eta);
                    }
                    continue;
                }
                const SubproblemSolution sub = cache.bound(prefix);
                double bound = sub.lambda_star;
                if (use_corollary1_bound && sub.kind == SubproblemCase::secular) {
                    SubproblemInstance inst = SubproblemInstance::make(Rb.matrix, prefix);
                    bound = std::min(bound, approx_discrete_bound(sub, inst, alphabet));
                    col.certified = false;  // heuristic bound breaks the certificate
                }
                if (bound <= inc_eta) {
                    ++col.nodes_pruned;
                    continue;
                }
                // raise the incumbent from the rounded relaxed optimizer
                if (sub.kind == SubproblemCase::secular) {
                    std::vector<int> tail_idx;
                    const CVec tail = round_to_alphabet(sub.w_J, alphabet, &tail_idx);
                    CVec full = prefix;
                    full.insert(full.end(), tail.begin(), tail.end());
                    const double eta = rayleigh(full, Rb.matrix);
                    if (eta > inc_eta) {
                        inc_eta = eta;
                        inc_idx = child_idx;
                        inc_idx.insert(inc_idx.end(), tail_idx.begin(), tail_idx.end());
                        col.incumbent_trajectory.push_back(inc_eta);
                    }
                }
                frontier.push({bound, seq++, child_idx});
            }
        }

        if (static_cast<int>(inc_idx.size()) != L)
            throw SolverError("bb_bc: incumbent has wrong length");  // unreachable
        out.indices[k] = inc_idx;
        const CVec wb = detail::indices_to_vec(inc_idx, alphabet);
        for (int i = 0; i < L; ++i) out.columns(i, k) = wb[i];
        col.column_eta = inc_eta;

        CMat sofar(L, k + 1);
        for (int c = 0; c <= k; ++c)
            for (int i = 0; i < L; ++i) sofar(i, c) = out.columns(i, c);
        Rb = deflate(Rb, sofar);
        col.deflation_residual = detail::deflation_residual(Rb.matrix, wb);
        col.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_col).count();

        report.nodes_expanded += col.nodes_expanded;
        report.nodes_pruned += col.nodes_pruned;
        report.certified = report.certified && col.certified;
        report.columns.push_back(std::move(col));
    }
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    const double tr = trace(R.matrix).real();
    if (tr > 0.0) report.final_efficiency = detail::span_efficiency(out.columns, R, tr);
    return {std::move(out), std::move(report)};
}

// Sequential greedy combiner: per column each entry maximizes the
// closed-form relaxation bound; deflation between columns.
inline std::pair<CombinerMatrix, SolverReport> sg_bc(const Ccm& R, int K,
                                                     const PhaseAlphabet& alphabet) {
    const int L = R.matrix.rows;
    if (K < 1 || K > L) throw InputError("sg_bc: need 1 <= K <= L");

    CombinerMatrix out;
    out.alphabet = alphabet;
    out.columns = CMat(L, K);
    out.indices.assign(K, std::vector<int>(L, 0));
    SolverReport report;

    const auto t_start = std::chrono::steady_clock::now();
    Ccm Rb = R;
    for (int k = 0; k < K; ++k) {
        const auto t_col = std::chrono::steady_clock::now();
        ColumnReport col;
        const detail::PartitionCache cache(Rb.matrix);
        const std::vector<int> idx = detail::greedy_column(cache, alphabet, &col.nodes_expanded);
        out.indices[k] = idx;
        const CVec wb = detail::indices_to_vec(idx, alphabet);
        for (int i = 0; i < L; ++i) out.columns(i, k) = wb[i];
        col.column_eta = rayleigh(wb, Rb.matrix);
        col.incumbent_trajectory.push_back(col.column_eta);

        CMat sofar(L, k + 1);
        for (int c = 0; c <= k; ++c)
            for (int i = 0; i < L; ++i) sofar(i, c) = out.columns(i, c);
        Rb = deflate(Rb, sofar);
        col.deflation_residual = detail::deflation_residual(Rb.matrix, wb);
        col.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_col).count();
        report.nodes_expanded += col.nodes_expanded;
        report.columns.push_back(std::move(col));
    }
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
    const double tr = trace(R.matrix).real();
    if (tr > 0.0) report.final_efficiency = detail::span_efficiency(out.columns, R, tr);
    return {std::move(out), std::move(report)};
}

}  // namespace beamcomb

#endif
