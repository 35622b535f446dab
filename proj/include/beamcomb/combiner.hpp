#ifndef BEAMCOMB_COMBINER_HPP
#define BEAMCOMB_COMBINER_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "beamcomb/channel.hpp"
#include "beamcomb/core.hpp"
#include "beamcomb/eig.hpp"
#include "beamcomb/secular.hpp"

namespace beamcomb {

// The 2^B unit-modulus phase-shifter states e^{j 2 pi n / 2^B}.
struct PhaseAlphabet {
    int bits = 1;
    std::vector<cx> elements;

    static PhaseAlphabet make(int bits) {
        if (bits < 1 || bits > 16) throw InputError("PhaseAlphabet: bits out of range");
        PhaseAlphabet a;
        a.bits = bits;
        const int n = 1 << bits;
        a.elements.resize(n);
        for (int k = 0; k < n; ++k) {
            // quadrant-exact states keep one-bit alphabets at exactly {+1, -1}
            const int quad = 4 * k;
            if (quad % n == 0) {
                switch ((quad / n) & 3) {
                    case 0: a.elements[k] = cx(1.0, 0.0); break;
                    case 1: a.elements[k] = cx(0.0, 1.0); break;
                    case 2: a.elements[k] = cx(-1.0, 0.0); break;
                    default: a.elements[k] = cx(0.0, -1.0); break;
                }
            } else {
                const double ang = 2.0 * std::numbers::pi * k / n;
                a.elements[k] = cx(std::cos(ang), std::sin(ang));
            }
        }
        return a;
    }

    int size() const { return static_cast<int>(elements.size()); }
};

// L x K combination matrix; columns are the combination vectors, every entry
// a phase-alphabet state.
struct CombinerMatrix {
    CMat columns;                           // L x K
    std::vector<std::vector<int>> indices;  // K vectors of L alphabet indices
    PhaseAlphabet alphabet;
};

// Nearest-in-angle alphabet state per entry; zero entries map to state 0.
inline CVec round_to_alphabet(const CVec& w, const PhaseAlphabet& alphabet,
                              std::vector<int>* out_indices = nullptr) {
    const int n = alphabet.size();
    CVec out(w.size());
    if (out_indices) out_indices->assign(w.size(), 0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (size_t i = 0; i < w.size(); ++i) {
        int idx = 0;
        if (w[i] != cx{}) {
            double frac = std::arg(w[i]) / two_pi * n;  // in (-n/2, n/2]
            long k = std::lround(frac);
            idx = static_cast<int>(((k % n) + n) % n);
        }
        out[i] = alphabet.elements[idx];
        if (out_indices) (*out_indices)[i] = idx;
    }
    return out;
}

namespace detail {

// Rank-revealing modified Gram-Schmidt with one re-orthogonalization pass.
// Columns that fall below the relative tolerance are dropped, so the result
// spans the input columns with rank possibly below K.
inline std::vector<CVec> orthonormal_span(const CMat& columns) {
    const int L = columns.rows;
    std::vector<CVec> basis;
    basis.reserve(static_cast<size_t>(columns.cols));
    for (int k = 0; k < columns.cols; ++k) {
        CVec v(L);
        for (int i = 0; i < L; ++i) v[i] = columns(i, k);
        const double orig = norm(v);
        if (orig <= 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const CVec& b : basis) {
                const cx c = vdot(b, v);
                for (int i = 0; i < L; ++i) v[i] -= c * b[i];
            }
        const double rem = norm(v);
        if (rem <= 1e-10 * orig) continue;
        for (int i = 0; i < L; ++i) v[i] /= rem;
        basis.push_back(std::move(v));
    }
    return basis;
}

// Efficiency of the span of the given columns: tolerant of dependent or zero
// columns (a dependent column neither adds nor removes retained power).
inline double span_efficiency(const CMat& columns, const Ccm& R_bs, double total_power) {
    if (total_power <= 0.0) throw InputError("efficiency: total_power must be positive");
    if (columns.rows != R_bs.matrix.rows) throw DimensionError("efficiency: dimensions disagree");
    double retained = 0.0;
    for (const CVec& b : orthonormal_span(columns))
        retained += vdot(b, matvec(R_bs.matrix, b)).real();
    return retained / total_power;
}

}  // namespace detail

// Spatial compression efficiency of an arbitrary full-column-rank combiner:
// eta = tr(P R_bs) / total_power with P the orthogonal projector onto the
// span of the combination vectors. For orthonormal vectors this reduces to
// tr(A† R_bs A) / total_power.
inline double efficiency(const CMat& combiner_columns, const Ccm& R_bs, double total_power) {
    if (total_power <= 0.0) throw InputError("efficiency: total_power must be positive");
    const int L = combiner_columns.rows;
    const int K = combiner_columns.cols;
    if (L != R_bs.matrix.rows) throw DimensionError("efficiency: dimensions disagree");
    if (K < 1 || K > L) throw InputError("efficiency: need 1 <= K <= L columns");
    for (int k = 0; k < K; ++k) {
        double n = 0.0;
        for (int i = 0; i < L; ++i) n += std::norm(combiner_columns(i, k));
        if (n <= 0.0) throw SolverError("efficiency: combiner has a zero column");
    }
    const std::vector<CVec> basis = detail::orthonormal_span(combiner_columns);
    if (static_cast<int>(basis.size()) < K)
        throw SolverError("efficiency: combiner columns are rank deficient");
    double retained = 0.0;
    for (const CVec& b : basis) retained += vdot(b, matvec(R_bs.matrix, b)).real();
    return retained / total_power;
}

inline double efficiency(const CombinerMatrix& c, const Ccm& R_bs, double total_power) {
    return efficiency(c.columns, R_bs, total_power);
}

// Unconstrained optimum: the N_s dominant eigenvectors of the CCM, with the
// eigenvalue-ratio efficiency sum(max(l_i - s^2, 0), i<=N_s) / sum over all i.
inline std::pair<CMat, double> optimal_unconstrained(const Ccm& R, int n_streams) {
    const int N = R.matrix.rows;
    if (n_streams < 1 || n_streams > N) throw InputError("optimal_unconstrained: N_s out of range");
    const HermEig eig = herm_eig(R.matrix);
    const double s2 = R.noise_variance;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < N; ++i) {
        const double t = std::max(eig.values[i] - s2, 0.0);
        den += t;
        if (i < n_streams) num += t;
    }
    if (den <= 0.0) throw SolverError("optimal_unconstrained: all eigenvalues at or below the noise floor");
    CMat F(N, n_streams);
    for (int j = 0; j < n_streams; ++j)
        for (int i = 0; i < N; ++i) F(i, j) = eig.vectors(i, j);
    return {F, num / den};
}

// Partitioned Rayleigh-quotient sub-problem: maximize x† R x / x† x over the
// free tail w_J of x = [d_I; w_J].
struct SubproblemInstance {
    CMat R;     // L x L Hermitian PSD
    CVec d_I;   // fixed head, 1 <= len <= L

    CMat R_J;   // trailing block
    CMat R_JI;  // coupling block (tail rows, head cols)
    CVec p;     // R_JI d_I
    double r = 0.0;  // d_I† R_I d_I
    double d = 0.0;  // d_I† d_I

    static SubproblemInstance make(const CMat& R, const CVec& d_I) {
        const int L = R.rows;
        const int l = static_cast<int>(d_I.size());
        if (R.rows != R.cols) throw DimensionError("SubproblemInstance: R not square");
        if (l < 1 || l > L) throw InputError("SubproblemInstance: 1 <= len(d_I) <= L required");
        SubproblemInstance inst;
        inst.R = R;
        inst.d_I = d_I;
        std::vector<int> head(l), tail(L - l);
        for (int i = 0; i < l; ++i) head[i] = i;
        for (int i = 0; i < L - l; ++i) tail[i] = l + i;
        inst.R_J = submatrix(R, tail, tail);
        inst.R_JI = submatrix(R, tail, head);
        inst.p = matvec(inst.R_JI, d_I);
        const CMat R_I = submatrix(R, head, head);
        inst.r = vdot(d_I, matvec(R_I, d_I)).real();
        inst.d = norm_sq(d_I);
        if (inst.d <= 0.0) throw InputError("SubproblemInstance: d_I must be nonzero");
        return inst;
    }
};

enum class SubproblemCase { secular, degenerate_c1, full_prefix };

// Marker for the degenerate-C1 optimizer; `dominant_ray` means the optimum is
// approached along the dominant eigenvector with unbounded scale.
enum class DegenerateOptimizer { none, zero, dominant_ray };

struct SubproblemSolution {
    double lambda_star = 0.0;
    CVec w_J;  // finite optimizer for the secular case; empty otherwise
    SubproblemCase kind = SubproblemCase::secular;
    DegenerateOptimizer marker = DegenerateOptimizer::none;
};

namespace detail {

// Core of the closed-form sub-problem optimum, taking a precomputed
// eigendecomposition of R_J so BB/greedy loops can share it across nodes.
inline SubproblemSolution solve_subproblem_core(const HermEig& eig_J, const CVec& p, double r,
                                                double d) {
    SubproblemSolution sol;
    const int nj = static_cast<int>(eig_J.values.size());
    if (nj == 0) {
        sol.lambda_star = r / d;
        sol.kind = SubproblemCase::full_prefix;
        return sol;
    }

    CVec q(nj);
    for (int i = 0; i < nj; ++i) {
        cx s{};
        for (int k = 0; k < nj; ++k) s += std::conj(eig_J.vectors(k, i)) * p[k];
        q[i] = s;
    }

    SecularProblem raw;
    raw.poles = eig_J.values;
    raw.weights.resize(nj);
    for (int i = 0; i < nj; ++i) raw.weights[i] = std::norm(q[i]);
    raw.d = d;
    raw.r = r;
    const SecularProblem grouped = cluster_poles(raw);
    const double l1 = grouped.poles.front();

    // C1 test: dominant-group weight negligible and f stays positive at l1
    const double pnorm2 = norm_sq(p);
    const double top_weight = grouped.weights.front();
    const bool top_zero = top_weight <= 1e-10 * std::max(pnorm2, 1e-300);
    if (top_zero) {
        double c1 = l1 * d - r;
        for (size_t g = 1; g < grouped.poles.size(); ++g)
            c1 -= grouped.weights[g] / (l1 - grouped.poles[g]);
        if (c1 > 0.0) {
            sol.kind = SubproblemCase::degenerate_c1;
            sol.lambda_star = std::max(l1, r / d);
            sol.marker = (l1 > r / d) ? DegenerateOptimizer::dominant_ray : DegenerateOptimizer::zero;
            return sol;
        }
    }

    sol.kind = SubproblemCase::secular;
    sol.lambda_star = solve_secular(grouped);
    // w_J = (l* I - R_J)^{-1} p evaluated in the eigenbasis
    sol.w_J.assign(nj, cx{});
    for (int i = 0; i < nj; ++i) {
        const double gap = sol.lambda_star - eig_J.values[i];
        if (gap == 0.0) continue;  // q_i is zero within tolerance whenever this happens
        const cx coef = q[i] / gap;
        for (int k = 0; k < nj; ++k) sol.w_J[k] += coef * eig_J.vectors(k, i);
    }
    return sol;
}

}  // namespace detail

inline SubproblemSolution solve_subproblem(const SubproblemInstance& inst) {
    const int nj = inst.R_J.rows;
    if (nj == 0) {
        SubproblemSolution sol;
        sol.lambda_star = inst.r / inst.d;
        sol.kind = SubproblemCase::full_prefix;
        return sol;
    }
    const HermEig eig_J = herm_eig(inst.R_J);
    return detail::solve_subproblem_core(eig_J, inst.p, inst.r, inst.d);
}

// Rate-distortion approximation of the discrete optimum built from the
// relaxed optimizer: quantization noise sigma_e^2 = 2^{-B} ||w*||^2.
inline double approx_discrete_bound(const SubproblemSolution& sol, const SubproblemInstance& inst,
                                    const PhaseAlphabet& alphabet) {
    if (sol.kind != SubproblemCase::secular)
        throw InputError("approx_discrete_bound: requires a finite (secular-case) optimizer");
    const int nj = inst.R_J.rows;
    const double w_norm2 = norm_sq(sol.w_J);
    const double sigma_e2 = std::pow(2.0, -alphabet.bits) * w_norm2;
    const double wRw = vdot(sol.w_J, matvec(inst.R_J, sol.w_J)).real();
    const double cross = 2.0 * vdot(inst.p, sol.w_J).real();
    const double tr_j = nj > 0 ? trace(inst.R_J).real() / nj : 0.0;
    return (inst.r + wRw + cross + sigma_e2 * tr_j) / (inst.d + w_norm2 + sigma_e2);
}

}  // namespace beamcomb

#endif
