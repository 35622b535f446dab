#ifndef BEAMCOMB_EIG_HPP
#define BEAMCOMB_EIG_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "beamcomb/core.hpp"

namespace beamcomb {

// Eigendecomposition of a Hermitian matrix. Eigenvalues non-increasing,
// columns of `vectors` are the matching unit-norm eigenvectors.
struct HermEig {
    std::vector<double> values;
    CMat vectors;
};

// w†Rw / w†w
inline double rayleigh(const CVec& w, const CMat& R) {
    const CVec rw = matvec(R, w);
    const double den = norm_sq(w);
    if (den <= 0.0) throw InputError("rayleigh: zero vector");
    return vdot(w, rw).real() / den;
}

namespace detail {

inline double offdiag_fro(const CMat& m) {
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            if (i != j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

// One cyclic sweep of complex Jacobi rotations on Hermitian A, accumulating V.
inline void jacobi_sweep(CMat& A, CMat& V, double threshold) {
    const int n = A.rows;
    for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const cx g = A(p, q);
            const double absg = std::abs(g);
            if (absg <= threshold) continue;

            const double app = A(p, p).real();
            const double aqq = A(q, q).real();
            const double tau = (aqq - app) / (2.0 * absg);
            // smaller-angle root of t^2 + 2 tau t - 1 = 0
            const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                          : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            const cx sigma = (s / absg) * g;  // s * e^{j arg g}

            // rows/cols p and q: A <- U† A U with U = [[c, sigma], [-conj(sigma), c]]
            for (int k = 0; k < n; ++k) {
                if (k == p || k == q) continue;
                const cx apk = A(p, k);
                const cx aqk = A(q, k);
                A(p, k) = c * apk - sigma * aqk;
                A(q, k) = std::conj(sigma) * apk + c * aqk;
                A(k, p) = std::conj(A(p, k));
                A(k, q) = std::conj(A(q, k));
            }
            const double cross = 2.0 * c * s * absg;
            A(p, p) = cx(c * c * app - cross + s * s * aqq, 0.0);
            A(q, q) = cx(s * s * app + cross + c * c * aqq, 0.0);
            A(p, q) = cx{};
            A(q, p) = cx{};

            for (int k = 0; k < n; ++k) {
                const cx vkp = V(k, p);
                const cx vkq = V(k, q);
                V(k, p) = c * vkp - std::conj(sigma) * vkq;
                V(k, q) = sigma * vkp + c * vkq;
            }
        }
    }
}

}  // namespace detail

// Cyclic Jacobi eigensolver for Hermitian input. The input is symmetrized as
// (A + A†)/2; deviation beyond 1e-10 * ||A||_F is rejected. Each eigenvector's
// first entry above 1e-12 in magnitude is rotated real-positive so the output
// is deterministic.
inline HermEig herm_eig(const CMat& A) {
    if (A.rows != A.cols) throw DimensionError("herm_eig: matrix not square");
    if (!all_finite(A)) throw InputError("herm_eig: non-finite entries");
    const int n = A.rows;
    const double anorm = fro_norm(A);
    if (herm_deviation(A) > 2.0e-10 * std::max(anorm, 1.0))
        throw InputError("herm_eig: matrix not Hermitian within tolerance");

    CMat W = hermitian_part(A);
    CMat V = CMat::identity(n);

    const double target = 1e-12 * std::max(anorm, 1e-300);
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = detail::offdiag_fro(W);
        if (off <= target) break;
        detail::jacobi_sweep(W, V, 0.0);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = W(i, i).real();
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] > diag[j]; });

    HermEig out;
    out.values.resize(n);
    out.vectors = CMat(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        out.values[j] = diag[src];
        // phase convention: first entry with |v_i| > 1e-12 made real-positive
        cx phase = 1.0;
        for (int i = 0; i < n; ++i) {
            const cx v = V(i, src);
            if (std::abs(v) > 1e-12) {
                phase = std::conj(v) / std::abs(v);
                break;
            }
        }
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm += std::norm(V(i, src));
        const double inv = 1.0 / std::sqrt(nrm);
        for (int i = 0; i < n; ++i) out.vectors(i, j) = V(i, src) * phase * inv;
    }
    return out;
}

}  // namespace beamcomb

#endif
