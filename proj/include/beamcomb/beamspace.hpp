#ifndef BEAMCOMB_BEAMSPACE_HPP
#define BEAMCOMB_BEAMSPACE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "beamcomb/channel.hpp"
#include "beamcomb/core.hpp"

namespace beamcomb {

// DFT beamspace transform. Rows are conjugated steering vectors on the grid
// sin(theta_i) = (1/(spacing*M)) (i - (M+1)/2), i = 1..M; the full matrix is
// unitary. `selected` restricts to a subset of beams when present.
struct BeamspaceOperator {
    int M = 0;
    CMat matrix;  // M x M (rows are alpha(theta_i)†)
    std::optional<std::vector<int>> selected;
};

inline BeamspaceOperator dft_operator(int M, double spacing = 0.5) {
    if (M < 2) throw InputError("dft_operator: M must be >= 2");
    BeamspaceOperator op;
    op.M = M;
    op.matrix = CMat(M, M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    const double m0 = -0.5 * (M - 1);
    for (int i = 1; i <= M; ++i) {
        const double sine = (i - 0.5 * (M + 1)) / (spacing * M);
        // row = steering(theta_i)†; written directly from the grid sine so the
        // grid may reach |sin| -> 1 without an asin round-trip
        const double step = 2.0 * std::numbers::pi * spacing * sine;  // conjugated
        for (int s = 0; s < M; ++s) {
            const double phase = step * (m0 + s);
            op.matrix(i - 1, s) = cx(scale * std::cos(phase), scale * std::sin(phase));
        }
    }
    return op;
}

// Planar-array transform as the Kronecker product of two 1D operators.
inline BeamspaceOperator two_dim_operator(const BeamspaceOperator& rows_op,
                                          const BeamspaceOperator& cols_op,
                                          int max_dim = 1 << 16) {
    const long total = static_cast<long>(rows_op.M) * cols_op.M;
    if (total > max_dim) throw DimensionError("two_dim_operator: combined dimension too large");
    BeamspaceOperator op;
    op.M = static_cast<int>(total);
    op.matrix = kron(rows_op.matrix, cols_op.matrix);
    return op;
}

// Beamspace CCM: A_L R A_L†, restricted to selected beams when a selection
// is present. Trace is preserved when there is no selection.
inline Ccm beamspace_ccm(const BeamspaceOperator& op, const Ccm& R) {
    if (R.matrix.rows != op.matrix.cols)
        throw DimensionError("beamspace_ccm: dimensions disagree");
    Ccm out;
    out.kind = R.kind;
    out.sample_count = R.sample_count;
    out.noise_variance = R.noise_variance;
    if (!op.selected) {
        out.matrix = op.matrix * R.matrix * adjoint(op.matrix);
        return out;
    }
    const std::vector<int>& sel = *op.selected;
    CMat rows(static_cast<int>(sel.size()), op.matrix.cols);
    for (size_t i = 0; i < sel.size(); ++i)
        for (int j = 0; j < op.matrix.cols; ++j)
            rows(static_cast<int>(i), j) = op.matrix(sel[i], j);
    out.matrix = rows * R.matrix * adjoint(rows);
    return out;
}

// Indices of the L largest diagonal entries, descending, ties to lower index.
inline std::vector<int> select_beams(const Ccm& R_bs, int L) {
    const int n = R_bs.matrix.rows;
    if (L < 1 || L > n) throw InputError("select_beams: L out of range");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
        return R_bs.matrix(i, i).real() > R_bs.matrix(j, j).real();
    });
    idx.resize(L);
    return idx;
}

// Per-beam power fraction |A_L alpha(theta)|^2; a probability vector.
inline std::vector<double> leakage_profile(double theta, int M, double spacing = 0.5) {
    const BeamspaceOperator op = dft_operator(M, spacing);
    const CVec a = steering(theta, M, spacing);
    const CVec b = matvec(op.matrix, a);
    std::vector<double> profile(M);
    for (int i = 0; i < M; ++i) profile[i] = std::norm(b[i]);
    return profile;
}

// Analytic beam count: (M/2) * measure of the union of directional-
// sine intervals (critical spacing d = lambda/2).
inline double estimate_beam_count(std::vector<std::pair<double, double>> spreads, int M) {
    for (auto& s : spreads) {
        if (s.second < s.first) std::swap(s.first, s.second);
        if (s.first < -1.0 || s.second > 1.0)
            throw InputError("estimate_beam_count: intervals must lie in [-1, 1]");
    }
    std::sort(spreads.begin(), spreads.end());
    double measure = 0.0;
    double cur_lo = 0.0, cur_hi = 0.0;
    bool open = false;
    for (const auto& s : spreads) {
        if (!open) {
            cur_lo = s.first;
            cur_hi = s.second;
            open = true;
        } else if (s.first <= cur_hi) {
            cur_hi = std::max(cur_hi, s.second);
        } else {
            measure += cur_hi - cur_lo;
            cur_lo = s.first;
            cur_hi = s.second;
        }
    }
    if (open) measure += cur_hi - cur_lo;
    return 0.5 * M * measure;
}

}  // namespace beamcomb

#endif
