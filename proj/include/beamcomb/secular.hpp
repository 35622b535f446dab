#ifndef BEAMCOMB_SECULAR_HPP
#define BEAMCOMB_SECULAR_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "beamcomb/core.hpp"

namespace beamcomb {

// Root problem for f(x) = x d - r - sum_i weights_i / (x - poles_i),
// solved for the unique root above the largest pole.
struct SecularProblem {
    std::vector<double> poles;    // non-increasing
    std::vector<double> weights;  // >= 0, same length
    double d = 1.0;               // > 0
    double r = 0.0;               // >= 0
};

inline double secular_f(const SecularProblem& p, double x) {
    double s = x * p.d - p.r;
    for (size_t i = 0; i < p.poles.size(); ++i) s -= p.weights[i] / (x - p.poles[i]);
    return s;
}

inline double secular_fprime(const SecularProblem& p, double x) {
    double s = p.d;
    for (size_t i = 0; i < p.poles.size(); ++i) {
        const double dx = x - p.poles[i];
        s += p.weights[i] / (dx * dx);
    }
    return s;
}

// Upper end of the root interval: (d l1 + r + sqrt((d l1 - r)^2 + 4 d W)) / (2d)
// with W the total weight.
inline double secular_upper_bound(const SecularProblem& p) {
    const double l1 = p.poles.empty() ? 0.0 : p.poles.front();
    double wsum = 0.0;
    for (double w : p.weights) wsum += w;
    const double a = p.d * l1 - p.r;
    return (p.d * l1 + p.r + std::sqrt(a * a + 4.0 * p.d * wsum)) / (2.0 * p.d);
}

// Group nearly-coincident poles (within 1e-9 * (1 + |l1|)); weights are summed
// and the group keeps its largest pole.
inline SecularProblem cluster_poles(const SecularProblem& p) {
    SecularProblem out;
    out.d = p.d;
    out.r = p.r;
    if (p.poles.empty()) return out;
    const double tol = 1e-9 * (1.0 + std::abs(p.poles.front()));
    size_t i = 0;
    while (i < p.poles.size()) {
        double pole = p.poles[i];
        double w = p.weights[i];
        size_t j = i + 1;
        while (j < p.poles.size() && p.poles[i] - p.poles[j] <= tol) {
            w += p.weights[j];
            ++j;
        }
        out.poles.push_back(pole);
        out.weights.push_back(w);
        i = j;
    }
    return out;
}

// Unique root of f above the largest pole. Bisection down to a relative
// width, then a few Newton iterations confined to the bracket.
inline double solve_secular(const SecularProblem& prob) {
    if (prob.d <= 0.0) throw InputError("solve_secular: d must be positive");
    if (prob.poles.size() != prob.weights.size())
        throw InputError("solve_secular: poles/weights length mismatch");
    for (size_t i = 1; i < prob.poles.size(); ++i)
        if (prob.poles[i] > prob.poles[i - 1] + 1e-12 * (1.0 + std::abs(prob.poles[i])))
            throw InputError("solve_secular: poles not non-increasing");
    for (double w : prob.weights)
        if (w < 0.0) throw InputError("solve_secular: negative weight");

    const double l1 = prob.poles.empty() ? -1e300 : prob.poles.front();
    double lo = prob.poles.empty() ? prob.r / prob.d - 1.0 : l1 + 1e-12 * (1.0 + std::abs(l1));
    double hi = secular_upper_bound(prob);
    if (hi < lo) hi = lo;

    double flo = secular_f(prob, lo);
    double fhi = secular_f(prob, hi);
    // f is increasing above l1; the upper bound satisfies f(hi) >= 0 by
    // construction, up to roundoff. A caller-misrouted degenerate case shows
    // up as f positive across the whole bracket.
    if (fhi < -1e-9 * std::max(1.0, std::abs(prob.d * hi))) {
        double h2 = hi + (hi - l1 + 1.0);
        double f2 = secular_f(prob, h2);
        if (f2 < 0.0) throw NoRootError("solve_secular: no root above largest pole");
        hi = h2;
        fhi = f2;
    }
    if (flo > 0.0) {
        // f diverges to -inf at the pole only when the pole carries weight; a
        // positive f(lo) with weight means the root is squeezed between the
        // pole and lo (within 1e-12 relative). Without weight there is no
        // root above the largest pole at all.
        double top_weight = 0.0;
        for (size_t i = 0; i < prob.poles.size(); ++i)
            if (l1 - prob.poles[i] <= 1e-12 * (1.0 + std::abs(l1))) top_weight += prob.weights[i];
        if (top_weight > 0.0) return lo;
        throw NoRootError("solve_secular: no root above largest pole");
    }

    double mid = 0.5 * (lo + hi);
    while (hi - lo > 1e-8 * (1.0 + std::abs(mid))) {
        mid = 0.5 * (lo + hi);
        const double fm = secular_f(prob, mid);
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 10; ++it) {
        const double fx = secular_f(prob, x);
        const double fpx = secular_fprime(prob, x);
        if (fpx <= 0.0) break;
        double step = fx / fpx;
        double xn = x - step;
        if (xn <= lo || xn >= hi) {
            // keep the bracket
            if (fx < 0.0)
                lo = x;
            else
                hi = x;
            xn = 0.5 * (lo + hi);
        }
        if (xn == x) break;
        x = xn;
    }
    return x;
}

}  // namespace beamcomb

#endif
