#ifndef BEAMCOMB_CORE_HPP
#define BEAMCOMB_CORE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamcomb {

using cx = std::complex<double>;
using CVec = std::vector<cx>;

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& m) : std::runtime_error(m) {}
};
struct InputError : std::runtime_error {
    explicit InputError(const std::string& m) : std::runtime_error(m) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& m) : std::runtime_error(m) {}
};
struct NoRootError : std::runtime_error {
    explicit NoRootError(const std::string& m) : std::runtime_error(m) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

// Dense complex matrix, row-major.
struct CMat {
    int rows = 0;
    int cols = 0;
    std::vector<cx> a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    cx& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const cx& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline bool all_finite(const CMat& m) {
    for (const cx& v : m.a)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

inline bool all_finite(const CVec& v) {
    for (const cx& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

inline CMat adjoint(const CMat& m) {
    CMat r(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r(j, i) = std::conj(m(i, j));
    return r;
}

inline CMat operator*(const CMat& x, const CMat& y) {
    if (x.cols != y.rows) throw DimensionError("matmul: inner dimensions disagree");
    CMat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int k = 0; k < x.cols; ++k) {
            const cx xv = x(i, k);
            if (xv == cx{}) continue;
            for (int j = 0; j < y.cols; ++j) r(i, j) += xv * y(k, j);
        }
    }
    return r;
}

inline CMat operator+(const CMat& x, const CMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionError("matadd: shapes disagree");
    CMat r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
}

inline CMat operator-(const CMat& x, const CMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionError("matsub: shapes disagree");
    CMat r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

inline CMat operator*(const CMat& x, double s) {
    CMat r = x;
    for (cx& v : r.a) v *= s;
    return r;
}

inline CVec matvec(const CMat& m, const CVec& v) {
    if (m.cols != static_cast<int>(v.size())) throw DimensionError("matvec: dimensions disagree");
    CVec r(m.rows);
    for (int i = 0; i < m.rows; ++i) {
        cx s{};
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

// x† y
inline cx vdot(const CVec& x, const CVec& y) {
    if (x.size() != y.size()) throw DimensionError("vdot: lengths disagree");
    cx s{};
    for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline double norm_sq(const CVec& v) {
    double s = 0.0;
    for (const cx& x : v) s += std::norm(x);
    return s;
}

inline double norm(const CVec& v) { return std::sqrt(norm_sq(v)); }

inline cx trace(const CMat& m) {
    if (m.rows != m.cols) throw DimensionError("trace: matrix not square");
    cx s{};
    for (int i = 0; i < m.rows; ++i) s += m(i, i);
    return s;
}

inline double fro_norm(const CMat& m) {
    double s = 0.0;
    for (const cx& v : m.a) s += std::norm(v);
    return std::sqrt(s);
}

// ||A - A†||_F
inline double herm_deviation(const CMat& m) {
    if (m.rows != m.cols) throw DimensionError("herm_deviation: matrix not square");
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) s += std::norm(m(i, j) - std::conj(m(j, i)));
    return std::sqrt(s);
}

inline CMat hermitian_part(const CMat& m) {
    if (m.rows != m.cols) throw DimensionError("hermitian_part: matrix not square");
    CMat r(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return r;
}

inline CMat submatrix(const CMat& m, const std::vector<int>& ri, const std::vector<int>& ci) {
    CMat r(static_cast<int>(ri.size()), static_cast<int>(ci.size()));
    for (size_t i = 0; i < ri.size(); ++i)
        for (size_t j = 0; j < ci.size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = m(ri[i], ci[j]);
    return r;
}

inline CMat kron(const CMat& x, const CMat& y) {
    CMat r(x.rows * y.rows, x.cols * y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) {
            const cx xv = x(i, j);
            for (int p = 0; p < y.rows; ++p)
                for (int q = 0; q < y.cols; ++q) r(i * y.rows + p, j * y.cols + q) = xv * y(p, q);
        }
    return r;
}

// rank-one accumulate: m += s * v v†
inline void add_outer(CMat& m, const CVec& v, double s) {
    const int n = static_cast<int>(v.size());
    if (m.rows != n || m.cols != n) throw DimensionError("add_outer: dimensions disagree");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) += s * v[i] * std::conj(v[j]);
}

}  // namespace beamcomb

#endif
