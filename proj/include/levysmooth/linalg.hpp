#pragma once

// Small dense linear algebra, enough for d x d covariance handling (d is tiny).

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace levysmooth {

inline double dot(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// Row-major symmetric/square matrix.
struct Matrix {
    int d = 0;
    Vec a;  // d*d entries

    Matrix() = default;
    explicit Matrix(int dim) : d(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * d + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * d + j]; }

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Vec matvec(const Matrix& m, const Vec& x) {
    require(static_cast<int>(x.size()) == m.d, "matvec: size mismatch");
    Vec y(m.d, 0.0);
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) y[i] += m(i, j) * x[j];
    return y;
}

// Cholesky factor L (lower) of an SPD matrix; throws if not SPD.
inline Matrix cholesky(const Matrix& q) {
    Matrix l(q.d);
    for (int i = 0; i < q.d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = q(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                require(s > 0.0, "cholesky: matrix not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

// Solve L y = x with L lower triangular.
inline Vec solve_lower(const Matrix& l, const Vec& x) {
    Vec y(x);
    for (int i = 0; i < l.d; ++i) {
        for (int j = 0; j < i; ++j) y[i] -= l(i, j) * y[j];
        y[i] /= l(i, i);
    }
    return y;
}

// Solve L^T y = x.
inline Vec solve_lower_transposed(const Matrix& l, const Vec& x) {
    Vec y(x);
    for (int i = l.d - 1; i >= 0; --i) {
        for (int j = i + 1; j < l.d; ++j) y[i] -= l(j, i) * y[j];
        y[i] /= l(i, i);
    }
    return y;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline Vec jacobi_eigenvalues(Matrix m) {
    const int d = m.d;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += sqr(m(i, j));
        if (off < 1e-30) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                if (std::fabs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < d; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    Vec ev(d);
    for (int i = 0; i < d; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace levysmooth
