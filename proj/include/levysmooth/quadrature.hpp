#pragma once

// Adaptive 1-d quadrature built on the Gauss-Kronrod 7/15 pair. The adaptive
// driver keeps a worst-interval heap and bisects until both tolerances hold or
// the interval budget runs out.

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "common.hpp"

namespace levysmooth {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    std::size_t evals = 0;
};

namespace detail {

// 15-point Kronrod abscissae/weights on [-1,1] and the embedded 7-point Gauss weights.
inline constexpr double kGK15X[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGK15W[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kG7W[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kGK15X[i]);
        fv[14 - i] = f(c + h * kGK15X[i]);
    }
    fv[7] = f(c);
    double resk = kGK15W[7] * fv[7];
    double resg = kG7W[3] * fv[7];
    for (int i = 0; i < 7; ++i) resk += kGK15W[i] * (fv[i] + fv[14 - i]);
    for (int i = 0; i < 3; ++i) resg += kG7W[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    kronrod = resk * h;
    err = std::fabs((resk - resg) * h);
}

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace detail

template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                     double rel_tol = 1e-9, std::size_t max_intervals = 4000) {
    QuadResult out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Interval> heap;
    double v, e;
    detail::gk15(f, a, b, v, e);
    out.evals = 15;
    heap.push({a, b, v, e});
    double total = v, toterr = e;
    std::size_t n = 1;
    while (toterr > std::max(abs_tol, rel_tol * std::fabs(total)) && n < max_intervals) {
        detail::Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // cannot split further
            heap.push(worst);
            break;
        }
        double v1, e1, v2, e2;
        detail::gk15(f, worst.a, mid, v1, e1);
        detail::gk15(f, mid, worst.b, v2, e2);
        out.evals += 30;
        total += v1 + v2 - worst.value;
        toterr += e1 + e2 - worst.error;
        heap.push({worst.a, mid, v1, e1});
        heap.push({mid, worst.b, v2, e2});
        ++n;
    }
    out.value = total;
    out.error = toterr;
    out.converged = toterr <= std::max(abs_tol, rel_tol * std::fabs(total)) * 1.0001 ||
                    toterr <= 1e-300;
    return out;
}

// Integral over [a, inf) of a function that eventually decays: doubling blocks
// [a, a+w], [a+w, a+3w], ... stop once two consecutive blocks are negligible.
template <class F>
QuadResult integrate_to_infinity(const F& f, double a, double first_width,
                                 double abs_tol = 1e-10, double rel_tol = 1e-9,
                                 int max_blocks = 60) {
    QuadResult out;
    double lo = a, w = first_width;
    int quiet = 0;
    for (int k = 0; k < max_blocks; ++k) {
        QuadResult blk = integrate(f, lo, lo + w, abs_tol * 0.25, rel_tol * 0.25);
        out.value += blk.value;
        out.error += blk.error;
        out.evals += blk.evals;
        lo += w;
        w *= 2.0;
        const double scale = std::max(std::fabs(out.value), 1e-300);
        if (std::fabs(blk.value) <= std::max(abs_tol, rel_tol * scale) * 0.25) {
            if (++quiet >= 2) {
                out.converged = true;
                return out;
            }
        } else {
            quiet = 0;
        }
    }
    out.converged = false;
    return out;
}

}  // namespace levysmooth
