#pragma once

// Observables f with declared regularity metadata. The semigroup operations
// consume the declared norms (sup, weighted sup, L_p) instead of estimating
// them, so factories must declare only what is exactly known.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "linalg.hpp"

namespace levysmooth {

struct TestFunction {
    std::string name = "f";
    int dim = 1;
    std::function<double(const Vec&)> eval;

    std::optional<double> sup_norm;        // ||f||_inf
    std::optional<double> support_radius;  // f = 0 outside this ball
    // sup_y |y|^l |f(y)| as a function of l (null when unknown/infinite)
    std::function<double(double)> weighted_sup;
    // ||f||_{L_p} as a function of p (null when unknown/infinite)
    std::function<double(double)> lp_norm;
    // || |y|^l f ||_{L_q} (null when unknown)
    std::function<double(double, double)> weighted_lq_norm;
    // declared polynomial growth |f(y)| <= C (1+|y|)^deg for unbounded f
    std::optional<std::pair<double, int>> poly_growth;

    struct Interval {
        double lo, hi, coef;
    };
    // when nonempty (d=1): f = sum_i coef_i 1_{[lo_i, hi_i]}
    std::vector<Interval> intervals;

    double operator()(const Vec& y) const { return eval(y); }
};

namespace test_functions {

inline TestFunction constant(int d, double v = 1.0) {
    TestFunction f;
    f.name = "const";
    f.dim = d;
    f.eval = [v](const Vec&) { return v; };
    f.sup_norm = std::fabs(v);
    f.weighted_sup = [v](double l) { return l == 0.0 ? std::fabs(v) : kInf; };
    return f;
}

// 1 on [-r, r]^d
inline TestFunction indicator_box(int d, double r) {
    require(r > 0.0, "indicator_box: need r > 0");
    TestFunction f;
    f.name = "box";
    f.dim = d;
    f.eval = [d, r](const Vec& y) {
        for (int k = 0; k < d; ++k)
            if (std::fabs(y[k]) > r) return 0.0;
        return 1.0;
    };
    f.sup_norm = 1.0;
    f.support_radius = r * std::sqrt(static_cast<double>(d));
    f.weighted_sup = [d, r](double l) { return std::pow(r * std::sqrt(d), l); };
    f.lp_norm = [d, r](double p) { return std::pow(2.0 * r, d / p); };
    if (d == 1) {
        f.intervals = {{-r, r, 1.0}};
        f.weighted_lq_norm = [r](double l, double q) {
            return std::pow(2.0 * std::pow(r, l * q + 1.0) / (l * q + 1.0), 1.0 / q);
        };
    }
    return f;
}

inline TestFunction indicator_interval(double lo, double hi) {
    require(hi > lo, "indicator_interval: need hi > lo");
    TestFunction f;
    f.name = "interval";
    f.dim = 1;
    f.eval = [lo, hi](const Vec& y) { return (y[0] >= lo && y[0] <= hi) ? 1.0 : 0.0; };
    f.sup_norm = 1.0;
    f.support_radius = std::max(std::fabs(lo), std::fabs(hi));
    const double rr = *f.support_radius;
    f.weighted_sup = [rr](double l) { return std::pow(rr, l); };
    f.lp_norm = [lo, hi](double p) { return std::pow(hi - lo, 1.0 / p); };
    f.intervals = {{lo, hi, 1.0}};
    return f;
}

// 1_{y_k >= c}
inline TestFunction half_space(int d, int coord, double c) {
    require(coord >= 0 && coord < d, "half_space: bad coordinate");
    TestFunction f;
    f.name = "halfspace";
    f.dim = d;
    f.eval = [coord, c](const Vec& y) { return y[coord] >= c ? 1.0 : 0.0; };
    f.sup_norm = 1.0;
    f.weighted_sup = [](double l) { return l == 0.0 ? 1.0 : kInf; };
    return f;
}

// e^{-|y|^2/2}
inline TestFunction gaussian_bump(int d) {
    TestFunction f;
    f.name = "bump";
    f.dim = d;
    f.eval = [](const Vec& y) { return std::exp(-0.5 * dot(y, y)); };
    f.sup_norm = 1.0;
    f.weighted_sup = [](double l) {
        return l == 0.0 ? 1.0 : std::exp(0.5 * l * (std::log(l) - 1.0));
    };
    f.lp_norm = [d](double p) {
        return std::pow(2.0 * kPi / p, 0.5 * d / p);
    };
    return f;
}

// f(y) = y_k (unbounded; declared linear growth)
inline TestFunction coordinate(int d, int coord) {
    require(coord >= 0 && coord < d, "coordinate: bad coordinate");
    TestFunction f;
    f.name = "coordinate";
    f.dim = d;
    f.eval = [coord](const Vec& y) { return y[coord]; };
    f.poly_growth = {1.0, 1};
    return f;
}

inline TestFunction cosine(int d, Vec freq) {
    require(static_cast<int>(freq.size()) == d, "cosine: dimension mismatch");
    TestFunction f;
    f.name = "cos";
    f.dim = d;
    f.eval = [freq](const Vec& y) { return std::cos(dot(freq, y)); };
    f.sup_norm = 1.0;
    f.weighted_sup = [](double l) { return l == 0.0 ? 1.0 : kInf; };
    return f;
}

}  // namespace test_functions

// Spot-check the declared metadata on a deterministic grid; returns true when
// nothing contradicts the declarations.
inline bool validate_test_function(const TestFunction& f, int grid_per_axis = 21,
                                   double box = 8.0) {
    const int d = f.dim;
    std::vector<int> idx(d, 0);
    for (;;) {
        Vec y(d);
        for (int k = 0; k < d; ++k)
            y[k] = -box + 2.0 * box * idx[k] / (grid_per_axis - 1);
        const double v = f.eval(y);
        if (f.sup_norm && std::fabs(v) > *f.sup_norm * (1.0 + 1e-12)) return false;
        if (f.support_radius && norm2(y) > *f.support_radius * (1.0 + 1e-12) &&
            v != 0.0)
            return false;
        int k = 0;
        while (k < d && ++idx[k] == grid_per_axis) idx[k++] = 0;
        if (k == d) break;
    }
    return true;
}

}  // namespace levysmooth
