#pragma once

// Characteristic exponents psi (radial, symmetric processes), the
// Hartman-Wintner smoothness ratio psi(xi)/log(1+|xi|) with its limit
// classification, the density-existence time threshold, and Fourier-inversion
// densities used as an independent oracle against the mixture quadrature.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "quadrature.hpp"
#include "semigroup.hpp"
#include "subordinators.hpp"

namespace levysmooth {

struct CharExponent {
    std::function<double(double)> radial;  // |xi| -> psi
    std::string label = "psi";

    double at_radius(double r) const { return radial(r); }
    double operator()(const Vec& xi) const { return radial(norm2(xi)); }

    // Published closed forms (canonical for the named models; these differ
    // from the W∘T sampling convention by a fixed constant in the argument).
    static CharExponent variance_gamma(double a, double b) {
        require(a > 0.0 && b > 0.0, "CharExponent::variance_gamma: need a,b > 0");
        CharExponent p;
        p.radial = [a, b](double r) { return a * std::log1p(r * r / b); };
        char buf[64];
        std::snprintf(buf, sizeof buf, "vg;a=%g;b=%g", a, b);
        p.label = buf;
        return p;
    }
    static CharExponent stable(double alpha) {
        require(alpha > 0.0 && alpha <= 2.0, "CharExponent::stable: need alpha in (0,2]");
        CharExponent p;
        p.radial = [alpha](double r) { return std::pow(r, alpha); };
        char buf[64];
        std::snprintf(buf, sizeof buf, "stable;alpha=%g", alpha);
        p.label = buf;
        return p;
    }
    static CharExponent gaussian() {
        CharExponent p;
        p.radial = [](double r) { return 0.5 * r * r; };
        p.label = "gaussian";
        return p;
    }
    static CharExponent zero() {
        CharExponent p;
        p.radial = [](double) { return 0.0; };
        p.label = "zero";
        return p;
    }
};

// psi(xi) = Phi(|xi|^2/2): exponent of Y = W o T under the sampling
// convention E e^{i xi W_s} = e^{-s|xi|^2/2}; consistent with
// subordinated_density by construction.
inline CharExponent char_exponent_from_noise(const NoiseSpec& noise) {
    require(!noise.perturbation, "char_exponent_from_noise: perturbation unsupported");
    require(!noise.heat.anisotropic, "char_exponent_from_noise: need isotropic Q");
    CharExponent p;
    const SubordinatorSpec sub = noise.subordinator;
    p.radial = [sub](double r) { return laplace_exponent(sub, 0.5 * r * r); };
    p.label = "noise;" + sub.label();
    return p;
}

// --- Hartman-Wintner ratio --------------------------------------------------

enum class HwClass { FiniteLimit, DivergesToInfinity, Inconclusive };

inline const char* to_string(HwClass c) {
    switch (c) {
        case HwClass::FiniteLimit: return "FiniteLimit";
        case HwClass::DivergesToInfinity: return "DivergesToInfinity";
        case HwClass::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct HwRatioReport {
    Vec radii, psi, ratios;
    HwClass classification = HwClass::Inconclusive;
    double limit = kNaN;       // extrapolated limit when FiniteLimit
    double tail_slope = kNaN;  // log-log slope fitted on the last two decades
};

// ratio(r) = psi(r)/log(1+r) along the grid. Classification by the log-log
// slope on the last two decades; the finite limit is extrapolated linearly in
// u = 1/log(1+r), which removes the O(1/log r) bias of the raw tail value.
inline HwRatioReport hw_ratio(const CharExponent& psi, const Vec& radii) {
    require(radii.size() >= 4, "hw_ratio: need at least 4 radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        require(radii[i] > radii[i - 1], "hw_ratio: radii must increase");
    require(radii.back() >= 1e6, "hw_ratio: max radius must reach 1e6");

    HwRatioReport rep;
    rep.radii = radii;
    for (double r : radii) {
        const double ps = psi.at_radius(r);
        rep.psi.push_back(ps);
        rep.ratios.push_back(ps / std::log1p(r));
    }

    const double r_cut = radii.back() / 100.0;
    std::vector<std::size_t> tail;
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (radii[i] >= r_cut) tail.push_back(i);
    if (tail.size() < 3) {
        rep.classification = HwClass::Inconclusive;
        return rep;
    }

    bool all_zero = true, any_nonpos = false;
    for (auto i : tail) {
        if (rep.ratios[i] != 0.0) all_zero = false;
        if (rep.ratios[i] <= 0.0) any_nonpos = true;
    }
    if (all_zero) {
        rep.classification = HwClass::FiniteLimit;
        rep.limit = 0.0;
        rep.tail_slope = 0.0;
        return rep;
    }
    if (any_nonpos) return rep;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto i : tail) {
        const double lx = std::log(radii[i]), ly = std::log(rep.ratios[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(tail.size());
    rep.tail_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    if (rep.tail_slope > 0.05) {
        rep.classification = HwClass::DivergesToInfinity;
    } else if (rep.tail_slope < 1e-3) {
        rep.classification = HwClass::FiniteLimit;
        // least squares on ratio ~ L + c1 u + c2/(r log(1+r)), u = 1/log(1+r);
        // the second correction removes the O(1/r) curvature of log-type psi.
        // Columns are scaled to unit max so the Gram matrix stays well posed.
        double m1 = 0.0, m2 = 0.0;
        for (auto i : tail) {
            const double u = 1.0 / std::log1p(radii[i]);
            m1 = std::max(m1, u);
            m2 = std::max(m2, u / radii[i]);
        }
        double a[3][3] = {{0}}, rhs[3] = {0};
        for (auto i : tail) {
            const double u = 1.0 / std::log1p(radii[i]);
            const double base[3] = {1.0, u / m1, u / (radii[i] * m2)};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) a[r][c] += base[r] * base[c];
                rhs[r] += base[r] * rep.ratios[i];
            }
        }
        Matrix m(3);
        Vec b(3);
        for (int r = 0; r < 3; ++r) {
            b[r] = rhs[r];
            for (int c = 0; c < 3; ++c) m(r, c) = a[r][c];
        }
        // normal equations via Cholesky (SPD for distinct radii)
        Matrix lchol = cholesky(m);
        Vec z = solve_lower(lchol, b);
        Vec coef = solve_lower_transposed(lchol, z);
        rep.limit = coef[0];
    }
    return rep;
}

inline std::string hw_ratio_csv(const HwRatioReport& rep) {
    std::string out = "radius,psi,ratio\n";
    char buf[160];
    for (std::size_t i = 0; i < rep.radii.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rep.radii[i], rep.psi[i],
                      rep.ratios[i]);
        out += buf;
    }
    return out;
}

// --- density-existence threshold ---------------------------------------------

enum class ThresholdKind { Zero, Finite, NoThreshold, Inconclusive };

inline const char* to_string(ThresholdKind k) {
    switch (k) {
        case ThresholdKind::Zero: return "Zero";
        case ThresholdKind::Finite: return "Finite";
        case ThresholdKind::NoThreshold: return "NoThreshold";
        case ThresholdKind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct ThresholdTime {
    ThresholdKind kind = ThresholdKind::Inconclusive;
    double t0 = kNaN;
};

inline Vec default_hw_radii() {
    Vec r;
    for (int i = 0; i <= 72; ++i) r.push_back(std::pow(10.0, i / 8.0));
    return r;
}

// ratio -> infinity: densities smooth for all t (threshold Zero); finite
// limit L > 0: densities for t > d/L; limit 0: the criterion is silent.
inline ThresholdTime hw_threshold_time(const CharExponent& psi, int d,
                                       const Vec& radii = default_hw_radii()) {
    require(d >= 1, "hw_threshold_time: need d >= 1");
    HwRatioReport rep = hw_ratio(psi, radii);
    ThresholdTime out;
    switch (rep.classification) {
        case HwClass::DivergesToInfinity:
            out.kind = ThresholdKind::Zero;
            out.t0 = 0.0;
            break;
        case HwClass::FiniteLimit:
            if (rep.limit > 1e-9) {
                out.kind = ThresholdKind::Finite;
                out.t0 = static_cast<double>(d) / rep.limit;
            } else {
                out.kind = ThresholdKind::NoThreshold;
            }
            break;
        case HwClass::Inconclusive: break;
    }
    return out;
}

// --- Fourier inversion ------------------------------------------------------

struct FourierOptions {
    double abs_tol = 1e-10;
    int max_blocks = 48;    // geometric envelope blocks (non-oscillatory path)
    int max_panels = 4096;  // half-period panels (oscillatory path)
};

// p_t(y) = (2pi)^{-d} integral e^{-i<xi,y>} e^{-t psi} dxi for radial psi,
// d <= 2. Divergent when e^{-t psi} is not integrable (log-growth test).
// Away from y = 0 the tail is summed panel-by-panel between the zeros of the
// oscillator and the alternating partial sums are accelerated by iterated
// means; a fixed quadrature grid can never chase tails like (1+r^2)^{-t}
// whose envelope dies long after thousands of oscillations.
inline ScalarResult fourier_density(const CharExponent& psi, double t, const Vec& y,
                                    int d, const FourierOptions& opt = {}) {
    require(t > 0.0, "fourier_density: need t > 0");
    require(d == 1 || d == 2, "fourier_density: d <= 2 only");
    require(static_cast<int>(y.size()) == d, "fourier_density: dimension mismatch");

    // local growth of psi per unit log r at large r; e^{-t psi} ~ r^{-t kappa}
    const double big_r = 1e8;
    const double kappa = psi.at_radius(big_r) - psi.at_radius(big_r / 2.718281828459045);
    if (!(t * kappa > static_cast<double>(d) * (1.0 + 1e-12)))
        return ScalarResult::divergent();

    const double ybar = norm2(y);
    const double norm = d == 1 ? 1.0 / kPi : 1.0 / (2.0 * kPi);
    auto integrand = [&](double r) {
        const double e = std::exp(-t * psi.at_radius(r));
        if (d == 1) return std::cos(r * ybar) * e;
        return std::cyl_bessel_j(0.0, r * ybar) * e * r;
    };

    if (ybar < 0.05) {
        // essentially monotone: geometric blocks until the envelope is spent
        double total = 0.0, lo = 0.0, width = 1.0;
        bool converged = false, ok = true;
        int calm = 0;
        for (int b = 0; b < opt.max_blocks; ++b) {
            QuadResult blk = integrate(integrand, lo, lo + width, opt.abs_tol / 8.0,
                                       1e-10, 400);
            total += blk.value;
            ok = ok && blk.converged;
            calm = std::fabs(blk.value) < opt.abs_tol / 4.0 ? calm + 1 : 0;
            if (calm >= 2) {
                converged = true;
                break;
            }
            lo += width;
            width *= 2.0;
        }
        if (!converged || !ok) return {total * norm, EvalStatus::Inconclusive};
        return ScalarResult::of(total * norm);
    }

    // k-th sign change: cos zeros for d = 1, McMahon's J0 zeros for d = 2
    auto boundary = [&](int k) {
        if (d == 1) return (k - 0.5) * kPi / ybar;
        const double beta = (k - 0.25) * kPi;
        return (beta + 0.125 / beta) / ybar;
    };

    double run = integrate(integrand, 0.0, boundary(1), opt.abs_tol / 16.0, 1e-12, 256)
                     .value;
    Vec sums;
    double best = kNaN, prev = kNaN;
    bool ok = true, converged = false;
    int calm = 0;
    for (int k = 1; k <= opt.max_panels && !converged; ++k) {
        QuadResult p = integrate(integrand, boundary(k), boundary(k + 1),
                                 opt.abs_tol / 64.0, 1e-12, 64);
        ok = ok && p.converged;
        run += p.value;
        sums.push_back(run);
        if (k % 16 != 0) continue;
        const std::size_t m = std::min<std::size_t>(sums.size(), 64);
        Vec v(sums.end() - static_cast<std::ptrdiff_t>(m), sums.end());
        while (v.size() > 1) {
            for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = 0.5 * (v[i] + v[i + 1]);
            v.pop_back();
        }
        best = v[0];
        if (std::isfinite(prev) && std::fabs(best - prev) < opt.abs_tol / 4.0) {
            if (++calm >= 2) converged = true;
        } else {
            calm = 0;
        }
        prev = best;
    }
    const double val = (std::isfinite(best) ? best : run) * norm;
    if (!converged || !ok) return {val, EvalStatus::Inconclusive};
    return ScalarResult::of(val);
}

}  // namespace levysmooth
