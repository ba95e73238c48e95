#pragma once

// Evaluation of the semigroups P^W (Gaussian), P^Y (subordinated) and their
// perturbed variants P^Z / A^Z applied to test functions, derivative
// evaluation through the heat-kernel calculus, and empirical verification of
// the weighted smoothing bounds.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "kernels.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "subordinators.hpp"
#include "test_functions.hpp"

namespace levysmooth {

// --- noise specification ----------------------------------------------------

// Driving noise Z = W o T + xi: Gaussian part (covariance Q), subordinator T,
// optional independent single-time perturbation sampler xi.
struct NoiseSpec {
    HeatKernelSpec heat;
    SubordinatorSpec subordinator;
    std::function<Vec(double, Rng&)> perturbation;  // null => xi == 0
    std::string perturbation_label = "none";
};

inline NoiseSpec make_noise(HeatKernelSpec heat, SubordinatorSpec sub) {
    NoiseSpec n;
    n.heat = std::move(heat);
    n.subordinator = sub;
    return n;
}

// xi_t ~ N(0, t^{2H} I): fractional-Brownian-like marginal, xi_0 = 0.
inline NoiseSpec with_fbm_perturbation(NoiseSpec n, double hurst) {
    require(hurst > 0.0 && hurst < 1.0, "with_fbm_perturbation: need H in (0,1)");
    const int d = n.heat.d;
    n.perturbation = [d, hurst](double t, Rng& rng) {
        Vec v(d);
        const double sd = std::pow(t, hurst);
        for (auto& c : v) c = sd * std_normal(rng);
        return v;
    };
    char buf[64];
    std::snprintf(buf, sizeof buf, "fbm;H=%g", hurst);
    n.perturbation_label = buf;
    return n;
}

// --- iterated Gaussian quadrature -------------------------------------------

struct GaussOptions {
    double abs_tol = 0.0;  // 0: derive 1e-8 * scale(f)
    double box = 10.0;     // integrate u over [-box, box]^d
};

namespace detail {

inline Vec mat_vec_lower(const Matrix& l, const Vec& u) {
    Vec out(l.d, 0.0);
    for (int i = 0; i < l.d; ++i)
        for (int j = 0; j <= i; ++j) out[i] += l(i, j) * u[j];
    return out;
}

struct IterQuadResult {
    double value = 0.0;
    bool converged = true;
};

// integral over R^d of w(u) phi_d(u) du, phi_d = standard normal density.
// Each axis is clipped to [-box, box] (and optionally further), then split at
// fixed knots so that narrow spikes of w are not silently missed.
inline IterQuadResult gauss_iterated(int d, const std::function<double(const Vec&)>& w,
                                     double box, double abs_tol,
                                     const std::vector<std::pair<double, double>>* clip) {
    static const double knots[] = {0.5, 1.0, 2.0, 4.0, 8.0};
    Vec u(d, 0.0);
    bool ok = true;
    std::function<double(int, double)> level = [&](int k, double tol) -> double {
        double lo = -box, hi = box;
        if (clip) {
            lo = std::max(lo, (*clip)[k].first);
            hi = std::min(hi, (*clip)[k].second);
        }
        if (!(hi > lo)) return 0.0;
        auto fk = [&](double uk) {
            u[k] = uk;
            const double ph = std::exp(-0.5 * uk * uk) * 0.3989422804014326779;
            return (k + 1 == d ? w(u) : level(k + 1, tol * 0.1)) * ph;
        };
        std::vector<double> cuts{lo};
        for (double c : knots) {
            if (-c > lo && -c < hi) cuts.push_back(-c);
            if (c > lo && c < hi) cuts.push_back(c);
        }
        if (0.0 > lo && 0.0 < hi) cuts.push_back(0.0);
        cuts.push_back(hi);
        std::sort(cuts.begin(), cuts.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            QuadResult r = integrate(fk, cuts[i], cuts[i + 1],
                                     tol / static_cast<double>(cuts.size()), 1e-8, 1500);
            total += r.value;
            ok = ok && r.converged;
        }
        return total;
    };
    IterQuadResult out;
    out.value = level(0, abs_tol);
    out.converged = ok;
    return out;
}

inline double gauss_tol_scale(const TestFunction& f, const Vec& x, double spread) {
    if (f.sup_norm) return std::max(*f.sup_norm, 1e-30);
    if (f.poly_growth) {
        const auto& [c, deg] = *f.poly_growth;
        return std::max(c * std::pow(1.0 + norm2(x) + spread, deg), 1e-30);
    }
    return 1.0;
}

// per-axis u-bounds keeping x + rt*u inside the support box (isotropic only)
inline std::vector<std::pair<double, double>> support_clip(const TestFunction& f,
                                                           const Vec& x, double rt) {
    std::vector<std::pair<double, double>> clip;
    if (!f.support_radius) return clip;
    const double r = *f.support_radius;
    clip.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        clip[k] = {(-r - x[k]) / rt, (r - x[k]) / rt};
    return clip;
}

}  // namespace detail

// P_t^W f(x) = E f(x + sqrt(t) L G), G standard normal, by iterated adaptive
// quadrature after the substitution y = x + sqrt(t) L u.
inline ScalarResult apply_gaussian(const HeatKernelSpec& hk, double t,
                                   const TestFunction& f, const Vec& x,
                                   const GaussOptions& go = {}) {
    require(t > 0.0, "apply_gaussian: need t > 0");
    require(f.dim == hk.d && static_cast<int>(x.size()) == hk.d,
            "apply_gaussian: dimension mismatch");
    if (!f.sup_norm && !f.lp_norm && !f.poly_growth)
        throw std::invalid_argument(
            "apply_gaussian: unbounded f without declared integrability");
    const double rt = std::sqrt(t);
    const double tol =
        go.abs_tol > 0.0 ? go.abs_tol
                         : 1e-8 * detail::gauss_tol_scale(f, x, rt * go.box);
    std::function<double(const Vec&)> w;
    if (hk.anisotropic) {
        w = [&](const Vec& u) {
            Vec lu = detail::mat_vec_lower(hk.chol, u);
            Vec y(hk.d);
            for (int k = 0; k < hk.d; ++k) y[k] = x[k] + rt * lu[k];
            return f.eval(y);
        };
        auto r = detail::gauss_iterated(hk.d, w, go.box, tol, nullptr);
        return r.converged ? ScalarResult::of(r.value)
                           : ScalarResult{r.value, EvalStatus::Inconclusive};
    }
    w = [&](const Vec& u) {
        Vec y(hk.d);
        for (int k = 0; k < hk.d; ++k) y[k] = x[k] + rt * u[k];
        return f.eval(y);
    };
    auto clip = detail::support_clip(f, x, rt);
    auto r = detail::gauss_iterated(hk.d, w, go.box, tol,
                                    clip.empty() ? nullptr : &clip);
    return r.converged ? ScalarResult::of(r.value)
                       : ScalarResult{r.value, EvalStatus::Inconclusive};
}

inline ScalarResult apply_gaussian(const NoiseSpec& noise, double t,
                                   const TestFunction& f, const Vec& x,
                                   const GaussOptions& go = {}) {
    return apply_gaussian(noise.heat, t, f, x, go);
}

// --- subordinated density ---------------------------------------------------

// p_t^Y(y) = integral p_s(y) nu_t(ds). Divergent at y = 0 when the mixture
// explodes (Gamma with a t <= d/2).
inline ScalarResult subordinated_density(const NoiseSpec& noise, double t,
                                         const Vec& y, MixOptions opt = {}) {
    require(t > 0.0, "subordinated_density: need t > 0");
    require(!noise.perturbation, "subordinated_density: perturbation not supported");
    const auto& hk = noise.heat;
    require(static_cast<int>(y.size()) == hk.d, "subordinated_density: dimension");
    const auto& sub = noise.subordinator;
    if (sub.kind == SubordinatorKind::DriftOnly)
        return ScalarResult::of(heat_kernel(hk, sub.c * t, y));
    const double r2 = hk.q_inner(y, y);
    if (r2 == 0.0) {
        opt.origin_exponent = -0.5 * hk.d;
    } else if (opt.s_floor <= 0.0) {
        // below s = r2/1400 the kernel is ~ e^{-700}
        opt.s_floor = r2 / 1400.0;
    }
    auto g = [&](double s) { return heat_kernel(hk, s, y); };
    return integrate_against_law(sub, t, g, opt);
}

// --- semigroup application --------------------------------------------------

enum class ApplyMode { QuadratureMixture, MonteCarlo };

struct ApplyOptions {
    std::size_t n = 200000;   // Monte Carlo sample size
    std::uint64_t seed = 1;
    int threads = 0;          // 0: hardware concurrency
    int xi_draws = 64;        // perturbation draws in quadrature mode
    GaussOptions gauss;
    MixOptions mix;
};

namespace detail {

// quadrature value of E g(x + xi_t) given a quadrature routine for the
// unperturbed object; returns mean and spread over xi draws.
template <class Eval>
McEstimate average_over_perturbation(const NoiseSpec& noise, double t, const Vec& x,
                                     const ApplyOptions& opt, Eval&& eval) {
    if (!noise.perturbation) {
        ScalarResult r = eval(x);
        return {r.value, 0.0, 1, r.status};
    }
    // substream keyed away from the MC block indices
    Rng xi_rng = substream(opt.seed ^ 0xA5C39E0DULL, 0);
    MomentAccumulator acc;
    EvalStatus worst = EvalStatus::Ok;
    for (int j = 0; j < opt.xi_draws; ++j) {
        Vec xi = noise.perturbation(t, xi_rng);
        Vec xs(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) xs[k] = x[k] + xi[k];
        ScalarResult r = eval(xs);
        if (r.status != EvalStatus::Ok) worst = r.status;
        acc.add(r.value);
    }
    double se = acc.stderr_();
    if (!(se >= 0.0)) se = 0.0;
    return {acc.mean(), se, acc.n, worst};
}

}  // namespace detail

// P_t^Y f(x) (or P_t^Z with a perturbation present). QuadratureMixture mixes
// the Gaussian quadrature against the law of T_t; MonteCarlo averages
// f(x + sqrt(T) L G + xi) over sampled noise.
inline McEstimate apply_subordinated(const NoiseSpec& noise, double t,
                                     const TestFunction& f, const Vec& x,
                                     ApplyMode mode, const ApplyOptions& opt = {}) {
    require(t > 0.0, "apply_subordinated: need t > 0");
    const auto& hk = noise.heat;
    require(f.dim == hk.d && static_cast<int>(x.size()) == hk.d,
            "apply_subordinated: dimension mismatch");

    if (mode == ApplyMode::MonteCarlo) {
        const auto& sub = noise.subordinator;
        auto partials = run_blocks<MomentAccumulator>(
            opt.seed, opt.n, opt.threads,
            [&](std::size_t b, std::size_t, std::size_t count, Rng& rng) {
                MomentAccumulator acc;
                Rng xi_rng = substream(opt.seed ^ 0xA5C39E0DULL, b + 1);
                Vec u(hk.d), y(hk.d);
                for (std::size_t i = 0; i < count; ++i) {
                    const double s = sample_increment(sub, t, rng);
                    const double rs = std::sqrt(s);
                    for (int k = 0; k < hk.d; ++k) u[k] = std_normal(rng);
                    if (hk.anisotropic) u = detail::mat_vec_lower(hk.chol, u);
                    for (int k = 0; k < hk.d; ++k) y[k] = x[k] + rs * u[k];
                    if (noise.perturbation) {
                        Vec xi = noise.perturbation(t, xi_rng);
                        for (int k = 0; k < hk.d; ++k) y[k] += xi[k];
                    }
                    acc.add(f.eval(y));
                }
                return acc;
            });
        MomentAccumulator total;
        for (const auto& p : partials) total += p;
        return {total.mean(), total.stderr_(), total.n, EvalStatus::Ok};
    }

    return detail::average_over_perturbation(
        noise, t, x, opt, [&](const Vec& xs) -> ScalarResult {
            bool inner_ok = true;
            auto g = [&](double s) {
                ScalarResult r = apply_gaussian(hk, s, f, xs, opt.gauss);
                inner_ok = inner_ok && r.status == EvalStatus::Ok;
                return r.value;
            };
            MixOptions mo = opt.mix;
            if (mo.abs_tol <= 1e-11)
                mo.abs_tol = 1e-9 * detail::gauss_tol_scale(f, xs, 1.0);
            ScalarResult r = integrate_against_law(noise.subordinator, t, g, mo);
            if (!inner_ok && r.status == EvalStatus::Ok)
                r.status = EvalStatus::Inconclusive;
            return r;
        });
}

// --- derivatives of the subordinated semigroup ------------------------------

struct DerivOptions {
    int xi_draws = 64;
    std::uint64_t seed = 1;
    std::size_t norm_tuples = 1000;  // sampled tuples for k >= 3 norms
    double gauss_box = 12.0;
    double abs_tol = 0.0;  // 0: derive from f
    MixOptions mix;
};

namespace detail {

// d^alpha P_s^W f(x) = s^{-|a|/2} integral f(x + sqrt(s)u) H_alpha(u) phi(u) du
inline ScalarResult partial_of_gaussian_stage(const HeatKernelSpec& hk, double s,
                                              const TestFunction& f, const Vec& x,
                                              const MultiIndex& alpha, double box,
                                              double tol) {
    const double rs = std::sqrt(s);
    std::function<double(const Vec&)> w = [&](const Vec& u) {
        Vec y(hk.d);
        double h = 1.0;
        for (int k = 0; k < hk.d; ++k) {
            y[k] = x[k] + rs * u[k];
            if (alpha.entries[k] > 0) h *= hermite_eval(alpha.entries[k], u[k]);
        }
        return f.eval(y) * h;
    };
    auto clip = support_clip(f, x, rs);
    auto r = gauss_iterated(hk.d, w, box, tol, clip.empty() ? nullptr : &clip);
    const double v = std::pow(s, -0.5 * alpha.order()) * r.value;
    return r.converged ? ScalarResult::of(v)
                       : ScalarResult{v, EvalStatus::Inconclusive};
}

inline std::vector<MultiIndex> multi_indices(int d, int k) {
    std::vector<MultiIndex> out;
    MultiIndex cur;
    cur.entries.assign(d, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos + 1 == d) {
            cur.entries[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int c = left; c >= 0; --c) {
            cur.entries[pos] = c;
            rec(pos + 1, left - c);
        }
    };
    rec(0, k);
    return out;
}

}  // namespace detail

// d^alpha P_t^Y f(x) (perturbation averaged in when present). Divergent when
// E T_t^{-|alpha|/2} is infinite. Isotropic heat part only.
inline ScalarResult subordinated_partial(const NoiseSpec& noise, double t,
                                         const TestFunction& f, const Vec& x,
                                         const MultiIndex& alpha,
                                         const DerivOptions& opt = {}) {
    require(t > 0.0, "subordinated_partial: need t > 0");
    const auto& hk = noise.heat;
    require(!hk.anisotropic, "subordinated_partial: anisotropic Q unsupported");
    require(alpha.dim() == hk.d && f.dim == hk.d, "subordinated_partial: dimension");
    const int k = alpha.order();
    if (k == 0) {
        ApplyOptions ao;
        ao.seed = opt.seed;
        ao.xi_draws = opt.xi_draws;
        ao.mix = opt.mix;
        McEstimate e = apply_subordinated(noise, t, f, x, ApplyMode::QuadratureMixture, ao);
        return {e.value, e.status};
    }
    if (!negative_moment_is_finite(noise.subordinator, t, 0.5 * k))
        return ScalarResult::divergent();

    ApplyOptions shim;
    shim.seed = opt.seed;
    shim.xi_draws = opt.xi_draws;
    McEstimate avg = detail::average_over_perturbation(
        noise, t, x, shim, [&](const Vec& xs) -> ScalarResult {
            const double tol =
                opt.abs_tol > 0.0
                    ? opt.abs_tol
                    : 1e-9 * detail::gauss_tol_scale(f, xs, 1.0) * (1 << k);
            bool inner_ok = true;
            auto g = [&](double s) {
                ScalarResult r = detail::partial_of_gaussian_stage(hk, s, f, xs, alpha,
                                                                   opt.gauss_box, tol);
                inner_ok = inner_ok && r.status == EvalStatus::Ok;
                return r.value;
            };
            MixOptions mo = opt.mix;
            mo.origin_exponent = -0.5 * k;
            if (mo.abs_tol <= 1e-11) mo.abs_tol = tol;
            ScalarResult r = integrate_against_law(noise.subordinator, t, g, mo);
            if (!inner_ok && r.status == EvalStatus::Ok)
                r.status = EvalStatus::Inconclusive;
            return r;
        });
    return {avg.value, avg.status};
}

inline std::vector<ScalarResult> subordinated_gradient(const NoiseSpec& noise, double t,
                                                       const TestFunction& f, const Vec& x,
                                                       const DerivOptions& opt = {}) {
    std::vector<ScalarResult> out;
    for (int i = 0; i < noise.heat.d; ++i) {
        MultiIndex a;
        a.entries.assign(noise.heat.d, 0);
        a.entries[i] = 1;
        out.push_back(subordinated_partial(noise, t, f, x, a, opt));
    }
    return out;
}

// Operator norm of D^k P_t f(x): exact for k = 1 (gradient norm) and k = 2
// (spectral norm of the Hessian), sampled over random unit tuples for k >= 3
// after tabulating all order-k partials.
inline ScalarResult subordinated_derivative_norm(const NoiseSpec& noise, double t,
                                                 const TestFunction& f, const Vec& x,
                                                 int k, const DerivOptions& opt = {}) {
    require(k >= 1, "subordinated_derivative_norm: need k >= 1");
    const int d = noise.heat.d;
    if (!negative_moment_is_finite(noise.subordinator, t, 0.5 * k))
        return ScalarResult::divergent();

    auto mis = detail::multi_indices(d, k);
    std::vector<double> vals(mis.size());
    EvalStatus worst = EvalStatus::Ok;
    for (std::size_t i = 0; i < mis.size(); ++i) {
        ScalarResult r = subordinated_partial(noise, t, f, x, mis[i], opt);
        if (r.status == EvalStatus::Divergent) return r;
        if (r.status != EvalStatus::Ok) worst = r.status;
        vals[i] = r.value;
    }

    if (k == 1) {
        double s = 0.0;
        for (double v : vals) s += v * v;
        return {std::sqrt(s), worst};
    }
    if (k == 2) {
        Matrix h(d);
        for (std::size_t i = 0; i < mis.size(); ++i) {
            int a = -1, b = -1;
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < mis[i].entries[c]; ++r) (a < 0 ? a : b) = c;
            h(a, b) = h(b, a) = vals[i];
        }
        Vec ev = jacobi_eigenvalues(h);
        double m = 0.0;
        for (double e : ev) m = std::max(m, std::fabs(e));
        return {m, worst};
    }

    // lookup: coordinate counts -> tabulated partial
    std::map<std::vector<int>, double> table;
    for (std::size_t i = 0; i < mis.size(); ++i) table[mis[i].entries] = vals[i];
    Rng rng(splitmix64(opt.seed ^ 0x6EED5EEDULL));
    double best = 0.0;
    std::vector<int> idx(k, 0);
    std::vector<Vec> h(k, Vec(d, 0.0));
    for (std::size_t s = 0; s < opt.norm_tuples; ++s) {
        for (int j = 0; j < k; ++j) {
            double n2 = 0.0;
            do {
                for (int c = 0; c < d; ++c) h[j][c] = std_normal(rng);
                n2 = norm2(h[j]);
            } while (n2 < 1e-8);
            for (int c = 0; c < d; ++c) h[j][c] /= n2;
        }
        // contract the symmetric tensor with the tuple
        double total = 0.0;
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
            std::vector<int> cnt(d, 0);
            double prod = 1.0;
            for (int j = 0; j < k; ++j) {
                ++cnt[idx[j]];
                prod *= h[j][idx[j]];
            }
            total += table[cnt] * prod;
            int j = 0;
            while (j < k && ++idx[j] == d) idx[j++] = 0;
            if (j == k) break;
        }
        best = std::max(best, std::fabs(total));
    }
    return {best, worst};
}

// --- smoothing bounds ---------------------------------------------------

namespace detail {

inline double declared_lp(const TestFunction& f, double p) {
    if (std::isinf(p)) {
        require(f.sup_norm.has_value(), "bound_rhs: sup norm not declared");
        return *f.sup_norm;
    }
    require(static_cast<bool>(f.lp_norm), "bound_rhs: L_p norm not declared");
    return f.lp_norm(p);
}

inline double declared_weighted(const TestFunction& f, double l, double q) {
    if (l == 0.0) return declared_lp(f, q);
    if (std::isinf(q)) {
        require(static_cast<bool>(f.weighted_sup), "bound_rhs: weighted sup not declared");
        return f.weighted_sup(l);
    }
    require(static_cast<bool>(f.weighted_lq_norm),
            "bound_rhs: weighted L_q norm not declared");
    return f.weighted_lq_norm(l, q);
}

}  // namespace detail

// RHS of the weighted derivative bound:
//   max(||f||_p, || |y|^l f ||_q) * (E T^{(l-k)/2 - d/2p} + E T^{-k/2 - d/2q}).
inline ScalarResult bound_rhs(const NoiseSpec& noise, double t, int k, double l,
                              double p, double q, const TestFunction& f) {
    require(t > 0.0 && k >= 0 && l >= 0.0, "bound_rhs: bad arguments");
    require(p >= 1.0 && q >= 1.0, "bound_rhs: need p,q >= 1");
    const double d = noise.heat.d;
    const double norm = std::max(detail::declared_lp(f, p),
                                 detail::declared_weighted(f, l, q));
    const double e1 = 0.5 * (l - k) - (std::isinf(p) ? 0.0 : 0.5 * d / p);
    const double e2 = -0.5 * k - (std::isinf(q) ? 0.0 : 0.5 * d / q);
    ScalarResult m1 = fractional_moment(noise.subordinator, t, e1);
    ScalarResult m2 = fractional_moment(noise.subordinator, t, e2);
    if (m1.status == EvalStatus::Divergent || m2.status == EvalStatus::Divergent)
        return ScalarResult::divergent();
    if (m1.status != EvalStatus::Ok) return m1;
    if (m2.status != EvalStatus::Ok) return m2;
    return ScalarResult::of(norm * (m1.value + m2.value));
}

enum class Verdict { BoundHolds, BoundViolated, Divergent };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::BoundHolds: return "BoundHolds";
        case Verdict::BoundViolated: return "BoundViolated";
        case Verdict::Divergent: return "Divergent";
    }
    return "?";
}

struct SmoothingRow {
    double t = 0.0;
    double estimate = kNaN;
    double rhs = kNaN;
    double ratio = kNaN;
    EvalStatus status = EvalStatus::Ok;
};

struct SmoothingReport {
    int k = 1;
    double l = 0.0, p = kInf, q = kInf;
    std::vector<SmoothingRow> rows;
    double fitted_constant = kNaN;
    Verdict verdict = Verdict::BoundHolds;
    bool any_divergent = false;
};

// For each t: estimate sup over the x-grid of |x|^l * op-norm(D^k P_t f(x)),
// compare to bound_rhs, fit C = max ratio, and check ratio stability.
inline SmoothingReport verify_smoothing_bound(const NoiseSpec& noise,
                                              const TestFunction& f,
                                              const Vec& t_grid, int k, double l,
                                              double p, double q,
                                              const std::vector<Vec>& x_grid,
                                              const DerivOptions& opt = {}) {
    require(k >= 1, "verify_smoothing_bound: need k >= 1");
    require(!t_grid.empty() && !x_grid.empty(), "verify_smoothing_bound: empty grid");
    SmoothingReport rep;
    rep.k = k;
    rep.l = l;
    rep.p = p;
    rep.q = q;
    for (double t : t_grid) {
        SmoothingRow row;
        row.t = t;
        ScalarResult rhs = bound_rhs(noise, t, k, l, p, q, f);
        if (rhs.status == EvalStatus::Divergent) {
            row.status = EvalStatus::Divergent;
            rep.any_divergent = true;
            rep.rows.push_back(row);
            continue;
        }
        row.rhs = rhs.value;
        double sup = 0.0;
        EvalStatus worst = rhs.status;
        bool divergent = false;
        for (const auto& x : x_grid) {
            ScalarResult nr = subordinated_derivative_norm(noise, t, f, x, k, opt);
            if (nr.status == EvalStatus::Divergent) {
                divergent = true;
                break;
            }
            if (nr.status != EvalStatus::Ok) worst = nr.status;
            sup = std::max(sup, std::pow(norm2(x), l) * nr.value);
        }
        if (divergent) {
            row.status = EvalStatus::Divergent;
            rep.any_divergent = true;
        } else {
            row.estimate = sup;
            row.ratio = sup / rhs.value;
            row.status = worst;
        }
        rep.rows.push_back(row);
    }
    double rmin = kInf, rmax = 0.0;
    int n_ok = 0;
    for (const auto& r : rep.rows)
        if (r.status != EvalStatus::Divergent && std::isfinite(r.ratio)) {
            rmin = std::min(rmin, r.ratio);
            rmax = std::max(rmax, r.ratio);
            ++n_ok;
        }
    if (n_ok == 0) {
        rep.verdict = Verdict::Divergent;
    } else {
        rep.fitted_constant = rmax;
        const bool stable = rmin > 0.0 ? rmax / rmin <= 10.0 : rmax == 0.0;
        rep.verdict = stable ? Verdict::BoundHolds : Verdict::BoundViolated;
    }
    return rep;
}

inline std::string smoothing_report_csv(const SmoothingReport& rep) {
    std::string out = "t,k,l,p,q,estimate,rhs,ratio,status\n";
    char buf[256];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%g,%g,%g,%.17g,%.17g,%.17g,%s\n",
                      r.t, rep.k, rep.l, rep.p, rep.q, r.estimate, r.rhs, r.ratio,
                      to_string(r.status));
        out += buf;
    }
    return out;
}

// --- Hoelder seminorm -----------------------------------------------------

struct HolderReport {
    double seminorm = kNaN;
    double rhs = kNaN;
    double ratio = kNaN;
    EvalStatus status = EvalStatus::Ok;
};

// sup over pairs of |P f(x1) - P f(x2)| / |x1 - x2|^beta, compared against
// ||f||_{L_p} E T^{-(beta + d/p)/2}.
inline HolderReport holder_seminorm_estimate(const NoiseSpec& noise, double t,
                                             const TestFunction& f, double beta,
                                             const std::vector<std::pair<Vec, Vec>>& pairs,
                                             double p = kInf,
                                             const ApplyOptions& opt = {}) {
    require(beta > 0.0 && beta < 1.0, "holder_seminorm_estimate: need beta in (0,1)");
    require(t > 0.0 && !pairs.empty(), "holder_seminorm_estimate: bad arguments");
    HolderReport out;
    const double d = noise.heat.d;
    const double mom_exp = -0.5 * (beta + (std::isinf(p) ? 0.0 : d / p));
    ScalarResult mom = fractional_moment(noise.subordinator, t, mom_exp);

    double sup = 0.0;
    EvalStatus worst = EvalStatus::Ok;
    for (const auto& [x1, x2] : pairs) {
        Vec diff(x1.size());
        for (std::size_t i = 0; i < x1.size(); ++i) diff[i] = x1[i] - x2[i];
        const double dist = norm2(diff);
        if (dist == 0.0) continue;
        McEstimate v1 = apply_subordinated(noise, t, f, x1, ApplyMode::QuadratureMixture, opt);
        McEstimate v2 = apply_subordinated(noise, t, f, x2, ApplyMode::QuadratureMixture, opt);
        if (v1.status != EvalStatus::Ok) worst = v1.status;
        if (v2.status != EvalStatus::Ok) worst = v2.status;
        sup = std::max(sup, std::fabs(v1.value - v2.value) / std::pow(dist, beta));
    }
    out.seminorm = sup;
    if (mom.status == EvalStatus::Divergent) {
        out.status = EvalStatus::Divergent;
        return out;
    }
    out.rhs = detail::declared_lp(f, p) * mom.value;
    out.ratio = out.seminorm / out.rhs;
    out.status = worst;
    return out;
}

// --- L_p norm of a derivative ----------------------------------------------

struct LpNormOptions {
    double box_radius = 0.0;  // 0: 6 + support radius
    int n_per_axis = 81;
    DerivOptions deriv;
};

struct LpNormReport {
    double norm = kNaN;
    double rhs = kNaN;
    double ratio = kNaN;
    EvalStatus status = EvalStatus::Ok;
};

// Grid L_p norm of x -> d^alpha P_t^Y f(x) over a truncation box, compared to
// ||f||_{L_p} E T^{-|alpha|/2}.
inline LpNormReport lp_derivative_norm(const NoiseSpec& noise, double t,
                                       const TestFunction& f, const MultiIndex& alpha,
                                       double p, const LpNormOptions& opt = {}) {
    require(t > 0.0 && p >= 1.0 && !std::isinf(p), "lp_derivative_norm: bad arguments");
    require(!noise.perturbation, "lp_derivative_norm: perturbation not supported");
    const int d = noise.heat.d;
    require(alpha.dim() == d, "lp_derivative_norm: dimension");
    LpNormReport out;
    const int m = alpha.order();
    ScalarResult mom = fractional_moment(noise.subordinator, t, -0.5 * m);
    if (mom.status == EvalStatus::Divergent) {
        out.status = EvalStatus::Divergent;
        return out;
    }
    out.rhs = detail::declared_lp(f, p) * mom.value;

    const double r =
        opt.box_radius > 0.0 ? opt.box_radius : 6.0 + f.support_radius.value_or(0.0);
    const int n = opt.n_per_axis;
    const double h = 2.0 * r / n;
    EvalStatus worst = EvalStatus::Ok;
    double acc = 0.0;
    std::vector<int> idx(d, 0);
    for (;;) {
        Vec x(d);
        for (int c = 0; c < d; ++c) x[c] = -r + (idx[c] + 0.5) * h;
        ScalarResult v = subordinated_partial(noise, t, f, x, alpha, opt.deriv);
        if (v.status == EvalStatus::Divergent) {
            out.status = EvalStatus::Divergent;
            return out;
        }
        if (v.status != EvalStatus::Ok) worst = v.status;
        acc += std::pow(std::fabs(v.value), p);
        int c = 0;
        while (c < d && ++idx[c] == n) idx[c++] = 0;
        if (c == d) break;
    }
    out.norm = std::pow(acc * std::pow(h, d), 1.0 / p);
    out.ratio = out.norm / out.rhs;
    out.status = worst;
    return out;
}

}  // namespace levysmooth
