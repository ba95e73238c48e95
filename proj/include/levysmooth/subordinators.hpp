#pragma once

// Subordinator models: Laplace exponents, increment sampling, negative and
// fractional moments (quadrature / Monte Carlo / closed form), Levy-tail
// power-law fitting, marginal densities, and integration of a function
// against the time-t law.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "common.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace levysmooth {

enum class SubordinatorKind { Stable, Gamma, DriftOnly };

struct SubordinatorSpec {
    SubordinatorKind kind = SubordinatorKind::DriftOnly;
    double rho = 0.0;  // Stable index in (0,1)
    double a = 0.0;    // Gamma shape rate
    double b = 0.0;    // Gamma rate
    double c = 0.0;    // DriftOnly slope

    static SubordinatorSpec stable(double rho) {
        require(rho > 0.0 && rho < 1.0, "stable: need rho in (0,1)");
        SubordinatorSpec s;
        s.kind = SubordinatorKind::Stable;
        s.rho = rho;
        return s;
    }
    static SubordinatorSpec gamma(double a, double b) {
        require(a > 0.0 && b > 0.0, "gamma: need a,b > 0");
        SubordinatorSpec s;
        s.kind = SubordinatorKind::Gamma;
        s.a = a;
        s.b = b;
        return s;
    }
    static SubordinatorSpec drift_only(double c) {
        require(c > 0.0, "drift_only: need c > 0");
        SubordinatorSpec s;
        s.kind = SubordinatorKind::DriftOnly;
        s.c = c;
        return s;
    }

    std::string label() const {
        char buf[96];
        switch (kind) {
            case SubordinatorKind::Stable:
                std::snprintf(buf, sizeof buf, "rho=%g", rho);
                return "stable;" + std::string(buf);
            case SubordinatorKind::Gamma:
                std::snprintf(buf, sizeof buf, "a=%g;b=%g", a, b);
                return "gamma;" + std::string(buf);
            case SubordinatorKind::DriftOnly:
                std::snprintf(buf, sizeof buf, "c=%g", c);
                return "drift;" + std::string(buf);
        }
        return "?";
    }
};

// E e^{-lambda T_t} = e^{-t Phi(lambda)}.
inline double laplace_exponent(const SubordinatorSpec& s, double lambda) {
    if (lambda < 0.0) throw std::domain_error("laplace_exponent: lambda < 0");
    switch (s.kind) {
        case SubordinatorKind::Stable: return std::pow(lambda, s.rho);
        case SubordinatorKind::Gamma: return s.a * std::log1p(lambda / s.b);
        case SubordinatorKind::DriftOnly: return s.c * lambda;
    }
    return kNaN;
}

// Levy measure tail m(]x, inf[).
inline double levy_tail(const SubordinatorSpec& s, double x) {
    require(x > 0.0, "levy_tail: need x > 0");
    switch (s.kind) {
        case SubordinatorKind::Stable:
            return std::pow(x, -s.rho) / std::tgamma(1.0 - s.rho);
        case SubordinatorKind::Gamma:
            return -s.a * std::expint(-s.b * x);  // a * E1(b x)
        case SubordinatorKind::DriftOnly: return 0.0;
    }
    return kNaN;
}

// Unit-scale one-sided rho-stable draw (E e^{-lambda S} = e^{-lambda^rho}),
// Kanter's transform: S = (A(U)/W)^{(1-rho)/rho}, U ~ U(0,pi), W ~ Exp(1).
inline double kanter_stable(double rho, Rng& rng) {
    double u, w;
    do { u = kPi * uniform01(rng); } while (u <= 0.0 || u >= kPi);
    do { w = -std::log(uniform01(rng)); } while (!(w > 0.0));
    const double log_a = (rho * std::log(std::sin(rho * u)) +
                          (1.0 - rho) * std::log(std::sin((1.0 - rho) * u)) -
                          std::log(std::sin(u))) /
                         (1.0 - rho);
    return std::exp((1.0 - rho) / rho * (log_a - std::log(w)));
}

inline double sample_increment(const SubordinatorSpec& s, double t, Rng& rng) {
    if (!(t > 0.0)) throw std::domain_error("sample_increment: need t > 0");
    switch (s.kind) {
        case SubordinatorKind::Stable:
            return std::pow(t, 1.0 / s.rho) * kanter_stable(s.rho, rng);
        case SubordinatorKind::Gamma: {
            std::gamma_distribution<double> g(s.a * t, 1.0 / s.b);
            double x;
            do { x = g(rng); } while (!(x > 0.0));
            return x;
        }
        case SubordinatorKind::DriftOnly: return s.c * t;
    }
    return kNaN;
}

// --- moments ------------------------------------------------------------

enum class MomentMethod { Quadrature, MonteCarlo, ClosedForm };

struct MomentQuery {
    double t = 1.0;
    double p = 0.5;  // computes E T_t^{-p}
    MomentMethod method = MomentMethod::Quadrature;
};

struct MomentEstimate {
    double value = kNaN;
    double stderr_ = 0.0;
    EvalStatus status = EvalStatus::Ok;
};

inline bool negative_moment_is_finite(const SubordinatorSpec& s, double t, double p) {
    if (s.kind == SubordinatorKind::Gamma) return s.a * t > p;
    return true;  // stable & drift-only have all negative moments
}

namespace detail {

// integral_0^1 w^{q-1} g(w) dw with g smooth, via u = w^q.
template <class G>
double head_power_integral(double q, const G& g, double tol) {
    auto f = [&](double u) { return g(std::pow(u, 1.0 / q)) / q; };
    return integrate(f, 0.0, 1.0, tol, 1e-10).value;
}

// K(q) = integral_0^inf w^{q-1} e^{-w} dw by quadrature (numeric Gamma(q)).
inline QuadResult gamma_integral_numeric(double q, double tol) {
    QuadResult out;
    out.value = head_power_integral(q, [](double w) { return std::exp(-w); }, tol * 0.2);
    double w_hi = std::max(40.0, 2.0 * q + 20.0);
    while ((q - 1.0) * std::log(w_hi) - w_hi > std::log(tol * 1e-3)) w_hi *= 1.3;
    auto f = [&](double w) { return std::exp((q - 1.0) * std::log(w) - w); };
    QuadResult tail = integrate(f, 1.0, w_hi, tol * 0.4, 1e-10);
    out.value += tail.value;
    out.error = tail.error;
    out.converged = tail.converged;
    out.evals = tail.evals;
    return out;
}

}  // namespace detail

// E T_t^{-p} = Gamma(p)^{-1} integral_0^inf lambda^{p-1} e^{-t Phi(lambda)} dlambda.
inline MomentEstimate negative_moment_quadrature(const SubordinatorSpec& s, double t, double p) {
    require(t > 0.0 && p > 0.0, "negative_moment: need t > 0, p > 0");
    MomentEstimate out;
    const double tol = 1e-12;
    switch (s.kind) {
        case SubordinatorKind::DriftOnly: {
            auto k = detail::gamma_integral_numeric(p, tol);
            out.value = std::pow(s.c * t, -p) * k.value / std::tgamma(p);
            out.status = k.converged ? EvalStatus::Ok : EvalStatus::Inconclusive;
            return out;
        }
        case SubordinatorKind::Stable: {
            // w = t lambda^rho
            const double q = p / s.rho;
            auto k = detail::gamma_integral_numeric(q, tol);
            out.value = std::pow(t, -q) / s.rho * k.value / std::tgamma(p);
            out.status = k.converged ? EvalStatus::Ok : EvalStatus::Inconclusive;
            return out;
        }
        case SubordinatorKind::Gamma: {
            // integrand tail ~ b^{at} lambda^{p-1-at}: divergent iff p >= a t
            const double ta = t * s.a;
            if (p >= ta) {
                out.value = kInf;
                out.status = EvalStatus::Divergent;
                return out;
            }
            // w = t a log(1 + lambda/b), lambda = b expm1(w/(ta))
            const double gamma_rate = 1.0 - p / ta;
            auto integrand_smooth = [&](double w) {
                const double lam = s.b * std::expm1(w / ta);
                double core = (w > 0.0) ? std::pow(lam / w, p - 1.0)
                                        : std::pow(s.b / ta, p - 1.0);
                return core * std::exp(-w + w / ta) * (s.b / ta);
            };
            double head = detail::head_power_integral(p, integrand_smooth, tol * 0.3);
            double w_hi = std::max(
                2.0, std::log(std::pow(s.b, p) / (ta * gamma_rate * tol * 1e-2) + 1.0) /
                         gamma_rate);
            auto integrand = [&](double w) {
                return std::pow(w, p - 1.0) * integrand_smooth(w);
            };
            QuadResult tail = integrate(integrand, 1.0, w_hi, tol * 0.5, 1e-10);
            out.value = (head + tail.value) / std::tgamma(p);
            out.status = tail.converged ? EvalStatus::Ok : EvalStatus::Inconclusive;
            return out;
        }
    }
    return out;
}

inline MomentEstimate negative_moment_closed_form(const SubordinatorSpec& s, double t, double p) {
    require(t > 0.0 && p > 0.0, "negative_moment: need t > 0, p > 0");
    MomentEstimate out;
    switch (s.kind) {
        case SubordinatorKind::DriftOnly:
            out.value = std::pow(s.c * t, -p);
            return out;
        case SubordinatorKind::Stable:
            out.value = std::pow(t, -p / s.rho) / s.rho *
                        std::exp(std::lgamma(p / s.rho) - std::lgamma(p));
            return out;
        case SubordinatorKind::Gamma:
            if (s.a * t <= p) {
                out.value = kInf;
                out.status = EvalStatus::Divergent;
                return out;
            }
            out.value = std::pow(s.b, p) *
                        std::exp(std::lgamma(s.a * t - p) - std::lgamma(s.a * t));
            return out;
    }
    return out;
}

inline MomentEstimate negative_moment_mc(const SubordinatorSpec& s, double t, double p,
                                         std::size_t n, std::uint64_t seed,
                                         int threads = 0) {
    require(n >= 1, "negative_moment_mc: need n >= 1");
    if (s.kind == SubordinatorKind::DriftOnly)
        return {std::pow(s.c * t, -p), 0.0, EvalStatus::Ok};
    McEstimate e = mc_mean(seed, n, threads, [&](Rng& rng) {
        return std::pow(sample_increment(s, t, rng), -p);
    });
    return {e.value, e.stderr_, EvalStatus::Ok};
}

inline MomentEstimate negative_moment(const SubordinatorSpec& s, const MomentQuery& q,
                                      std::size_t n = 1000000, std::uint64_t seed = 1,
                                      int threads = 0) {
    switch (q.method) {
        case MomentMethod::Quadrature: return negative_moment_quadrature(s, q.t, q.p);
        case MomentMethod::MonteCarlo: return negative_moment_mc(s, q.t, q.p, n, seed, threads);
        case MomentMethod::ClosedForm: return negative_moment_closed_form(s, q.t, q.p);
    }
    return {};
}

// E T_t^r for any real r (closed forms; Divergent when the moment is infinite).
inline ScalarResult fractional_moment(const SubordinatorSpec& s, double t, double r) {
    require(t > 0.0, "fractional_moment: need t > 0");
    if (r == 0.0) return ScalarResult::of(1.0);
    switch (s.kind) {
        case SubordinatorKind::DriftOnly: return ScalarResult::of(std::pow(s.c * t, r));
        case SubordinatorKind::Gamma:
            if (s.a * t + r <= 0.0) return ScalarResult::divergent();
            return ScalarResult::of(std::pow(s.b, -r) *
                                    std::exp(std::lgamma(s.a * t + r) - std::lgamma(s.a * t)));
        case SubordinatorKind::Stable:
            if (r >= s.rho) return ScalarResult::divergent();
            return ScalarResult::of(std::pow(t, r / s.rho) *
                                    std::exp(std::lgamma(1.0 - r / s.rho) -
                                             std::lgamma(1.0 - r)));
    }
    return ScalarResult::inconclusive();
}

// --- Tauberian tail fit ---------------------------------------------------

struct TailFit {
    double c = kNaN;
    double exponent = kNaN;
    double residual = kNaN;
    bool consistent = false;
    EvalStatus status = EvalStatus::Ok;
};

// Fits m(]x,inf[) ~ C x^{-p} on a log grid near 0 and checks the exponent.
inline TailFit tauberian_tail_check(const SubordinatorSpec& s, double p,
                                    double x_lo = 1e-6, double x_hi = 1e-2,
                                    int n_pts = 40) {
    require(p > 0.0 && p < 1.0, "tauberian_tail_check: need p in (0,1)");
    TailFit out;
    if (s.kind == SubordinatorKind::DriftOnly) {
        out.status = EvalStatus::NotApplicable;
        return out;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n_pts), ly(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const double x =
            x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (n_pts - 1));
        lx[i] = std::log(x);
        ly[i] = std::log(levy_tail(s, x));
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double n = n_pts;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double rss = 0;
    for (int i = 0; i < n_pts; ++i) rss += sqr(ly[i] - intercept - slope * lx[i]);
    out.c = std::exp(intercept);
    out.exponent = -slope;
    out.residual = std::sqrt(rss / n);
    out.consistent = std::fabs(out.exponent - p) <= 0.01 && out.residual <= 0.02;
    return out;
}

// --- marginal densities ---------------------------------------------------

namespace detail {

// Kanter's A(u) on (0, pi) in log form for the given rho.
inline double log_kanter_a(double rho, double u) {
    return (rho * std::log(std::sin(rho * u)) +
            (1.0 - rho) * std::log(std::sin((1.0 - rho) * u)) - std::log(std::sin(u))) /
           (1.0 - rho);
}

}  // namespace detail

// Density of the unit-scale one-sided rho-stable law (Zolotarev's integral
// representation; the same A(u) as the sampler).
inline double stable_subordinator_density(double rho, double x) {
    require(rho > 0.0 && rho < 1.0, "stable density: need rho in (0,1)");
    if (!(x > 0.0)) return 0.0;
    const double cpow = -rho / (1.0 - rho);
    const double c = std::pow(x, cpow);  // x^{-rho/(1-rho)}
    const double log_a0 = (rho * std::log(rho) + (1.0 - rho) * std::log(1.0 - rho)) /
                          (1.0 - rho);
    if (std::exp(log_a0) * c > 700.0) return 0.0;  // superexponentially small at 0+
    // integrand A(u) exp(-A(u) c) vanishes once A(u) c is huge; find the cutoff.
    double u_hi = kPi;
    {
        double lo = kPi * 0.5, hi = kPi * (1.0 - 1e-15);
        if (detail::log_kanter_a(rho, hi) + std::log(c) > std::log(745.0)) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (detail::log_kanter_a(rho, mid) + std::log(c) > std::log(745.0))
                    hi = mid;
                else
                    lo = mid;
            }
            u_hi = hi;
        } else {
            u_hi = hi;
        }
    }
    auto f = [&](double u) {
        if (u <= 0.0 || u >= kPi) return 0.0;
        const double la = detail::log_kanter_a(rho, u);
        const double ac = std::exp(la) * c;
        if (ac > 745.0) return 0.0;
        return std::exp(la - ac);
    };
    QuadResult q = integrate(f, 0.0, u_hi, 1e-13, 1e-10);
    return rho / (1.0 - rho) * std::pow(x, -1.0 / (1.0 - rho)) * q.value / kPi;
}

// Density of T_t at s (Gamma and Stable; DriftOnly has no density).
inline double subordinator_density(const SubordinatorSpec& spec, double t, double s) {
    require(t > 0.0, "subordinator_density: need t > 0");
    if (!(s > 0.0)) return 0.0;
    switch (spec.kind) {
        case SubordinatorKind::Gamma: {
            const double at = spec.a * t;
            return std::exp(at * std::log(spec.b) + (at - 1.0) * std::log(s) -
                            spec.b * s - std::lgamma(at));
        }
        case SubordinatorKind::Stable: {
            const double scale = std::pow(t, 1.0 / spec.rho);
            return stable_subordinator_density(spec.rho, s / scale) / scale;
        }
        case SubordinatorKind::DriftOnly:
            throw std::domain_error("subordinator_density: drift-only law is a point mass");
    }
    return kNaN;
}

// --- integration against the time-t law -----------------------------------

struct MixOptions {
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    // Contributions below this s are negligible for the caller's integrand
    // (0: derive from the law's own mass assuming the integrand is bounded).
    double s_floor = 0.0;
    // |g(s)| ~ s^e near s = 0; negative e widens the lower cutoff and makes
    // the Gamma mixture Divergent when a t + e <= 0.
    double origin_exponent = 0.0;
    std::size_t max_intervals = 4000;
};

// integral_0^inf g(s) nu_t(ds), where nu_t = law(T_t).
inline ScalarResult integrate_against_law(const SubordinatorSpec& spec, double t,
                                          const std::function<double(double)>& g,
                                          const MixOptions& opt = {}) {
    require(t > 0.0, "integrate_against_law: need t > 0");
    if (spec.kind == SubordinatorKind::DriftOnly) return ScalarResult::of(g(spec.c * t));

    const double oe = opt.origin_exponent;
    double s_lo, s_hi;
    if (spec.kind == SubordinatorKind::Gamma) {
        const double at = spec.a * t;
        // integrand near 0 ~ s^{at + oe - 1}
        if (at + oe <= 0.0) return ScalarResult::divergent();
        const double expo = std::max(at + std::min(oe, 0.0), 0.02);
        const double mass_floor =
            std::exp((std::log(1e-14) + std::lgamma(at) + std::log(expo)) / expo) /
            spec.b;
        s_lo = opt.s_floor > 0.0 ? opt.s_floor : mass_floor;
        s_hi = (at + 40.0 + 12.0 * std::sqrt(at + 1.0)) / spec.b;
    } else {
        const double scale = std::pow(t, 1.0 / spec.rho);
        const double log_a0 = (spec.rho * std::log(spec.rho) +
                               (1.0 - spec.rho) * std::log(1.0 - spec.rho)) /
                              (1.0 - spec.rho);
        // A0 z^{-rho/(1-rho)} = thr marks where the density is ~ e^{-thr};
        // any power singularity of g is swamped by that, with margin.
        const double thr = 45.0 + 10.0 * std::max(-oe, 0.0);
        const double z_lo =
            std::exp((log_a0 - std::log(thr)) * (1.0 - spec.rho) / spec.rho);
        s_lo = opt.s_floor > 0.0 ? opt.s_floor : z_lo * scale;
        // tail mass ~ t s^{-rho} / Gamma(1-rho)
        s_hi = scale * std::pow(1e12, 1.0 / spec.rho);
    }
    s_lo = std::max(s_lo, 1e-290);
    if (s_lo > s_hi * 0.5) s_lo = s_hi * 1e-6;

    auto fv = [&](double v) {
        const double s = std::exp(v);
        return g(s) * subordinator_density(spec, t, s) * s;
    };
    QuadResult main = integrate(fv, std::log(s_lo), std::log(s_hi), opt.abs_tol,
                                opt.rel_tol, opt.max_intervals);
    // extend beyond s_hi until negligible (heavy stable tails, safety for Gamma)
    auto fs = [&](double s) { return g(s) * subordinator_density(spec, t, s); };
    QuadResult ext = integrate_to_infinity(fs, s_hi, s_hi, opt.abs_tol,
                                           std::max(opt.rel_tol, 1e-10), 50);
    ScalarResult out = ScalarResult::of(main.value + ext.value);
    if (!main.converged || !ext.converged) out.status = EvalStatus::Inconclusive;
    return out;
}

}  // namespace levysmooth
