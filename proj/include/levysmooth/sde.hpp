#pragma once

// Euler-Maruyama simulation driven by subordinated noise, Monte-Carlo
// semigroup evaluation, empirical strong-Feller probing with common random
// numbers, the Duhamel-formula residual check, and the empirical local-L_p
// density criterion.
//
// The noise increment over a step of length dt is simulated exactly in
// distribution: dZ = sqrt(dT) L G (+ dxi) with dT a subordinator increment;
// only the drift/diffusion coupling carries discretization error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "kernels.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "semigroup.hpp"
#include "subordinators.hpp"
#include "test_functions.hpp"

namespace levysmooth {

// --- SDE specification -------------------------------------------------------

enum class GrowthClass { Bounded, Linear, Polynomial };

struct SdeSpec {
    int d = 1;
    std::function<Vec(double, const Vec&)> drift;     // b(t, x)
    std::function<Matrix(double, const Vec&)> sigma;  // null => additive
    NoiseSpec noise;
    GrowthClass growth = GrowthClass::Bounded;
    double growth_power = 0.0;   // l for Polynomial (Linear: 1)
    double ellipticity = 0.0;    // declared floor for sigma^T sigma
    std::string drift_label = "custom";
    std::string sigma_label = "none";
};

// Samples |b|/(1+|x|)^l on probe grids at two scales; true when the declared
// growth holds with a finite constant (a sup ratio that keeps climbing with
// the probe radius means the exponent was understated) and sigma, when
// present, respects the ellipticity floor in the probe directions.
inline bool validate_sde_spec(const SdeSpec& spec, double probe_radius = 50.0,
                              int probe_n = 64, double growth_cap = 1e6) {
    const double l = spec.growth == GrowthClass::Bounded
                         ? 0.0
                         : (spec.growth == GrowthClass::Linear ? 1.0 : spec.growth_power);
    Rng rng(9001);
    auto sup_ratio = [&](double radius) {
        double sup = 0.0;
        for (int i = 0; i < probe_n; ++i) {
            Vec x(spec.d);
            for (auto& c : x) c = radius * (2.0 * uniform01(rng) - 1.0);
            Vec b = spec.drift(0.37, x);
            const double ratio = norm2(b) / std::pow(1.0 + norm2(x), l);
            if (!std::isfinite(ratio)) return kInf;
            sup = std::max(sup, ratio);
            if (spec.sigma) {
                Matrix s = spec.sigma(0.37, x);
                Vec dir(spec.d);
                double dn = 0.0;
                do {
                    for (auto& c : dir) c = std_normal(rng);
                    dn = norm2(dir);
                } while (dn < 1e-8);
                Vec sd(spec.d, 0.0);
                for (int r = 0; r < spec.d; ++r)
                    for (int c = 0; c < spec.d; ++c) sd[r] += s(r, c) * dir[c] / dn;
                if (dot(sd, sd) < spec.ellipticity * (1.0 - 1e-9)) return kInf;
            }
        }
        return sup;
    };
    const double near = sup_ratio(probe_radius / 100.0);
    const double far = sup_ratio(probe_radius);
    if (!std::isfinite(far) || !std::isfinite(near) || far > growth_cap) return false;
    return far <= 4.0 * near + 1e-9;
}

// --- single-path simulation ---------------------------------------------------

namespace detail {

struct PathState {
    Vec x;
    bool diverged = false;
};

// One Euler step over dt from state x (in place). Draw order per step is
// fixed: dT, then d normals, then the perturbation increment.
inline void euler_step(const SdeSpec& spec, double time, double dt, Vec& x, Rng& rng,
                       bool& diverged) {
    const auto& hk = spec.noise.heat;
    const double dT = sample_increment(spec.noise.subordinator, dt, rng);
    const double rs = std::sqrt(dT);
    Vec g(spec.d);
    for (auto& c : g) c = rs * std_normal(rng);
    if (hk.anisotropic) g = mat_vec_lower(hk.chol, g);
    Vec dxi;
    if (spec.noise.perturbation) dxi = spec.noise.perturbation(dt, rng);
    if (diverged) return;  // keep consuming the stream so pairing is stable

    Vec b = spec.drift(time, x);
    if (spec.sigma) {
        Matrix s = spec.sigma(time, x);
        Vec sg(spec.d, 0.0);
        for (int r = 0; r < spec.d; ++r)
            for (int c = 0; c < spec.d; ++c) sg[r] += s(r, c) * g[c];
        g = sg;
    }
    for (int k = 0; k < spec.d; ++k) {
        x[k] += b[k] * dt + g[k];
        if (!dxi.empty()) x[k] += dxi[k];
    }
    for (double c : x)
        if (!std::isfinite(c)) {
            diverged = true;
            return;
        }
}

inline std::size_t step_count(double t, double h) {
    return static_cast<std::size_t>(std::ceil(t / h - 1e-12));
}

}  // namespace detail

// Terminal state of one path of dX = b dt + dZ. Diverged paths freeze at the
// last finite state and carry the flag.
inline detail::PathState euler_additive(const SdeSpec& spec, const Vec& x0, double t,
                                        double h, Rng& rng) {
    require(!spec.sigma, "euler_additive: spec has a diffusion; use euler_multiplicative");
    require(t > 0.0 && h > 0.0 && h <= t + 1e-12, "euler_additive: need 0 < h <= t");
    detail::PathState st{x0, false};
    const std::size_t m = detail::step_count(t, h);
    Vec prev = st.x;
    for (std::size_t i = 0; i < m; ++i) {
        const double time = static_cast<double>(i) * h;
        const double dt = i + 1 == m ? t - time : h;
        prev = st.x;
        bool dv = st.diverged;
        detail::euler_step(spec, time, dt, st.x, rng, dv);
        if (dv && !st.diverged) {
            st.x = prev;
            st.diverged = true;
        }
    }
    return st;
}

// dX = b dt + sigma(t, X) dY with Y = W o T (no perturbation by assumption).
inline detail::PathState euler_multiplicative(const SdeSpec& spec, const Vec& x0,
                                              double t, double h, Rng& rng) {
    require(static_cast<bool>(spec.sigma), "euler_multiplicative: sigma required");
    require(!spec.noise.perturbation,
            "euler_multiplicative: perturbation unsupported here");
    require(t > 0.0 && h > 0.0 && h <= t + 1e-12,
            "euler_multiplicative: need 0 < h <= t");
    detail::PathState st{x0, false};
    const std::size_t m = detail::step_count(t, h);
    Vec prev = st.x;
    for (std::size_t i = 0; i < m; ++i) {
        const double time = static_cast<double>(i) * h;
        const double dt = i + 1 == m ? t - time : h;
        prev = st.x;
        bool dv = st.diverged;
        detail::euler_step(spec, time, dt, st.x, rng, dv);
        if (dv && !st.diverged) {
            st.x = prev;
            st.diverged = true;
        }
    }
    return st;
}

inline detail::PathState simulate_path(const SdeSpec& spec, const Vec& x0, double t,
                                       double h, Rng& rng) {
    return spec.sigma ? euler_multiplicative(spec, x0, t, h, rng)
                      : euler_additive(spec, x0, t, h, rng);
}

// --- path batches -------------------------------------------------------------

struct PathBatch {
    int d = 1;
    std::size_t n = 0;
    double t = 0.0, h = 0.0;
    std::uint64_t seed = 0;
    Vec x0;
    Vec terminal;                        // row-major n x d, no NaN/Inf
    std::vector<std::uint8_t> diverged;  // per-path flag
    std::size_t diverged_count = 0;
};

inline PathBatch simulate_batch(const SdeSpec& spec, const Vec& x0, double t, double h,
                                std::size_t n, std::uint64_t seed, int threads = 0) {
    PathBatch batch;
    batch.d = spec.d;
    batch.n = n;
    batch.t = t;
    batch.h = h;
    batch.seed = seed;
    batch.x0 = x0;
    batch.terminal.assign(n * spec.d, 0.0);
    batch.diverged.assign(n, 0);
    auto counts = run_blocks<std::size_t>(
        seed, n, threads, [&](std::size_t, std::size_t first, std::size_t count, Rng& rng) {
            std::size_t dv = 0;
            for (std::size_t i = 0; i < count; ++i) {
                auto st = simulate_path(spec, x0, t, h, rng);
                std::copy(st.x.begin(), st.x.end(),
                          batch.terminal.begin() + (first + i) * spec.d);
                if (st.diverged) {
                    batch.diverged[first + i] = 1;
                    ++dv;
                }
            }
            return dv;
        });
    for (auto c : counts) batch.diverged_count += c;
    return batch;
}

inline std::string path_batch_csv(const PathBatch& b) {
    std::string out;
    for (int c = 0; c < b.d; ++c) {
        char h[16];
        std::snprintf(h, sizeof h, "x%d,", c);
        out += h;
    }
    out += "diverged\n";
    char buf[64];
    for (std::size_t i = 0; i < b.n; ++i) {
        for (int c = 0; c < b.d; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g,", b.terminal[i * b.d + c]);
            out += buf;
        }
        out += b.diverged[i] ? "1\n" : "0\n";
    }
    return out;
}

// binary column file: magic "LSMB", u64 d, u64 n, then d columns of n doubles
// (little-endian IEEE 754)
inline std::vector<std::uint8_t> path_batch_lsmb(const PathBatch& b) {
    std::vector<std::uint8_t> out;
    out.reserve(20 + 8 * b.n * b.d);
    const char magic[4] = {'L', 'S', 'M', 'B'};
    out.insert(out.end(), magic, magic + 4);
    auto put_u64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    put_u64(static_cast<std::uint64_t>(b.d));
    put_u64(b.n);
    for (int c = 0; c < b.d; ++c)
        for (std::size_t i = 0; i < b.n; ++i) {
            std::uint64_t bits;
            std::memcpy(&bits, &b.terminal[i * b.d + c], 8);
            put_u64(bits);
        }
    return out;
}

// --- Monte-Carlo semigroup ------------------------------------------------------

struct McSemigroupResult {
    McEstimate est;
    std::size_t diverged = 0;
    std::size_t n_total = 0;
};

// P_t^X f(x) = E f(X_t^x): sample mean over paths; diverged paths are
// excluded and reported, > 1% of them flags the estimate Unreliable.
inline McSemigroupResult mc_semigroup(const SdeSpec& spec, double t,
                                      const TestFunction& f, const Vec& x,
                                      std::size_t n, double h, std::uint64_t seed,
                                      int threads = 0) {
    require(f.dim == spec.d, "mc_semigroup: dimension mismatch");
    struct Part {
        MomentAccumulator acc;
        std::size_t dv = 0;
    };
    auto parts = run_blocks<Part>(
        seed, n, threads, [&](std::size_t, std::size_t, std::size_t count, Rng& rng) {
            Part p;
            for (std::size_t i = 0; i < count; ++i) {
                auto st = simulate_path(spec, x, t, h, rng);
                if (st.diverged)
                    ++p.dv;
                else
                    p.acc.add(f.eval(st.x));
            }
            return p;
        });
    McSemigroupResult out;
    MomentAccumulator total;
    for (const auto& p : parts) {
        total += p.acc;
        out.diverged += p.dv;
    }
    out.n_total = n;
    out.est = {total.mean(), total.stderr_(), total.n, EvalStatus::Ok};
    if (out.diverged > n / 100) out.est.status = EvalStatus::Unreliable;
    return out;
}

// --- strong-Feller continuity profile -------------------------------------------

struct ContinuityProfile {
    Vec offsets;   // strictly decreasing
    Vec diffs;     // |P f(x0 + off e) - P f(x0)| (paired estimate)
    Vec stderrs;   // standard error of the paired difference
    double spearman = kNaN;
    std::size_t n = 0;
    double t = 0.0, h = 0.0;
};

// Paired common-random-number differences: every offset replays exactly the
// noise stream of the centered path, so the difference estimator has no
// between-path variance.
inline ContinuityProfile strong_feller_profile(const SdeSpec& spec, double t,
                                               const TestFunction& f, const Vec& x0,
                                               const Vec& offsets, std::size_t n,
                                               double h, std::uint64_t seed,
                                               int threads = 0, int axis = 0) {
    require(!offsets.empty(), "strong_feller_profile: need offsets");
    for (std::size_t j = 1; j < offsets.size(); ++j)
        require(offsets[j] < offsets[j - 1],
                "strong_feller_profile: offsets must strictly decrease");
    require(axis >= 0 && axis < spec.d, "strong_feller_profile: bad axis");
    const std::size_t K = offsets.size();

    std::vector<Vec> starts(K, x0);
    for (std::size_t j = 0; j < K; ++j) starts[j][axis] += offsets[j];

    auto parts = run_blocks<std::vector<MomentAccumulator>>(
        seed, n, threads, [&](std::size_t, std::size_t, std::size_t count, Rng& rng) {
            std::vector<MomentAccumulator> acc(K);
            for (std::size_t i = 0; i < count; ++i) {
                const Rng saved = rng;  // replay the same noise for every start
                Rng r0 = saved;
                auto base = simulate_path(spec, x0, t, h, r0);
                for (std::size_t j = 0; j < K; ++j) {
                    Rng rj = saved;
                    auto off = simulate_path(spec, starts[j], t, h, rj);
                    if (!base.diverged && !off.diverged)
                        acc[j].add(f.eval(off.x) - f.eval(base.x));
                }
                rng = r0;  // advance the stream by exactly one path
            }
            return acc;
        });
    ContinuityProfile prof;
    prof.offsets = offsets;
    prof.n = n;
    prof.t = t;
    prof.h = h;
    std::vector<MomentAccumulator> total(K);
    for (const auto& p : parts)
        for (std::size_t j = 0; j < K; ++j) total[j] += p[j];
    for (std::size_t j = 0; j < K; ++j) {
        prof.diffs.push_back(std::fabs(total[j].mean()));
        prof.stderrs.push_back(total[j].stderr_());
    }

    // Spearman rank correlation of (offset, diff); ties broken by index
    auto ranks = [](const Vec& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        Vec r(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    Vec ro = ranks(prof.offsets), rd = ranks(prof.diffs);
    double s = 0.0;
    for (std::size_t j = 0; j < K; ++j) s += sqr(ro[j] - rd[j]);
    const double kk = static_cast<double>(K);
    prof.spearman = K > 1 ? 1.0 - 6.0 * s / (kk * (kk * kk - 1.0)) : kNaN;
    return prof;
}

inline std::string continuity_profile_csv(const ContinuityProfile& p) {
    std::string out = "offset,diff,stderr\n";
    char buf[128];
    for (std::size_t j = 0; j < p.offsets.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.offsets[j], p.diffs[j],
                      p.stderrs[j]);
        out += buf;
    }
    return out;
}

// --- Duhamel residual ------------------------------------------------------------

struct DuhamelControls {
    std::size_t n = 200000;  // paths per x for both sides
    int s_nodes = 32;        // graded s-quadrature points
    double h = 0.008;
    int z_nodes = 1200;      // density tabulation nodes (uniform part)
    double z_span = 12.0;
    // Kernel smoothing width: the correction integrand evaluates the density
    // of Y_s + smoothing * G instead of Y_s. For small s that density is an
    // integrable power spike no table or Monte-Carlo average resolves (the
    // sub-resolution mass is lost, biasing the whole s-integral); smoothing
    // bounds it at the price of an O(smoothing^2) bias that the refinement
    // ladder sends to zero.
    double smoothing = 0.02;
    std::uint64_t seed = 3;
    int threads = 0;
};

struct DuhamelReport {
    double sup_residual = kNaN;
    EvalStatus status = EvalStatus::Ok;
    Vec x, lhs, rhs, residual;
    double lhs_stderr_max = 0.0;
};

namespace detail {

// piecewise-linear table of w -> p_t^Y(w) on a node set that dodges the
// singular points (interval endpoints shifted into the table as clusters)
struct DensityTable {
    Vec z, v;
    double eval(double w) const {
        if (w <= z.front() || w >= z.back()) return 0.0;
        auto it = std::upper_bound(z.begin(), z.end(), w);
        const std::size_t i = static_cast<std::size_t>(it - z.begin());
        const double t = (w - z[i - 1]) / (z[i] - z[i - 1]);
        return v[i - 1] + t * (v[i] - v[i - 1]);
    }
};

// density of Y_s + kappa G at w (d = 1): bounded by 1/(kappa sqrt(2 pi))
inline ScalarResult smoothed_density_1d(const NoiseSpec& noise, double s,
                                        double kappa2, double w) {
    const double qscale = noise.heat.anisotropic ? noise.heat.q(0, 0) : 1.0;
    auto g = [&](double tt) {
        const double v = qscale * tt + kappa2;
        return std::exp(-0.5 * w * w / v) / std::sqrt(2.0 * kPi * v);
    };
    MixOptions mo;
    mo.abs_tol = 1e-12;
    return integrate_against_law(noise.subordinator, s, g, mo);
}

inline DensityTable tabulate_smoothed_density(const NoiseSpec& noise, double s,
                                              const DuhamelControls& ctl,
                                              bool& all_ok) {
    DensityTable tab;
    const double L = ctl.z_span;
    const double dz = 2.0 * L / ctl.z_nodes;
    for (int i = 0; i < ctl.z_nodes; ++i) tab.z.push_back(-L + (i + 0.5) * dz);
    // resolve the peak at the smoothing scale
    const double kappa = ctl.smoothing;
    for (double m : {0.125, 0.25, 0.375, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
        const double node = kappa * m;
        if (node < L) {
            tab.z.push_back(-node);
            tab.z.push_back(node);
        }
    }
    tab.z.push_back(0.0);
    std::sort(tab.z.begin(), tab.z.end());
    tab.z.erase(std::unique(tab.z.begin(), tab.z.end()), tab.z.end());
    tab.v.resize(tab.z.size());
    const double kappa2 = sqr(ctl.smoothing);
    for (std::size_t i = 0; i < tab.z.size(); ++i) {
        ScalarResult r = smoothed_density_1d(noise, s, kappa2, tab.z[i]);
        if (!r.ok()) all_ok = false;
        tab.v[i] = r.ok() ? r.value : 0.0;
    }
    return tab;
}

}  // namespace detail

// Residual of P_t^X f = P_t^Y f + int_0^t P_{t-s}^X <b, D P_s^Y f> ds on an
// x-grid (d = 1, compactly supported piecewise-constant f). The s-integral
// uses the graded mesh s_j = t((j-1/2)/J)^2 resolving the s^{-1/2}-type
// singularity at 0.
inline DuhamelReport duhamel_residual(const SdeSpec& spec, double t,
                                      const TestFunction& f, const Vec& x_grid,
                                      const DuhamelControls& ctl = {}) {
    require(spec.d == 1 && f.dim == 1, "duhamel_residual: d = 1 only");
    require(!spec.sigma, "duhamel_residual: additive SDE only");
    require(!spec.noise.perturbation, "duhamel_residual: perturbation unsupported");
    require(!f.intervals.empty(),
            "duhamel_residual: f must be piecewise constant with intervals");
    require(ctl.smoothing > 0.0, "duhamel_residual: need smoothing > 0");
    DuhamelReport rep;
    const auto& sub = spec.noise.subordinator;
    if (sub.kind == SubordinatorKind::Stable && sub.rho <= 0.5) {
        // E T_s^{-1/2} ~ s^{-1/(2 rho)} is not s-integrable at 0
        rep.status = EvalStatus::NotApplicable;
        return rep;
    }

    const int J = ctl.s_nodes;
    Vec s(J), w(J);
    for (int j = 0; j < J; ++j) {
        const double theta = (j + 0.5) / J;
        s[j] = t * theta * theta;
        w[j] = 2.0 * t * theta / J;
    }

    // density tables per s-node
    bool tab_ok = true;
    std::vector<detail::DensityTable> tables(J);
    for (int j = 0; j < J; ++j)
        tables[j] = detail::tabulate_smoothed_density(spec.noise, s[j], ctl, tab_ok);

    // D P_s^Y f(z) = sum_i coef_i (p_s^Y(z - lo_i) - p_s^Y(z - hi_i))
    auto dpf = [&](int j, double z) {
        double acc = 0.0;
        for (const auto& iv : f.intervals)
            acc += iv.coef * (tables[j].eval(z - iv.lo) - tables[j].eval(z - iv.hi));
        return acc;
    };

    // snapshot step indices for times t - s_j
    const std::size_t m = detail::step_count(t, ctl.h);
    std::vector<std::size_t> snap_step(J);
    for (int j = 0; j < J; ++j) {
        double tau = t - s[j];
        std::size_t k = static_cast<std::size_t>(std::llround(tau / ctl.h));
        snap_step[j] = std::min(k, m);
    }

    ApplyOptions ao;
    ao.seed = ctl.seed;
    for (double x0 : x_grid) {
        // left side
        auto lhs = mc_semigroup(spec, t, f, {x0}, ctl.n, ctl.h, ctl.seed, ctl.threads);
        rep.lhs_stderr_max = std::max(rep.lhs_stderr_max, lhs.est.stderr_);
        // P_t^Y f(x)
        McEstimate py = apply_subordinated(spec.noise, t, f, {x0},
                                           ApplyMode::QuadratureMixture, ao);
        if (py.status != EvalStatus::Ok && rep.status == EvalStatus::Ok)
            rep.status = py.status;
        // correction: one ensemble records states at every snapshot time
        auto parts = run_blocks<std::vector<MomentAccumulator>>(
            ctl.seed ^ 0xD0D0ULL, ctl.n, ctl.threads,
            [&](std::size_t, std::size_t, std::size_t count, Rng& rng) {
                std::vector<MomentAccumulator> acc(J);
                for (std::size_t i = 0; i < count; ++i) {
                    Vec x{x0};
                    bool dv = false;
                    std::size_t step = 0;
                    // snapshots with step index 0 evaluate at the start point
                    for (int j = J - 1; j >= 0; --j)
                        if (snap_step[j] == 0) acc[j].add(spec.drift(0.0, x)[0] * dpf(j, x[0]));
                    for (step = 0; step < m && !dv; ++step) {
                        const double time = static_cast<double>(step) * ctl.h;
                        const double dt = step + 1 == m ? t - time : ctl.h;
                        detail::euler_step(spec, time, dt, x, rng, dv);
                        if (dv) break;
                        for (int j = J - 1; j >= 0; --j)
                            if (snap_step[j] == step + 1)
                                acc[j].add(spec.drift(time + dt, x)[0] * dpf(j, x[0]));
                    }
                }
                return acc;
            });
        std::vector<MomentAccumulator> tot(J);
        for (const auto& p : parts)
            for (int j = 0; j < J; ++j) tot[j] += p[j];
        double correction = 0.0;
        for (int j = 0; j < J; ++j) correction += w[j] * tot[j].mean();

        const double rhs = py.value + correction;
        rep.x.push_back(x0);
        rep.lhs.push_back(lhs.est.value);
        rep.rhs.push_back(rhs);
        rep.residual.push_back(std::fabs(lhs.est.value - rhs));
    }
    if (!tab_ok && rep.status == EvalStatus::Ok) rep.status = EvalStatus::Inconclusive;
    rep.sup_residual = *std::max_element(rep.residual.begin(), rep.residual.end());
    return rep;
}

// --- empirical density and the local L_p criterion -------------------------------

struct DensityEstimate {
    Vec y, q;
    std::size_t n_used = 0;
    std::size_t diverged = 0;
};

// Gaussian-kernel density estimate of the terminal law (d = 1).
inline DensityEstimate empirical_density(const SdeSpec& spec, double t, const Vec& x,
                                         std::size_t n, double bandwidth,
                                         const Vec& y_grid, double h,
                                         std::uint64_t seed, int threads = 0) {
    require(spec.d == 1, "empirical_density: d = 1 only");
    require(n >= 10000, "empirical_density: need n >= 1e4");
    if (!(bandwidth > 0.0)) throw std::domain_error("empirical_density: bandwidth <= 0");
    struct Part {
        Vec sums;
        std::size_t used = 0, dv = 0;
    };
    auto parts = run_blocks<Part>(
        seed, n, threads, [&](std::size_t, std::size_t, std::size_t count, Rng& rng) {
            Part p;
            p.sums.assign(y_grid.size(), 0.0);
            for (std::size_t i = 0; i < count; ++i) {
                auto st = simulate_path(spec, x, t, h, rng);
                if (st.diverged) {
                    ++p.dv;
                    continue;
                }
                ++p.used;
                for (std::size_t g = 0; g < y_grid.size(); ++g) {
                    const double u = (y_grid[g] - st.x[0]) / bandwidth;
                    if (std::fabs(u) < 39.0)
                        p.sums[g] += std::exp(-0.5 * u * u);
                }
            }
            return p;
        });
    DensityEstimate est;
    est.y = y_grid;
    est.q.assign(y_grid.size(), 0.0);
    for (const auto& p : parts) {
        est.n_used += p.used;
        est.diverged += p.dv;
        for (std::size_t g = 0; g < y_grid.size(); ++g) est.q[g] += p.sums[g];
    }
    const double norm =
        1.0 / (static_cast<double>(est.n_used) * bandwidth * std::sqrt(2.0 * kPi));
    for (auto& v : est.q) v *= norm;
    return est;
}

struct LocalLpOptions {
    int y_nodes = 201;
    double h = 0.004;
    std::uint64_t seed = 5;
    int threads = 0;
    int centers = 5;
};

struct LocalLpReport {
    double sup_integral = kNaN;   // at n
    double sup_doubled = kNaN;    // at 2n
    double ratio = kNaN;
    EvalStatus status = EvalStatus::Ok;
    Vec center_values;            // per center, at n
};

// sup over x in the gamma-ball around x0 of int_{|y|<=M} qhat_t(x,y)^p dy,
// with a doubling-n stability check.
inline LocalLpReport local_lp_criterion(const SdeSpec& spec, double t, const Vec& x0,
                                        double gamma, double big_m, double p,
                                        std::size_t n, double bandwidth,
                                        const LocalLpOptions& opt = {}) {
    require(p > 1.0, "local_lp_criterion: need p > 1");
    require(gamma > 0.0 && big_m > 0.0, "local_lp_criterion: need gamma, M > 0");
    require(spec.d == 1, "local_lp_criterion: d = 1 only");
    Vec y_grid(opt.y_nodes);
    for (int i = 0; i < opt.y_nodes; ++i)
        y_grid[i] = -big_m + 2.0 * big_m * i / (opt.y_nodes - 1);
    const double dy = y_grid[1] - y_grid[0];

    auto sup_for = [&](std::size_t paths, std::uint64_t seed) {
        double sup = 0.0;
        Vec per_center;
        for (int c = 0; c < opt.centers; ++c) {
            Vec x = x0;
            x[0] += gamma * (opt.centers == 1
                                 ? 0.0
                                 : -1.0 + 2.0 * c / (opt.centers - 1.0));
            auto est = empirical_density(spec, t, x, paths, bandwidth, y_grid, opt.h,
                                         seed, opt.threads);
            double acc = 0.0;
            for (std::size_t g = 0; g < est.q.size(); ++g) {
                const double wt = (g == 0 || g + 1 == est.q.size()) ? 0.5 : 1.0;
                acc += wt * std::pow(est.q[g], p);
            }
            per_center.push_back(acc * dy);
            sup = std::max(sup, per_center.back());
        }
        return std::pair{sup, per_center};
    };

    LocalLpReport rep;
    auto [s1, centers] = sup_for(n, opt.seed);
    auto [s2, centers2] = sup_for(2 * n, opt.seed ^ 0xBEEFULL);
    (void)centers2;
    rep.sup_integral = s1;
    rep.sup_doubled = s2;
    rep.center_values = centers;
    rep.ratio = s2 / s1;
    if (!(rep.ratio >= 0.8 && rep.ratio <= 1.25)) rep.status = EvalStatus::Inconclusive;
    return rep;
}

}  // namespace levysmooth
