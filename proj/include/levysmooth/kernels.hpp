#pragma once

// Gaussian heat kernels (isotropic and anisotropic), Hermite polynomials,
// exact mixed partials, and the n-linear Hermite partition tensor behind the
// Frechet derivative formula
//     D^n p_t(x) = (-1)^n t^{-n/2} p_t(x) Htilde_n(t^{-1/2} x).

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace levysmooth {

struct MultiIndex {
    std::vector<int> entries;

    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> e) : entries(e) { validate(); }
    explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) { validate(); }

    void validate() const {
        require(!entries.empty(), "multi-index: need d >= 1");
        for (int k : entries) require(k >= 0, "multi-index: entries must be >= 0");
    }
    int order() const {
        int s = 0;
        for (int k : entries) s += k;
        return s;
    }
    int dim() const { return static_cast<int>(entries.size()); }
};

// Probabilists' Hermite polynomial H_n(y) via the three-term recurrence.
inline double hermite_eval(int n, double y) {
    require(n >= 0, "hermite_eval: need n >= 0");
    if (n == 0) return 1.0;
    double hm = 1.0, h = y;
    for (int k = 1; k < n; ++k) {
        const double next = y * h - static_cast<double>(k) * hm;
        hm = h;
        h = next;
    }
    return h;
}

struct HeatKernelSpec {
    int d = 1;
    bool anisotropic = false;
    Matrix q;       // covariance (only stored when anisotropic)
    Matrix chol;    // Cholesky factor of q
    double det_q = 1.0;

    static HeatKernelSpec isotropic(int d) {
        require(d >= 1, "heat kernel: need d >= 1");
        HeatKernelSpec s;
        s.d = d;
        return s;
    }
    static HeatKernelSpec with_covariance(Matrix q_in) {
        require(q_in.d >= 1, "heat kernel: need d >= 1");
        for (int i = 0; i < q_in.d; ++i)
            for (int j = 0; j < i; ++j)
                require(std::fabs(q_in(i, j) - q_in(j, i)) <= 1e-12 *
                            (1.0 + std::fabs(q_in(i, j))),
                        "heat kernel: Q must be symmetric");
        HeatKernelSpec s;
        s.d = q_in.d;
        s.anisotropic = true;
        s.chol = cholesky(q_in);  // throws when not SPD
        s.det_q = 1.0;
        for (int i = 0; i < q_in.d; ++i) s.det_q *= sqr(s.chol(i, i));
        s.q = std::move(q_in);
        return s;
    }

    // <u, v>_Q = <Q^{-1} u, v>; plain dot product in the isotropic case.
    double q_inner(const Vec& u, const Vec& v) const {
        if (!anisotropic) return dot(u, v);
        return dot(solve_lower_transposed(chol, solve_lower(chol, u)), v);
    }
};

inline double heat_kernel(const HeatKernelSpec& spec, double t, const Vec& x) {
    if (!(t > 0.0)) throw std::domain_error("heat_kernel: need t > 0");
    require(static_cast<int>(x.size()) == spec.d, "heat_kernel: dimension mismatch");
    double quad;  // x^T Q^{-1} x
    if (spec.anisotropic) {
        const Vec z = solve_lower(spec.chol, x);
        quad = dot(z, z);
    } else {
        quad = dot(x, x);
    }
    return std::exp(-0.5 * quad / t) /
           (std::pow(2.0 * kPi * t, 0.5 * spec.d) * std::sqrt(spec.det_q));
}

// d^alpha p_t(x) = t^{-|alpha|/2} (-1)^{|alpha|} prod_k H_{alpha_k}(x_k/sqrt t) p_t(x).
inline double heat_kernel_partial(const HeatKernelSpec& spec, double t, const Vec& x,
                                  const MultiIndex& alpha) {
    if (!(t > 0.0)) throw std::domain_error("heat_kernel_partial: need t > 0");
    require(alpha.dim() == spec.d, "heat_kernel_partial: dimension mismatch");
    if (spec.anisotropic)
        throw std::domain_error("heat_kernel_partial: unsupported for anisotropic Q");
    const int n = alpha.order();
    const double rt = std::sqrt(t);
    double herm = 1.0;
    for (int k = 0; k < spec.d; ++k) herm *= hermite_eval(alpha.entries[k], x[k] / rt);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(t, -0.5 * n) * herm * heat_kernel(spec, t, x);
}

// --- Hermite partition tensor ----------------------------------------------

namespace detail {

struct PairPartition {
    std::vector<int> singles;
    std::vector<std::pair<int, int>> pairs;
};

inline void enumerate_partitions(std::vector<int>& left, int singles_left,
                                 PairPartition& cur, std::vector<PairPartition>& out) {
    if (left.empty()) {
        out.push_back(cur);
        return;
    }
    const int first = left.front();
    std::vector<int> rest(left.begin() + 1, left.end());
    if (singles_left > 0) {
        cur.singles.push_back(first);
        enumerate_partitions(rest, singles_left - 1, cur, out);
        cur.singles.pop_back();
    }
    for (std::size_t j = 0; j < rest.size(); ++j) {
        std::vector<int> rem;
        rem.reserve(rest.size() - 1);
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (i != j) rem.push_back(rest[i]);
        cur.pairs.emplace_back(first, rest[j]);
        enumerate_partitions(rem, singles_left, cur, out);
        cur.pairs.pop_back();
    }
}

// All unordered partitions of {0..n-1} into m singletons and (n-m)/2 pairs.
inline const std::vector<PairPartition>& partitions(int n, int m) {
    static std::map<std::pair<int, int>, std::vector<PairPartition>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<PairPartition> out;
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    PairPartition cur;
    // enumerate with exactly m singletons: generate with unlimited singles and filter
    std::vector<PairPartition> raw;
    enumerate_partitions(all, n, cur, raw);
    for (auto& p : raw)
        if (static_cast<int>(p.singles.size()) == m) out.push_back(std::move(p));
    return cache.emplace(key, std::move(out)).first->second;
}

// Signed partition sum with caller-supplied inner products:
// sx(i) = <x, h_i>, shh(i,j) = <h_i, h_j>.
template <class Sx, class Shh>
double tensor_apply_generic(int n, const Sx& sx, const Shh& shh) {
    if (n == 0) return 1.0;
    double total = 0.0;
    for (int m = n; m >= 0; m -= 2) {
        const double sign = (((n - m) / 2) % 2 == 0) ? 1.0 : -1.0;
        double sum = 0.0;
        for (const auto& part : partitions(n, m)) {
            double term = 1.0;
            for (int i : part.singles) term *= sx(i);
            for (const auto& pr : part.pairs) term *= shh(pr.first, pr.second);
            sum += term;
        }
        total += sign * sum;
    }
    return total;
}

}  // namespace detail

// Htilde_n(x)(h_1,...,h_n) with Euclidean inner products.
inline double hermite_tensor_apply(int n, const Vec& x, const std::vector<Vec>& h) {
    require(static_cast<int>(h.size()) == n, "hermite_tensor_apply: need n vectors");
    for (const auto& hi : h)
        require(hi.size() == x.size(), "hermite_tensor_apply: dimension mismatch");
    return detail::tensor_apply_generic(
        n, [&](int i) { return dot(x, h[i]); },
        [&](int i, int j) { return dot(h[i], h[j]); });
}

// D^n p_t(x)(h_1,...,h_n); Q != I handled through the Q-inner products.
inline double frechet_derivative(const HeatKernelSpec& spec, double t, const Vec& x,
                                 int n, const std::vector<Vec>& h) {
    if (!(t > 0.0)) throw std::domain_error("frechet_derivative: need t > 0");
    require(static_cast<int>(h.size()) == n, "frechet_derivative: need n vectors");
    const double rt = std::sqrt(t);
    // inner products against z = x / sqrt(t)
    std::vector<double> sx(n);
    std::vector<double> qh;  // flattened <h_i, h_j>_Q
    std::vector<Vec> qinv_h(n);
    for (int i = 0; i < n; ++i) {
        if (spec.anisotropic)
            qinv_h[i] = solve_lower_transposed(spec.chol, solve_lower(spec.chol, h[i]));
        else
            qinv_h[i] = h[i];
        sx[i] = dot(x, qinv_h[i]) / rt;
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double val = detail::tensor_apply_generic(
        n, [&](int i) { return sx[i]; },
        [&](int i, int j) { return dot(h[i], qinv_h[j]); });
    return sign * std::pow(t, -0.5 * n) * heat_kernel(spec, t, x) * val;
}

// Envelope (t^{-k} |x|^k + t^{-k/2}) p_t(x).
inline double frechet_norm_bound(const HeatKernelSpec& spec, double t, const Vec& x,
                                 int k) {
    if (!(t > 0.0)) throw std::domain_error("frechet_norm_bound: need t > 0");
    require(k >= 1, "frechet_norm_bound: need k >= 1");
    const double r = norm2(x);
    return (std::pow(t, -k) * std::pow(r, k) + std::pow(t, -0.5 * k)) *
           heat_kernel(spec, t, x);
}

// Operator norm of D^k p_t(x): exact for k = 1, 2 (isotropic), sampled lower
// bound over random unit tuples otherwise.
inline double frechet_operator_norm(const HeatKernelSpec& spec, double t, const Vec& x,
                                    int k, std::uint64_t seed = 42,
                                    int samples = 1000) {
    require(k >= 1, "frechet_operator_norm: need k >= 1");
    const int d = spec.d;
    if (!spec.anisotropic && k == 1) {
        return norm2(x) / t * heat_kernel(spec, t, x);
    }
    if (!spec.anisotropic && k == 2) {
        Matrix hess(d);
        std::vector<Vec> basis(d, Vec(d, 0.0));
        for (int i = 0; i < d; ++i) basis[i][i] = 1.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                hess(i, j) = frechet_derivative(spec, t, x, 2, {basis[i], basis[j]});
        const Vec ev = jacobi_eigenvalues(hess);
        return std::max(std::fabs(ev.front()), std::fabs(ev.back()));
    }
    Rng rng = substream(seed, 0);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        std::vector<Vec> h(k, Vec(d));
        for (auto& hi : h) {
            double nn = 0.0;
            for (double& c : hi) {
                c = std_normal(rng);
                nn += c * c;
            }
            nn = std::sqrt(nn);
            for (double& c : hi) c /= nn;
        }
        best = std::max(best, std::fabs(frechet_derivative(spec, t, x, k, h)));
    }
    return best;
}

}  // namespace levysmooth
