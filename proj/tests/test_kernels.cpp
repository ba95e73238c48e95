#include "catch_amalgamated.hpp"

#include "levysmooth/kernels.hpp"
#include "levysmooth/rng.hpp"

using namespace levysmooth;
using Catch::Approx;

TEST_CASE("probabilists hermite polynomials") {
    REQUIRE(hermite_eval(0, 0.9) == 1.0);
    REQUIRE(hermite_eval(1, 0.9) == Approx(0.9));
    REQUIRE(hermite_eval(2, 0.9) == Approx(0.9 * 0.9 - 1.0));
    REQUIRE(hermite_eval(3, 1.7) == Approx(-0.187).epsilon(1e-12));       // y^3 - 3y
    REQUIRE(hermite_eval(5, 0.9) == Approx(6.80049).epsilon(1e-12));      // y^5-10y^3+15y
    // recurrence consistency: H_{n+1} = y H_n - n H_{n-1}
    const double y = -1.3;
    for (int n = 1; n < 10; ++n)
        REQUIRE(hermite_eval(n + 1, y) ==
                Approx(y * hermite_eval(n, y) - n * hermite_eval(n - 1, y)));
}

TEST_CASE("multi index validation") {
    REQUIRE(MultiIndex({1, 2, 0}).order() == 3);
    REQUIRE(MultiIndex({1, 2, 0}).dim() == 3);
    REQUIRE_THROWS_AS(MultiIndex({1, -1}), std::invalid_argument);
    REQUIRE_THROWS_AS(MultiIndex(std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("isotropic heat kernel values") {
    REQUIRE(heat_kernel(HeatKernelSpec::isotropic(1), 2.0, {0.7}) ==
            Approx(0.24957092803615243).epsilon(1e-14));
    REQUIRE(heat_kernel(HeatKernelSpec::isotropic(3), 0.6, {0.3, -0.2, 0.5}) ==
            Approx(0.099535209744806425).epsilon(1e-14));
    REQUIRE_THROWS_AS(heat_kernel(HeatKernelSpec::isotropic(1), 0.0, {0.1}),
                      std::domain_error);
}

TEST_CASE("anisotropic heat kernel is the N(0,tQ) density") {
    Matrix q(2);
    q(0, 0) = 2.0;
    q(0, 1) = q(1, 0) = 0.5;
    q(1, 1) = 1.0;
    const HeatKernelSpec hk = HeatKernelSpec::with_covariance(q);
    REQUIRE(heat_kernel(hk, 0.8, {0.6, -0.4}) ==
            Approx(0.10827155195601551).epsilon(1e-12));

    Matrix bad(2);  // not positive definite
    bad(0, 0) = 1.0;
    bad(0, 1) = bad(1, 0) = 2.0;
    bad(1, 1) = 1.0;
    REQUIRE_THROWS_AS(HeatKernelSpec::with_covariance(bad), std::invalid_argument);
}

TEST_CASE("mixed partial closed form") {
    const HeatKernelSpec hk = HeatKernelSpec::isotropic(2);
    REQUIRE(heat_kernel_partial(hk, 0.7, {0.4, -0.3}, MultiIndex({1, 2})) ==
            Approx(0.13528984894231738).epsilon(1e-12));
    // alpha = 0 is the kernel itself
    REQUIRE(heat_kernel_partial(hk, 0.7, {0.4, -0.3}, MultiIndex({0, 0})) ==
            Approx(heat_kernel(hk, 0.7, {0.4, -0.3})));
}

namespace {

// Richardson-extrapolated central difference along one axis
double fd_axis(const Vec& x, int axis, const std::function<double(const Vec&)>& g) {
    const double h = 1e-3;
    auto at = [&](double dx) {
        Vec y = x;
        y[axis] += dx;
        return g(y);
    };
    const double d1 = (at(h) - at(-h)) / (2 * h);
    const double d2 = (at(2 * h) - at(-2 * h)) / (4 * h);
    return (4 * d1 - d2) / 3;
}

}  // namespace

TEST_CASE("partials agree with finite differences") {
    Rng rng(1234);
    std::uniform_real_distribution<double> ud(-1.5, 1.5);
    std::uniform_real_distribution<double> ut(0.4, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const double t = ut(rng);
        Vec x(d);
        for (auto& c : x) c = ud(rng);
        std::vector<int> a(d, 0);
        a[rng() % d] += 1;
        a[rng() % d] += 1;  // |alpha| = 2
        const MultiIndex alpha{a};
        const HeatKernelSpec hk = HeatKernelSpec::isotropic(d);

        // peel one derivative off the first non-zero entry, differentiate the rest
        int axis = 0;
        while (a[axis] == 0) ++axis;
        std::vector<int> rest = a;
        rest[axis] -= 1;
        const MultiIndex beta{rest};
        const double fd = fd_axis(x, axis, [&](const Vec& y) {
            return heat_kernel_partial(hk, t, y, beta);
        });
        const double exact = heat_kernel_partial(hk, t, x, alpha);
        REQUIRE(exact == Approx(fd).margin(1e-7).epsilon(1e-6));
    }
}

TEST_CASE("frechet derivative matches directional partials") {
    const HeatKernelSpec hk = HeatKernelSpec::isotropic(2);
    // oracle: D^2 p_t(x)(h1,h2) = p_t(x) ((x.h1)(x.h2)/t^2 - (h1.h2)/t)
    const double s2 = std::sqrt(0.5);
    REQUIRE(frechet_derivative(hk, 0.9, {0.5, 0.2}, 2, {{s2, s2}, {s2, -s2}}) ==
            Approx(0.019512469438941452).epsilon(1e-12));
    // n = 1 along e_0 equals the alpha = (1,0) partial
    REQUIRE(frechet_derivative(hk, 0.9, {0.5, 0.2}, 1, {{1.0, 0.0}}) ==
            Approx(heat_kernel_partial(hk, 0.9, {0.5, 0.2}, MultiIndex({1, 0}))));
}

TEST_CASE("operator norm and envelope") {
    const HeatKernelSpec hk = HeatKernelSpec::isotropic(2);
    const Vec x = {0.8, -0.6};
    const double t = 0.7;

    // k = 1: |grad p| = |x|/t p_t(x)
    const double g1 = frechet_operator_norm(hk, t, x, 1);
    REQUIRE(g1 == Approx(norm2(x) / t * heat_kernel(hk, t, x)).epsilon(1e-12));

    // k = 2 exact spectral norm dominates any directional value
    const double g2 = frechet_operator_norm(hk, t, x, 2);
    const double s2 = std::sqrt(0.5);
    REQUIRE(g2 >= std::fabs(frechet_derivative(hk, t, x, 2, {{s2, s2}, {s2, -s2}})));
    REQUIRE(g2 >= std::fabs(frechet_derivative(hk, t, x, 2, {{1.0, 0.0}, {1.0, 0.0}})));

    // k = 3 sampled lower bound stays below the envelope
    const double g3 = frechet_operator_norm(hk, t, x, 3);
    REQUIRE(g3 <= frechet_norm_bound(hk, t, x, 3) * (1.0 + 1e-9));
    REQUIRE(g1 <= frechet_norm_bound(hk, t, x, 1) * (1.0 + 1e-9));
    REQUIRE(g2 <= frechet_norm_bound(hk, t, x, 2) * (1.0 + 1e-9));
}

TEST_CASE("hermite tensor apply reduces to the scalar polynomial") {
    // d = 1: Htilde_n(x)(h,...,h) with h = 1 equals H_n(x)
    for (int n = 1; n <= 4; ++n) {
        std::vector<Vec> h(n, Vec{1.0});
        REQUIRE(hermite_tensor_apply(n, {0.83}, h) ==
                Approx(hermite_eval(n, 0.83)).epsilon(1e-12));
    }
}
