#include <algorithm>

#include "catch_amalgamated.hpp"

#include "levysmooth/semigroup.hpp"
#include "levysmooth/spectral.hpp"

using namespace levysmooth;
using Catch::Approx;

TEST_CASE("characteristic exponents") {
    const CharExponent vg = CharExponent::variance_gamma(1.0, 1.0);
    REQUIRE(vg.at_radius(0.7) == Approx(std::log(1.49)).epsilon(1e-14));
    REQUIRE(vg({0.0, 0.7}) == Approx(vg.at_radius(0.7)));  // radial

    REQUIRE(CharExponent::stable(1.5).at_radius(4.0) == Approx(8.0));
    REQUIRE(CharExponent::gaussian().at_radius(3.0) == Approx(4.5));
    REQUIRE(CharExponent::zero().at_radius(100.0) == 0.0);
    REQUIRE_THROWS_AS(CharExponent::variance_gamma(0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(CharExponent::stable(2.5), std::invalid_argument);
}

TEST_CASE("exponent from noise uses the sampling convention") {
    const NoiseSpec vg =
        make_noise(HeatKernelSpec::isotropic(1), SubordinatorSpec::gamma(1, 1));
    const CharExponent psi = char_exponent_from_noise(vg);
    REQUIRE(psi.at_radius(1.2) == Approx(std::log1p(0.72)).epsilon(1e-14));

    const NoiseSpec pert = with_fbm_perturbation(
        make_noise(HeatKernelSpec::isotropic(1), SubordinatorSpec::gamma(1, 1)), 0.5);
    REQUIRE_THROWS_AS(char_exponent_from_noise(pert), std::invalid_argument);
}

TEST_CASE("hartman-wintner ratio limit for variance gamma") {
    // ratio = a log(1+r^2/b)/log(1+r) -> 2a; extrapolated limit nails it
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 0.5}}) {
        const HwRatioReport rep =
            hw_ratio(CharExponent::variance_gamma(a, b), default_hw_radii());
        REQUIRE(rep.classification == HwClass::FiniteLimit);
        REQUIRE(rep.limit == Approx(2.0 * a).epsilon(1e-6));
        REQUIRE(rep.ratios.size() == rep.radii.size());
    }
}

TEST_CASE("hartman-wintner classification") {
    REQUIRE(hw_ratio(CharExponent::stable(1.5), default_hw_radii()).classification ==
            HwClass::DivergesToInfinity);
    REQUIRE(hw_ratio(CharExponent::gaussian(), default_hw_radii()).classification ==
            HwClass::DivergesToInfinity);
    const HwRatioReport z = hw_ratio(CharExponent::zero(), default_hw_radii());
    REQUIRE(z.classification == HwClass::FiniteLimit);
    REQUIRE(z.limit == 0.0);

    REQUIRE_THROWS_AS(hw_ratio(CharExponent::gaussian(), {1.0, 2.0, 3.0}),
                      std::invalid_argument);  // too few radii
    REQUIRE_THROWS_AS(hw_ratio(CharExponent::gaussian(), {1.0, 2.0, 3.0, 4.0}),
                      std::invalid_argument);  // max radius too small
}

TEST_CASE("threshold time") {
    const ThresholdTime vg = hw_threshold_time(CharExponent::variance_gamma(1, 1), 1);
    REQUIRE(vg.kind == ThresholdKind::Finite);
    REQUIRE(vg.t0 == Approx(0.5).epsilon(1e-9));  // d/(2a)

    const ThresholdTime vg2 = hw_threshold_time(CharExponent::variance_gamma(2, 0.5), 3);
    REQUIRE(vg2.t0 == Approx(0.75).epsilon(1e-9));

    REQUIRE(hw_threshold_time(CharExponent::stable(1.5), 1).kind == ThresholdKind::Zero);
    REQUIRE(hw_threshold_time(CharExponent::zero(), 1).kind == ThresholdKind::NoThreshold);
}

TEST_CASE("fourier inversion matches the mixture density") {
    const NoiseSpec vg =
        make_noise(HeatKernelSpec::isotropic(1), SubordinatorSpec::gamma(1, 1));
    const CharExponent psi = char_exponent_from_noise(vg);
    for (double y : {0.0, 0.3, -1.7}) {
        const ScalarResult f = fourier_density(psi, 2.0, {y}, 1);
        const ScalarResult m = subordinated_density(vg, 2.0, {y});
        REQUIRE(f.status == EvalStatus::Ok);
        REQUIRE(f.value == Approx(m.value).margin(1e-8));
    }
    // reference value at y = 0.3 (independent quadrature)
    REQUIRE(fourier_density(psi, 2.0, {0.3}, 1).value ==
            Approx(0.32945035560169565).epsilon(1e-8));
}

TEST_CASE("fourier inversion flags non-integrable exponents") {
    const NoiseSpec vg =
        make_noise(HeatKernelSpec::isotropic(1), SubordinatorSpec::gamma(1, 1));
    const CharExponent psi = char_exponent_from_noise(vg);
    // e^{-t psi} ~ r^{-2t}: not integrable in d = 1 for t <= 1/2
    REQUIRE(fourier_density(psi, 0.4, {0.0}, 1).status == EvalStatus::Divergent);
    REQUIRE(fourier_density(psi, 1.0, {0.0}, 1).status == EvalStatus::Ok);

    REQUIRE_THROWS_AS(fourier_density(psi, 1.0, {0.0, 0.0, 0.0}, 3),
                      std::invalid_argument);
}

TEST_CASE("gaussian fourier inversion in two dimensions") {
    // psi = |xi|^2/2 gives the unit heat kernel back
    const ScalarResult r = fourier_density(CharExponent::gaussian(), 0.8, {0.6, -0.4}, 2);
    REQUIRE(r.status == EvalStatus::Ok);
    REQUIRE(r.value ==
            Approx(heat_kernel(HeatKernelSpec::isotropic(2), 0.8, {0.6, -0.4}))
                .epsilon(1e-8));
}

TEST_CASE("hw csv export") {
    const HwRatioReport rep =
        hw_ratio(CharExponent::variance_gamma(1, 1), default_hw_radii());
    const std::string csv = hw_ratio_csv(rep);
    REQUIRE(csv.rfind("radius,psi,ratio\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') ==
            static_cast<long>(rep.radii.size()) + 1);
}
