#include "catch_amalgamated.hpp"

#include "levysmooth/subordinators.hpp"

using namespace levysmooth;
using Catch::Approx;

TEST_CASE("laplace exponents") {
    REQUIRE(laplace_exponent(SubordinatorSpec::stable(0.5), 4.0) == Approx(2.0));
    REQUIRE(laplace_exponent(SubordinatorSpec::gamma(2.0, 3.0), 3.0) ==
            Approx(2.0 * std::log(2.0)));
    REQUIRE(laplace_exponent(SubordinatorSpec::drift_only(2.5), 1.2) == Approx(3.0));
    REQUIRE(laplace_exponent(SubordinatorSpec::stable(0.7), 0.0) == 0.0);
}

TEST_CASE("spec validation") {
    REQUIRE_THROWS_AS(SubordinatorSpec::stable(1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(SubordinatorSpec::stable(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(SubordinatorSpec::gamma(0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(SubordinatorSpec::drift_only(-1.0), std::invalid_argument);
    REQUIRE(SubordinatorSpec::gamma(1.0, 1.0).label() == "gamma;a=1;b=1");
}

// closed-form references:
//   gamma:  E T_t^-p = b^p Gamma(at-p)/Gamma(at)
//   stable: E T_t^-p = t^{-p/rho} Gamma(p/rho)/(rho Gamma(p))
//   drift:  (c t)^-p
TEST_CASE("negative moment closed forms") {
    auto g11 = negative_moment(SubordinatorSpec::gamma(1, 1),
                               {1.0, 0.5, MomentMethod::ClosedForm});
    REQUIRE(g11.status == EvalStatus::Ok);
    REQUIRE(g11.value == Approx(1.772453850905516).epsilon(1e-12));  // sqrt(pi)

    auto g23 = negative_moment(SubordinatorSpec::gamma(2, 3),
                               {0.8, 0.7, MomentMethod::ClosedForm});
    REQUIRE(g23.value == Approx(2.5805346534898537).epsilon(1e-12));

    auto st = negative_moment(SubordinatorSpec::stable(0.6),
                              {1.3, 0.4, MomentMethod::ClosedForm});
    REQUIRE(st.value == Approx(0.85418162818484547).epsilon(1e-12));

    auto dr = negative_moment(SubordinatorSpec::drift_only(2.5),
                              {0.7, 0.3, MomentMethod::ClosedForm});
    REQUIRE(dr.value == Approx(0.8454512788430708).epsilon(1e-12));
}

TEST_CASE("negative moment quadrature matches closed forms") {
    const SubordinatorSpec specs[] = {SubordinatorSpec::gamma(1, 1),
                                      SubordinatorSpec::gamma(2, 3),
                                      SubordinatorSpec::stable(0.6),
                                      SubordinatorSpec::drift_only(2.5)};
    const double ts[] = {1.0, 0.8, 1.3, 0.7};
    const double ps[] = {0.5, 0.7, 0.4, 0.3};
    for (int i = 0; i < 4; ++i) {
        auto q = negative_moment(specs[i], {ts[i], ps[i], MomentMethod::Quadrature});
        auto c = negative_moment(specs[i], {ts[i], ps[i], MomentMethod::ClosedForm});
        REQUIRE(q.status == EvalStatus::Ok);
        REQUIRE(q.value == Approx(c.value).epsilon(1e-8));
    }
}

TEST_CASE("negative moment finiteness boundary") {
    const SubordinatorSpec g = SubordinatorSpec::gamma(1, 1);
    REQUIRE_FALSE(negative_moment_is_finite(g, 0.5, 0.5));  // at = p
    REQUIRE_FALSE(negative_moment_is_finite(g, 0.3, 0.5));
    REQUIRE(negative_moment_is_finite(g, 0.6, 0.5));
    REQUIRE(negative_moment_is_finite(SubordinatorSpec::stable(0.3), 0.1, 3.0));
    REQUIRE(negative_moment_is_finite(SubordinatorSpec::drift_only(1.0), 0.1, 3.0));

    auto div = negative_moment(g, {0.5, 0.5, MomentMethod::Quadrature});
    REQUIRE(div.status == EvalStatus::Divergent);
    REQUIRE(std::isinf(div.value));
    auto div2 = negative_moment(g, {0.5, 0.5, MomentMethod::ClosedForm});
    REQUIRE(div2.status == EvalStatus::Divergent);
}

TEST_CASE("negative moment monte carlo") {
    auto g = negative_moment(SubordinatorSpec::gamma(1, 1),
                             {1.0, 0.5, MomentMethod::MonteCarlo}, 200000, 11);
    REQUIRE(g.status == EvalStatus::Ok);
    REQUIRE(g.stderr_ > 0.0);
    REQUIRE(std::fabs(g.value - 1.772453850905516) < 4.0 * g.stderr_);

    auto st = negative_moment(SubordinatorSpec::stable(0.6),
                              {1.3, 0.4, MomentMethod::MonteCarlo}, 200000, 11);
    REQUIRE(std::fabs(st.value - 0.85418162818484547) < 4.0 * st.stderr_);

    // same seed, same value; other seed, other value
    auto g2 = negative_moment(SubordinatorSpec::gamma(1, 1),
                              {1.0, 0.5, MomentMethod::MonteCarlo}, 200000, 11);
    REQUIRE(g2.value == g.value);
    auto g3 = negative_moment(SubordinatorSpec::gamma(1, 1),
                              {1.0, 0.5, MomentMethod::MonteCarlo}, 200000, 12);
    REQUIRE(g3.value != g.value);
}

TEST_CASE("fractional moment closed forms") {
    // positive exponent: gamma E T^r = b^-r Gamma(at+r)/Gamma(at); t=1,a=1,b=1,r=1 -> 1
    REQUIRE(fractional_moment(SubordinatorSpec::gamma(1, 1), 1.0, 1.0).value ==
            Approx(1.0));
    REQUIRE(fractional_moment(SubordinatorSpec::gamma(1, 1), 1.0, -0.25).value ==
            Approx(1.2254167024651776).epsilon(1e-12));  // Gamma(3/4)
    REQUIRE(fractional_moment(SubordinatorSpec::stable(0.6), 1.0, 0.6).status ==
            EvalStatus::Divergent);  // r >= rho
    REQUIRE(fractional_moment(SubordinatorSpec::drift_only(2.0), 0.5, 2.0).value ==
            Approx(1.0));
    REQUIRE(fractional_moment(SubordinatorSpec::gamma(1, 1), 0.25, -0.25).status ==
            EvalStatus::Divergent);
}

// E g(T_t) with g(T) = e^-T is e^{-t Phi(1)} by the Laplace transform
TEST_CASE("integrate against law reproduces the laplace transform") {
    auto expg = [](double T) { return std::exp(-T); };
    auto g = integrate_against_law(SubordinatorSpec::gamma(1, 1), 2.0, expg);
    REQUIRE(g.status == EvalStatus::Ok);
    REQUIRE(g.value == Approx(0.25).epsilon(1e-9));  // e^{-2 log 2}

    auto st = integrate_against_law(SubordinatorSpec::stable(0.5), 1.0, expg);
    REQUIRE(st.value == Approx(0.36787944117144232).epsilon(1e-8));

    auto dr = integrate_against_law(SubordinatorSpec::drift_only(2.0), 0.7, expg);
    REQUIRE(dr.value == Approx(0.24659696394160648).epsilon(1e-12));  // g(1.4)
}

TEST_CASE("integrate against law flags divergent origin") {
    MixOptions mo;
    mo.origin_exponent = -0.5;
    auto g = [](double T) { return std::pow(T, -0.5); };
    auto r = integrate_against_law(SubordinatorSpec::gamma(1, 1), 0.4, g, mo);
    REQUIRE(r.status == EvalStatus::Divergent);
    auto ok = integrate_against_law(SubordinatorSpec::gamma(1, 1), 0.9, g, mo);
    REQUIRE(ok.status == EvalStatus::Ok);
    // value equals E T^{-1/2}
    auto cf = negative_moment(SubordinatorSpec::gamma(1, 1),
                              {0.9, 0.5, MomentMethod::ClosedForm});
    REQUIRE(ok.value == Approx(cf.value).epsilon(1e-7));
}

TEST_CASE("increment sampling moments") {
    Rng rng(77);
    const double dt = 0.3;

    SECTION("gamma mean and variance") {
        const SubordinatorSpec s = SubordinatorSpec::gamma(2, 3);
        double sum = 0, sum2 = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double x = sample_increment(s, dt, rng);
            REQUIRE(x > 0.0);
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        const double true_mean = s.a * dt / s.b;          // 0.2
        const double true_var = s.a * dt / (s.b * s.b);   // 2/30
        REQUIRE(mean == Approx(true_mean).margin(4.0 * std::sqrt(true_var / n)));
        REQUIRE(var == Approx(true_var).epsilon(0.05));
    }

    SECTION("stable laplace transform") {
        const SubordinatorSpec s = SubordinatorSpec::stable(0.7);
        double sum = 0, sum2 = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double g = std::exp(-sample_increment(s, dt, rng));
            sum += g;
            sum2 += g * g;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / n);
        REQUIRE(std::fabs(mean - std::exp(-dt)) < 4.0 * se);  // E e^-T = e^{-t 1^rho}
    }

    SECTION("drift is deterministic") {
        REQUIRE(sample_increment(SubordinatorSpec::drift_only(2.5), dt, rng) ==
                Approx(0.75));
    }
}

TEST_CASE("subordinator density integrates to one") {
    // gamma(1,1) t=2 density at a point: T ~ Gamma(2,1), p(1.3) = 1.3 e^{-1.3}
    REQUIRE(subordinator_density(SubordinatorSpec::gamma(1, 1), 2.0, 1.3) ==
            Approx(1.3 * std::exp(-1.3)).epsilon(1e-12));
    // stable(0.5) closed form: p(x) = x^{-3/2} e^{-1/(4x)} / (2 sqrt(pi))
    const double x = 0.8;
    const double ref = std::pow(x, -1.5) * std::exp(-1.0 / (4 * x)) / (2 * std::sqrt(kPi));
    REQUIRE(subordinator_density(SubordinatorSpec::stable(0.5), 1.0, x) ==
            Approx(ref).epsilon(1e-7));
}

TEST_CASE("tauberian tail fit") {
    auto st = tauberian_tail_check(SubordinatorSpec::stable(0.7), 0.7);
    REQUIRE(st.status == EvalStatus::Ok);
    REQUIRE(st.exponent == Approx(0.7).margin(1e-3));
    REQUIRE(st.consistent);

    auto off = tauberian_tail_check(SubordinatorSpec::stable(0.7), 0.55);
    REQUIRE_FALSE(off.consistent);

    // gamma tails are logarithmic, not power-law
    auto g = tauberian_tail_check(SubordinatorSpec::gamma(1, 1), 0.5);
    REQUIRE_FALSE(g.consistent);

    auto dr = tauberian_tail_check(SubordinatorSpec::drift_only(1.0), 0.5);
    REQUIRE(dr.status == EvalStatus::NotApplicable);

    REQUIRE_THROWS_AS(tauberian_tail_check(SubordinatorSpec::stable(0.5), 1.5),
                      std::invalid_argument);
}
