#include <doctest.h>

#include <cmath>

#include "helmray/profiles.hpp"

using namespace helmray;

TEST_CASE("single gaussian evaluates exp(-x^2)") {
    const auto s = ProfileSpec::single_gaussian();
    CHECK(eval_profile(s, 0.0) == doctest::Approx(1.0));
    CHECK(eval_profile(s, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(eval_profile(s, -2.5) == doctest::Approx(std::exp(-6.25)));
}

TEST_CASE("sum_centered with a=1, b=0 reduces to a single gaussian of width 1/q") {
    const auto s = ProfileSpec::sum_centered(1.0, 0.0, 2.0, 3, 0.7);
    for (double x : {-1.3, -0.2, 0.0, 0.9, 2.4})
        CHECK(eval_profile(s, x) == doctest::Approx(std::exp(-4.0 * x * x)));
}

TEST_CASE("fig2 profile equals the four-term gaussian sum, term by term") {
    const auto s = preset("fig2").spec;
    const double q = 1.68, xc = 0.31;
    for (double x : {-2.0, -0.31, 0.0, 0.17, 0.62, 1.5}) {
        double direct = 0.0;
        for (int n = 1; n <= 2; ++n) {
            direct += std::exp(-q * q * (x - n * xc) * (x - n * xc));
            direct += std::exp(-q * q * (x + n * xc) * (x + n * xc));
        }
        CHECK(eval_profile(s, x) == doctest::Approx(direct).epsilon(1e-14));
    }
}

TEST_CASE("sum_paired with M=0 equals two gaussians centered at +-xc") {
    const auto s = ProfileSpec::sum_paired(3.5, 0, 1.15, 0.3);
    for (double x : {-1.15, 0.0, 0.4, 1.15, 2.0}) {
        const double d = 3.5 * 3.5;
        const double expect = std::exp(-d * (x - 1.15) * (x - 1.15)) +
                              std::exp(-d * (x + 1.15) * (x + 1.15));
        CHECK(eval_profile(s, x) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("presets carry the published parameter sets") {
    const auto f2 = preset("fig2");
    const auto* c2 = std::get_if<SumCentered>(&f2.spec.variant());
    REQUIRE(c2 != nullptr);
    CHECK(c2->a == 0.0);
    CHECK(c2->b == 1.0);
    CHECK(c2->q == 1.68);
    CHECK(c2->m == 2);
    CHECK(c2->xc == 0.31);

    const auto f8 = preset("fig8");
    const auto* c8 = std::get_if<SumCentered>(&f8.spec.variant());
    REQUIRE(c8 != nullptr);
    CHECK(c8->q == 1.0);
    CHECK(c8->m == 1);
    CHECK(c8->xc == 2.5);

    const auto f5 = preset("fig5");
    const auto* p5 = std::get_if<SumPaired>(&f5.spec.variant());
    REQUIRE(p5 != nullptr);
    CHECK(p5->q == 3.5);
    CHECK(p5->m == 3);
    CHECK(p5->xc == 1.15);
    CHECK(p5->x1 == 0.3);

    CHECK(preset("gaussian").spec.is_single_gaussian());
    for (const char* n : {"gaussian", "fig2", "fig5", "fig8"})
        CHECK(preset(n).epsilon == 1.65e-4);
    CHECK_THROWS_AS(preset("fig99"), std::invalid_argument);
}

TEST_CASE("support_halfwidth on the single gaussian is exact") {
    const auto s = ProfileSpec::single_gaussian();
    CHECK(support_halfwidth(s, std::exp(-4.0)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(support_halfwidth(s, std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("support_halfwidth of fig8 re-evaluates to the floor") {
    const auto s = preset("fig8").spec;
    const double floor = 1e-4;
    const double X = support_halfwidth(s, floor);
    CHECK(eval_profile(s, X) == doctest::Approx(floor * profile_max(s)).epsilon(0.01));
    // beyond X the profile stays below the floor
    for (double x = X * 1.01; x < X + 5.0; x += 0.17)
        CHECK(eval_profile(s, x) < floor * profile_max(s));
}

TEST_CASE("every spec is even and positive") {
    const ProfileSpec specs[] = {ProfileSpec::single_gaussian(), preset("fig2").spec,
                                 preset("fig5").spec, preset("fig8").spec};
    for (const auto& s : specs) {
        const double X = support_halfwidth(s, 1e-6);
        for (double x = 0.0; x < 10.0 * X; x += 0.37 * X) {
            CHECK(eval_profile(s, x) == eval_profile(s, -x));
            // strictly positive while representable; far tails underflow to 0
            if (x <= 3.0 * X)
                CHECK(eval_profile(s, x) > 0.0);
            else
                CHECK(eval_profile(s, x) >= 0.0);
        }
    }
}

TEST_CASE("invalid parameters are rejected at construction") {
    CHECK_THROWS_AS(ProfileSpec::sum_centered(1.0, 0.0, 0.0, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ProfileSpec::sum_centered(1.0, 0.0, 1.0, -1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ProfileSpec::sum_centered(0.0, 0.0, 1.0, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ProfileSpec::sum_paired(-1.0, 1, 0.5, 0.1), std::invalid_argument);
}
