#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helmray/stencil.hpp"

using namespace helmray;

TEST_CASE("derivative_nonuniform is exact for low-degree polynomials") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> jitter(0.2, 1.0);
    std::vector<double> xs(21);
    double x = -3.0;
    for (auto& v : xs) {
        v = x;
        x += 0.3 * jitter(rng);
    }
    // degree 4 polynomial: exact for the default 5-point stencil
    auto p = [](double t) { return 2.0 + t - 0.5 * t * t + 0.25 * t * t * t - 0.1 * t * t * t * t; };
    auto p1 = [](double t) { return 1.0 - t + 0.75 * t * t - 0.4 * t * t * t; };
    auto p2 = [](double t) { return -1.0 + 1.5 * t - 1.2 * t * t; };
    std::vector<double> vals(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) vals[i] = p(xs[i]);
    for (size_t i = 0; i < xs.size(); ++i) {
        CHECK(derivative_nonuniform(xs, vals, i, 1, 5) ==
              doctest::Approx(p1(xs[i])).epsilon(1e-10));
        CHECK(derivative_nonuniform(xs, vals, i, 2, 5) ==
              doctest::Approx(p2(xs[i])).epsilon(1e-10));
    }
}

TEST_CASE("derivative of a constant is zero") {
    std::vector<double> xs = {0.0, 0.3, 0.5, 1.1, 1.6, 2.0, 2.9};
    std::vector<double> vals(xs.size(), 4.2);
    for (size_t i = 0; i < xs.size(); ++i)
        CHECK(derivative_nonuniform(xs, vals, i, 1, 5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("second derivative of exp(-x^2) at 0 on a fine grid") {
    const double h = 0.01;
    std::vector<double> xs, vals;
    for (int i = -10; i <= 10; ++i) {
        xs.push_back(i * h);
        vals.push_back(std::exp(-xs.back() * xs.back()));
    }
    CHECK(derivative_nonuniform(xs, vals, 10, 2, 5) == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("non-monotone abscissae are rejected") {
    std::vector<double> xs = {0.0, 0.5, 0.4, 1.0, 1.5};
    CHECK_THROWS_AS(check_monotone(xs), std::runtime_error);
    std::vector<double> vals(xs.size(), 1.0);
    CHECK_THROWS_AS(derivative_nonuniform(xs, vals, 2, 1, 5), std::runtime_error);
}

TEST_CASE("LocalFit reproduces polynomial values and derivatives") {
    std::vector<double> xs, vals;
    for (int i = 0; i < 30; ++i) {
        xs.push_back(0.1 * i + 0.01 * std::sin(3.0 * i));
        const double t = xs.back();
        vals.push_back(1.0 + 2.0 * t - t * t + 0.5 * t * t * t);
    }
    LocalFit fit(7, 3);
    for (size_t i = 0; i < xs.size(); ++i) {
        const auto d = fit.fit_at(xs, vals, i);
        const double t = xs[i];
        CHECK(d.value == doctest::Approx(1.0 + 2.0 * t - t * t + 0.5 * t * t * t).epsilon(1e-9));
        CHECK(d.d1 == doctest::Approx(2.0 - 2.0 * t + 1.5 * t * t).epsilon(1e-8));
        CHECK(d.d2 == doctest::Approx(-2.0 + 3.0 * t).epsilon(1e-7));
        CHECK(d.d3 == doctest::Approx(3.0).epsilon(1e-6));
    }
}
