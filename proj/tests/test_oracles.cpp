#include "flights/commands.hpp"
#include "flights/errors.hpp"
#include "flights/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace flights;

TEST_CASE("image and sine series agree across the crossover") {
    const auto agreement = cli::dual_series_check();
    CHECK(agreement.cases == 108);
    CHECK(agreement.max_abs_diff <= 1e-10);
    for (double a : {0.3, 2.0}) {
        for (double x : {0.05, 0.5, 0.95}) {
            for (double t : {0.02, 0.3, 1.0, 3.0}) {
                const IntervalSurvivalQuery q{x * a, a, t * a * a};
                CHECK(std::abs(interval_survival_reflection(q, 64) - interval_survival_eigen(q, 200)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("reference values") {
    const IntervalSurvivalQuery mid{0.5, 1.0, 0.5};
    CHECK(interval_survival_reflection(mid, 64) == doctest::Approx(0.1080).epsilon(5e-4));
    CHECK(interval_survival_eigen(mid, 64) == doctest::Approx(0.1080).epsilon(5e-4));
    CHECK(cube_survival(1.0, 2, 0.5) == doctest::Approx(0.01166).epsilon(5e-4));
    CHECK(interval_survival_reflection({0.5, 1.0, 0.0}, 10) == 1.0);
    CHECK(cube_survival(1.0, 2, 0.0) == 1.0);
    CHECK(cube_survival(2.0, 1, 0.7) == interval_survival({1.0, 2.0, 0.7}));
}

TEST_CASE("large-time decay rate") {
    const double s1 = interval_survival_eigen({0.5, 1.0, 1.0}, 64);
    const double s2 = interval_survival_eigen({0.5, 1.0, 2.0}, 64);
    const double slope = std::log(s2) - std::log(s1);
    CHECK(std::abs(slope + std::numbers::pi * std::numbers::pi / 2) <= 1e-6);
}

TEST_CASE("monotone, symmetric and bounded") {
    for (double t : {0.001, 0.01, 0.1, 1.0, 10.0}) {
        double prev = 0.0;
        for (int i = 1; i <= 50; ++i) {
            const double x = i / 100.0;
            const double s = interval_survival({x, 1.0, t});
            CHECK(s >= prev - 1e-15);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            CHECK(std::abs(s - interval_survival({1.0 - x, 1.0, t})) <= 1e-12);
            prev = s;
        }
    }
    for (double x : {0.1, 0.5}) {
        double prev = 1.0;
        for (int k = 0; k <= 40; ++k) {
            const double s = interval_survival({x, 1.0, 1e-4 * std::pow(10.0, k / 8.0)});
            CHECK(s <= prev + 1e-15);
            prev = s;
        }
    }
    // x -> 0 drives the survival to zero monotonically.
    double prev = 1.0;
    for (double x : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
        const double s = interval_survival({x, 1.0, 0.1});
        CHECK(s < prev);
        prev = s;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("small-time survival scales like x / sqrt(t)") {
    for (double x : {0.01, 0.05}) {
        double lo = INFINITY, hi = 0.0;
        for (int k = 0; k <= 10; ++k) {
            const double t = std::pow(x * 4.0, 2) * std::pow(10.0, k / 10.0);
            if (1.0 / std::sqrt(t) < 4.0) continue;
            const double ratio = interval_survival({x, 1.0, t}) / (x / std::sqrt(t));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(lo > 0.3);
        CHECK(hi < 1.0);
    }
    // Half-line limit: erf(x / sqrt(2 t)).
    const double t = 0.01;
    CHECK(interval_survival_eigen({0.25, 1.0, t}, 400) ==
          doctest::Approx(std::erf(0.25 / std::sqrt(2 * t))).epsilon(1e-6));
}

TEST_CASE("cube bound with a numerical constant") {
    for (int d = 1; d <= 3; ++d) {
        double c = 0.0;
        for (int k = 0; k <= 40; ++k) {
            const double t = 0.01 * std::pow(10.0, k / 10.0);
            c = std::max(c, cube_survival(1.0, d, t) / std::pow(1.0 / std::sqrt(t), d));
        }
        CHECK(c < 1.0);
    }
}

TEST_CASE("oracle preconditions") {
    CHECK_THROWS_AS(interval_survival_reflection({0.0, 1.0, 0.1}, 10), PreconditionError);
    CHECK_THROWS_AS(interval_survival_reflection({1.5, 1.0, 0.1}, 10), PreconditionError);
    CHECK_THROWS_AS(interval_survival_eigen({0.5, -1.0, 0.1}, 10), PreconditionError);
    CHECK_THROWS_AS(interval_survival_eigen({0.5, 1.0, -0.1}, 10), PreconditionError);
    CHECK_THROWS_AS(interval_survival_eigen({0.5, 1.0, 0.1}, 0), PreconditionError);
    CHECK_THROWS_AS(cube_survival(0.0, 2, 0.1), PreconditionError);
}
