#include "flights/errors.hpp"
#include "flights/flight.hpp"
#include "flights/oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace flights;
using flights::testing::koch;
using flights::testing::square;

namespace {

template <int Dim>
bool same_record(const FlightRecord<Dim>& a, const FlightRecord<Dim>& b) {
    return a.flight_id == b.flight_id && a.start_cube == b.start_cube && a.start == b.start && a.tau == b.tau &&
           a.exit_point == b.exit_point && a.displacement == b.displacement && a.censored == b.censored &&
           a.shell_occupation == b.shell_occupation;
}

struct SquareSetup {
    Domain<2> domain = make_domain<2>(square());
    WhitneyDecomposition<2> dec = decompose(domain, -10);
    StepPolicy policy(double eps) const { return StepPolicy::defaults(eps, dec.inradius_cap()); }
};

// Fraction of paths from `start` that survive past t, and the oracle.
double empirical_survival_at(const Domain<2>& domain, const Point<2>& start, const StepPolicy& policy, int n,
                             double t, std::uint64_t seed) {
    int alive = 0;
    for (int i = 0; i < n; ++i) {
        auto rng = flight_stream(seed, i);
        if (run_path(domain, start, policy, rng).tau > t) ++alive;
    }
    return double(alive) / n;
}

} // namespace

TEST_CASE("default policy") {
    const auto p = StepPolicy::defaults(1.0 / 64, 0.5);
    CHECK(p.dt_max == doctest::Approx(0.0025));
    CHECK(p.delta_abs == doctest::Approx(1.0 / 6400));
    CHECK(p.t_max == doctest::Approx(1.0));
    CHECK(p.c_step == 0.1);
    CHECK(p.bridge_correction);
    StepPolicy bad = p;
    bad.c_step = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.delta_abs = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.t_max = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("streams and flights are pure functions of (seed, id)") {
    auto a = flight_stream(42, 7), b = flight_stream(42, 7), c = flight_stream(42, 8);
    const auto va = a(), vb = b(), vc = c();
    CHECK(va == vb);
    CHECK(va != vc);

    SquareSetup s;
    const double eps = 1.0 / 32;
    const auto r1 = sample_flight(s.domain, s.dec, eps, s.policy(eps), 99, 5);
    const auto r2 = sample_flight(s.domain, s.dec, eps, s.policy(eps), 99, 5);
    CHECK(same_record(r1, r2));
}

TEST_CASE("flight record contract") {
    SquareSetup s;
    const double eps = 1.0 / 32;
    const auto policy = s.policy(eps);
    const FlightSampler<2> sampler(s.domain, s.dec, eps, policy);
    const auto& starts = sampler.start_layer();
    for (std::uint64_t id = 0; id < 10000; ++id) {
        const auto r = sampler.sample(1234, id);
        CHECK(r.flight_id == id);
        CHECK(std::find(starts.begin(), starts.end(), r.start_cube) != starts.end());
        CHECK(r.start == r.start_cube.center());
        CHECK(r.tau > 0.0);
        CHECK(r.displacement == doctest::Approx((r.exit_point - r.start).norm()));
        if (!r.censored) CHECK(std::abs(s.domain.signed_distance(r.exit_point)) <= policy.delta_abs);
        double sum = 0.0;
        for (const auto& [k, v] : r.shell_occupation) sum += v;
        CHECK(std::abs(sum - r.tau) <= 1e-9 * r.tau);
        CHECK(r.occupation_within(1e9) == doctest::Approx(r.tau).epsilon(1e-9));
        CHECK(r.occupation_within(0.0) == 0.0);
    }
}

TEST_CASE("isolated cube matches the exact law") {
    const double side = 0.25;
    const auto cube = make_domain<2>(square(side));
    StepPolicy policy;
    policy.dt_max = side * side / 400;
    policy.delta_abs = side * 1e-4;
    policy.t_max = 10 * side * side;
    const Point<2> center(side / 2, side / 2);
    const int n = 20000;
    for (double f : {0.1, 0.5, 1.0}) {
        const double t = f * side * side;
        const double oracle = cube_survival(side, 2, t);
        const double se = std::sqrt(oracle * (1 - oracle) / n);
        const double empirical = empirical_survival_at(cube, center, policy, n, t, 77);
        INFO("t = " << t << " empirical " << empirical << " oracle " << oracle);
        CHECK(std::abs(empirical - oracle) <= 3 * se);
    }
}

TEST_CASE("refining the step does not move away from the oracle") {
    const auto sq = make_domain<2>(square());
    StepPolicy coarse;
    coarse.c_step = 0.4;
    coarse.dt_max = 0.01;
    coarse.delta_abs = 0.01;
    coarse.t_max = 5.0;
    StepPolicy fine = coarse;
    fine.c_step /= 2;
    fine.delta_abs /= 2;
    const int n = 20000;
    const double t = 0.1;
    const double oracle = cube_survival(1.0, 2, t);
    const double se = std::sqrt(oracle * (1 - oracle) / n);
    const double e_coarse = empirical_survival_at(sq, Point<2>(0.5, 0.5), coarse, n, t, 5);
    const double e_fine = empirical_survival_at(sq, Point<2>(0.5, 0.5), fine, n, t, 6);
    CHECK(std::abs(e_fine - oracle) <= std::abs(e_coarse - oracle) + 2 * se);
}

TEST_CASE("campaign output does not depend on the worker count") {
    const auto domain = make_domain<2>(koch(4));
    const auto dec = decompose(domain, -10);
    const double eps = 1.0 / 64;
    const auto policy = StepPolicy::defaults(eps, dec.inradius_cap());
    const auto one = run_campaign(domain, dec, eps, policy, 400, 3, 1);
    const auto many = run_campaign(domain, dec, eps, policy, 400, 3, 8);
    REQUIRE(one.size() == 400);
    REQUIRE(many.size() == 400);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].flight_id == i);
        CHECK(same_record(one[i], many[i]));
    }
}

TEST_CASE("few flights are censored under the default policy") {
    SquareSetup s;
    const double eps = 1.0 / 64;
    const auto records = run_campaign(s.domain, s.dec, eps, s.policy(eps), 10000, 8, 1);
    const auto censored = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.censored; });
    CHECK(censored < 100);
}

TEST_CASE("censoring stops at t_max") {
    const auto sq = make_domain<2>(square());
    StepPolicy p = StepPolicy::defaults(1.0 / 64, 0.5);
    p.t_max = 0.01;
    auto rng = flight_stream(1, 1);
    const auto out = run_path(sq, Point<2>(0.5, 0.5), p, rng);
    CHECK(out.censored);
    CHECK(out.tau == doctest::Approx(0.01));
}

TEST_CASE("delta regularity") {
    SUBCASE("square") {
        const auto sq = make_domain<2>(square());
        const auto points = testing::near_boundary_points(sq, 20, 0.005, 0.1, 1);
        const auto report = estimate_delta_regularity(sq, points, 500, StepPolicy::defaults(1.0 / 64, 0.5), 4, 0.5);
        REQUIRE(report.points.size() == points.size());
        for (const auto& h : report.points) {
            CHECK(h.fraction > 0.0);
            CHECK(h.fraction < 1.0);
        }
        CHECK(report.lower_bound >= 0.2);
    }
    SUBCASE("koch") {
        const auto domain = make_domain<2>(koch(5));
        const auto points = testing::near_boundary_points(domain, 10, 0.002, 0.05, 2);
        const auto report = estimate_delta_regularity(domain, points, 500, StepPolicy::defaults(1.0 / 64, 0.33), 4, 0.33);
        CHECK(report.lower_bound >= 0.05);
    }
}

TEST_CASE("flight preconditions") {
    SquareSetup s;
    const auto policy = s.policy(1.0 / 64);
    CHECK_THROWS_AS(FlightSampler<2>(s.domain, s.dec, std::ldexp(1.0, -9), policy), PreconditionError);
    CHECK_THROWS_AS(FlightSampler<2>(s.domain, s.dec, 0.6, policy), PreconditionError);
    CHECK_THROWS_AS(run_campaign(s.domain, s.dec, 1.0 / 64, policy, 0, 1, 1), PreconditionError);
    auto rng = flight_stream(0, 0);
    CHECK_THROWS_AS(run_path(s.domain, Point<2>(2.0, 2.0), policy, rng), PreconditionError);
    CHECK_THROWS_AS(estimate_delta_regularity(s.domain, {Point<2>(-0.1, 0.5)}, 10, policy, 0, 0.5),
                    PreconditionError);
    CHECK_THROWS_AS(estimate_delta_regularity(s.domain, {Point<2>(0.5, 0.5)}, 10, policy, 0, 0.5),
                    PreconditionError);
}
