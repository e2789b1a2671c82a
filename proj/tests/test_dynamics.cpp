#include <doctest.h>

#include <cmath>

#include "nonlocal/dynamics.hpp"

using namespace nonlocal;

namespace {

DislocationState pair(double s, double theta0, double gamma, int xi2) {
    DislocationState st;
    st.x = {-theta0 / 2, theta0 / 2};
    st.xi = {1, xi2};
    st.s = s;
    st.gamma = gamma;
    return st;
}

double mean(const std::vector<double>& x) {
    double m = 0;
    for (double v : x) m += v;
    return m / x.size();
}

}  // namespace

TEST_CASE("velocity field") {
    DislocationState one;
    one.x = {0.3};
    one.xi = {1};
    CHECK(velocity(one)[0] == 0.0);

    const double s = 0.4, th = 0.7, g = 1.3;
    auto v = velocity(pair(s, th, g, -1));
    double expect = g / (2 * s * std::pow(th, 2 * s));
    CHECK(v[0] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(-expect).epsilon(1e-14));
    auto r = velocity(pair(s, th, g, 1));
    CHECK(r[0] == doctest::Approx(-expect).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(expect).epsilon(1e-14));

    DislocationState bad = pair(s, th, g, 1);
    bad.x = {0.2, 0.2};
    CHECK_THROWS_AS(velocity(bad), DomainError);
    bad.x = {0.3, 0.2};
    CHECK_THROWS_AS(velocity(bad), DomainError);
    bad = pair(s, th, -1, 1);
    CHECK_THROWS_AS(velocity(bad), DomainError);
}

TEST_CASE("attracting pair collides at the closed-form time") {
    struct Case {
        double s, theta0, gamma;
    };
    for (auto c : {Case{0.5, 1, 1}, Case{0.3, 2, 0.7}, Case{0.8, 0.5, 2}}) {
        auto res = integrate(pair(c.s, c.theta0, c.gamma, -1), 10 * pair_collision_time(c.s, c.theta0, c.gamma));
        REQUIRE(res.terminated == TrajectoryResult::Collision);
        REQUIRE(res.collisions.size() == 1);
        const auto& ev = res.collisions[0];
        double tc = pair_collision_time(c.s, c.theta0, c.gamma);
        CHECK(std::abs(ev.time - tc) / tc < 1e-4);
        CHECK(ev.i == 0);
        CHECK(ev.j == 1);
        CHECK(ev.gap < 1e-5);
        CHECK(res.bracket < 1e-8);
        for (const auto& x : res.positions) CHECK(std::abs(mean(x)) < 1e-8);
    }
    CHECK(pair_collision_time(0.5, 1, 1) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("collision time scales like theta0^{2s+1}") {
    const double s = 0.35;
    double prev = 0;
    for (double th : {0.5, 1.0, 2.0}) {
        auto res = integrate(pair(s, th, 1, -1), 100);
        REQUIRE(res.collisions.size() == 1);
        double t = res.collisions[0].time;
        CHECK(t > prev);
        if (prev > 0) CHECK(t / prev == doctest::Approx(std::pow(2.0, 2 * s + 1)).epsilon(1e-4));
        prev = t;
    }
}

TEST_CASE("repulsive pair follows the closed form") {
    for (double s : {0.25, 0.5, 0.75}) {
        const double th0 = 0.8, g = 1.5, T = 2;
        auto res = integrate(pair(s, th0, g, 1), T);
        REQUIRE(res.terminated == TrajectoryResult::TEnd);
        CHECK(res.times.back() == doctest::Approx(T).epsilon(1e-15));
        for (size_t k = 0; k < res.times.size(); ++k) {
            const auto& x = res.positions[k];
            double theta = x[1] - x[0];
            double exact = pair_repulsive_gap(s, th0, g, res.times[k]);
            CHECK(std::abs(theta - exact) / exact < 1e-6);
            CHECK(std::abs(mean(x)) < 1e-8);
        }
        // run the closed form backwards from the final gap
        double thT = res.positions.back()[1] - res.positions.back()[0];
        double back = std::pow(std::pow(thT, 2 * s + 1) - (2 * s + 1) * g * T / s, 1 / (2 * s + 1));
        CHECK(std::abs(back - th0) < 1e-6);
    }
}

TEST_CASE("symmetric triple keeps the middle dislocation fixed") {
    DislocationState st;
    st.x = {-1, 0, 1};
    st.xi = {1, -1, 1};
    st.s = 0.5;
    auto res = integrate(st, 10);
    REQUIRE(res.terminated == TrajectoryResult::Collision);
    for (const auto& x : res.positions) {
        CHECK(std::abs(x[1]) < 1e-12);
        CHECK(std::abs(x[0] + x[2]) < 1e-10);
    }
    CHECK(res.collisions[0].gap < 1e-6);
}

TEST_CASE("constant stress only delays or advances within the bound") {
    // sigma >= 0 pushes the +1 dislocation left and the -1 one right: collision delayed
    const double s = 0.5, th0 = 0.5, g = 1, sig = 0.4;
    REQUIRE(th0 < std::pow(2 * s * sig, -1 / (2 * s)));
    auto st = pair(s, th0, g, -1);
    st.sigma = [sig](double, double) { return sig; };
    auto res = integrate(st, 50);
    REQUIRE(res.collisions.size() == 1);
    double bound = s * std::pow(th0, 1 + 2 * s) / (g * (1 - 2 * s * th0 * sig));
    CHECK(res.collisions[0].time > pair_collision_time(s, th0, g));
    CHECK(res.collisions[0].time <= bound);

    st.sigma = [sig](double, double) { return -sig; };
    auto fast = integrate(st, 50);
    REQUIRE(fast.collisions.size() == 1);
    CHECK(fast.collisions[0].time <= pair_collision_time(s, th0, g));
}

TEST_CASE("input validation") {
    auto st = pair(0.5, 1, 1, -1);
    CHECK_THROWS_AS(integrate(st, 0), DomainError);
    CHECK_THROWS_AS(integrate(st, 1, {}, 0), DomainError);
    st.xi = {1, 2};
    CHECK_THROWS_AS(integrate(st, 1), DomainError);
    auto tiny = pair(0.5, 1e-7, 1, -1);
    auto r = integrate(tiny, 1);
    CHECK(r.terminated == TrajectoryResult::Collision);
    CHECK(r.collisions[0].time == 0.0);
}
