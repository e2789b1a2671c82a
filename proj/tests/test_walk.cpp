#include <doctest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>

#include "nonlocal/balls.hpp"
#include "nonlocal/walk.hpp"

using namespace nonlocal;

namespace {

// sqrt(y_+) truncated to |y| < 50, as seen by both the walk and the solver.
ScalarField truncated_root() {
    ScalarField g;
    g.n = 1;
    g.eval = [](const Point& y) { return (y[0] > 0 && y[0] < 50) ? std::sqrt(y[0]) : 0.0; };
    g.support_radius = 50;
    g.kinks = {0, 50, -50};
    return g;
}

double dirichlet_reference(double s, double c, double R) {
    ScalarField g = truncated_root(), shifted = g;
    shifted.eval = [g, c](const Point& z) { return g.eval({z[0] + c, 0, 0}); };
    shifted.kinks = {-c, 50 - c, -50 - c};
    return solve_dirichlet(shifted, BallGeometry(R, FracParams(1, s)), {0, 0, 0}).value;
}

}  // namespace

TEST_CASE("jump law normalization") {
    for (double s : {0.1, 0.3, 0.5, 0.9}) {
        double z = boost::math::zeta(1 + 2 * s);
        CHECK(walk_zeta(s) == doctest::Approx(z).epsilon(1e-13));
        JumpLaw law(s);
        CHECK(law.c_walk * z == doctest::Approx(1).epsilon(1e-12));
        CHECK(law.tail_mass > 0);
        CHECK(law.cdf.back() + law.tail_mass == doctest::Approx(1).epsilon(1e-14));
    }
    ScalarField one = constant_field(1);
    one.support_radius = 1e300;
    auto cfg = make_walk(FracParams(1, 0.5), 0.1, {}, 1, one);
    CHECK(cfg.tau == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("jump sampling") {
    const double s = 0.5;
    ScalarField one = constant_field(1);
    one.support_radius = 1e300;
    auto cfg = make_walk(FracParams(1, s), 1.0, {}, 1, one);
    RngCursor rng({21, 0, 0});
    const long long N = 1'000'000;
    long long ones = 0, over10 = 0, over100 = 0;
    Welford disp;
    for (long long i = 0; i < N; ++i) {
        Point d = sample_jump(cfg, rng);
        double k = std::abs(d[0]);
        ones += k == 1;
        over10 += k > 10;
        over100 += k > 100;
        disp.add(std::clamp(d[0], -1e3, 1e3));  // clamped for a finite variance
    }
    auto within = [&](long long count, double p) {
        double sd = std::sqrt(p * (1 - p) / N);
        return std::abs(double(count) / N - p) < 3 * sd;
    };
    const double c = cfg.c_walk();
    CHECK(within(ones, c));
    // exact tail sums; c K^{-2s}/(2s) is the integral approximation of these
    CHECK(within(over10, cfg.law->tail_probability(10)));
    CHECK(within(over100, cfg.law->tail_probability(100)));
    CHECK(cfg.law->tail_probability(100) == doctest::Approx(c * std::pow(100.5, -2 * s) / (2 * s)).epsilon(1e-3));
    CHECK(std::abs(disp.mean) < 3 * disp.std_error());

    // draws beyond the table still follow the law
    JumpLaw small(0.5, 8);
    RngCursor r2({2, 0, 0});
    long long big = 0;
    for (long long i = 0; i < 200'000; ++i) big += small.draw(r2.uniform_open(), r2.uniform_open()) > 20;
    double p = small.tail_probability(20);
    CHECK(std::abs(big / 2e5 - p) < 3 * std::sqrt(p * (1 - p) / 2e5) + 2e-3);

    // the functional form returns the advanced stream
    auto [d, next] = sample_jump(cfg, RngStream{4, 0, 0});
    CHECK(next.counter > 0);
    CHECK(std::abs(d[0]) >= 1);
}

TEST_CASE("trivial payoffs") {
    ScalarField one = constant_field(1, 2);
    one.support_radius = 1e300;
    auto cfg = make_walk(FracParams(2, 0.4), 0.05, {}, 1, one);
    auto e = estimate_payoff({0.2, 0.1, 0}, cfg, 20'000, {1, 1, 0});
    CHECK(e.value == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.truncated_paths == 0);

    ScalarField right;
    right.n = 1;
    right.eval = [](const Point& y) { return y[0] > 0 ? 1.0 : 0.0; };
    right.support_radius = 1e300;
    auto c1 = make_walk(FracParams(1, 0.5), 0.02, {}, 0.5, right);
    auto half = estimate_payoff({0, 0, 0}, c1, 100'000, {3, 0, 0});
    CHECK(std::abs(half.value - 0.5) < 3 * half.std_error);

    ScalarField unbounded = constant_field(1);
    CHECK_THROWS_AS(make_walk(FracParams(1, 0.5), 0.1, {}, 1, unbounded), DomainError);
    CHECK_THROWS_AS(estimate_payoff({2, 0, 0}, c1, 100, {}), DomainError);
}

TEST_CASE("walk against the Poisson-kernel solution") {
    const double s = 0.5, c = 2, R = 0.5;
    const double ref = dirichlet_reference(s, c, R);
    auto cfg = make_walk(FracParams(1, s), 0.02, {c, 0, 0}, R, truncated_root());
    auto a = estimate_payoff({c, 0, 0}, cfg, 100'000, {9, 0, 0});
    CHECK(std::abs(a.value - ref) < 3 * a.std_error);
    CHECK(a.exits == 100'000);

    // independent streams agree
    auto b = estimate_payoff({c, 0, 0}, cfg, 100'000, {9, 1, 0});
    CHECK(std::abs(a.value - b.value) < 3 * std::hypot(a.std_error, b.std_error));

    // the worker count does not change the estimate
    setenv("NONLOCAL_THREADS", "1", 1);
    auto a1 = estimate_payoff({c, 0, 0}, cfg, 100'000, {9, 0, 0});
    unsetenv("NONLOCAL_THREADS");
    CHECK(a1.value == a.value);

    // coarser steps: the error shrinks towards the noise floor as h decreases
    auto coarse = make_walk(FracParams(1, s), 0.1, {c, 0, 0}, R, truncated_root());
    auto ec = estimate_payoff({c, 0, 0}, coarse, 400'000, {9, 2, 0});
    auto fine = estimate_payoff({c, 0, 0}, cfg, 400'000, {9, 3, 0});
    CHECK(std::abs(fine.value - ref) < std::max(std::abs(ec.value - ref), 3 * fine.std_error));
}

TEST_CASE("recurrent configurations fail loudly") {
    ScalarField one = constant_field(1);
    one.support_radius = 1e300;
    auto cfg = make_walk(FracParams(1, 0.5), 0.001, {}, 1, one, 3);
    CHECK_THROWS_AS(estimate_payoff({0, 0, 0}, cfg, 1000, {}), ExcessTruncation);
}
