#include <doctest.h>

#include <cmath>

#include "nonlocal/specfun.hpp"

using namespace nonlocal;

TEST_CASE("gamma values") {
    CHECK(nonlocal::gamma(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(nonlocal::gamma(5) == 24.0);
    CHECK(nonlocal::gamma(1) == 1.0);
    CHECK_THROWS_AS(nonlocal::gamma(0), PoleError);
    CHECK_THROWS_AS(nonlocal::gamma(-3), PoleError);
    for (double x = -9.7; x <= 50; x += 0.37) {
        double ref = std::tgamma(x);
        CHECK(std::abs(nonlocal::gamma(x) / ref - 1) < 1e-12);
    }
}

TEST_CASE("gamma reflection and duplication") {
    for (int i = 1; i <= 9; ++i) {
        double s = 0.1 * i;
        CHECK(std::abs(nonlocal::gamma(s) * nonlocal::gamma(1 - s) * std::sin(M_PI * s) / M_PI - 1) < 1e-10);
    }
    for (double x : {0.25, 0.5, 1.3}) {
        double lhs = nonlocal::gamma(0.5 + x) / nonlocal::gamma(2 * x);
        double rhs = std::sqrt(M_PI) * std::pow(2.0, 1 - 2 * x) / nonlocal::gamma(x);
        CHECK(std::abs(lhs / rhs - 1) < 1e-10);
    }
}

TEST_CASE("beta and pochhammer") {
    CHECK(beta(0.3, 0.7) == doctest::Approx(M_PI / std::sin(0.3 * M_PI)).epsilon(1e-12));
    CHECK(beta(1, 0.3) == doctest::Approx(1 / 0.3).epsilon(1e-12));
    CHECK(beta(2, 3) == doctest::Approx(1.0 / 12).epsilon(1e-12));
    CHECK_THROWS_AS(beta(-1, 2), DomainError);
    CHECK(pochhammer(0.4, 0) == 1.0);
    CHECK(pochhammer(3, 2) == 12.0);
    CHECK(pochhammer(-0.3, 1) == -0.3);
}

TEST_CASE("hypergeometric identities") {
    CHECK(std::abs(hyp2f1(0.7, 1.3, 1.3, 0.4) / std::pow(0.6, -0.7) - 1) < 1e-10);
    CHECK(hyp2f1(0, 1.2, 2.5, 0.9) == 1.0);
    double a = 0.3, w = 0.2;
    double ref = (std::pow(1.2, -2 * a) + std::pow(0.8, -2 * a)) / 2;
    CHECK(std::abs(hyp2f1(a, 0.5 + a, 0.5, w * w) / ref - 1) < 1e-10);
    // transformation branches against the (1-w)^{-a} identity
    for (double z : {-0.9, -3.0, 0.7, 0.95}) {
        double v = hyp2f1(0.45, 1.1, 1.1, z);
        CHECK(std::abs(v / std::pow(1 - z, -0.45) - 1) < 1e-10);
    }
    // arctan / log closed forms
    for (double z : {-0.8, -0.3, 0.6, 0.9}) {
        double v = hyp2f1(1, 1, 2, z);
        CHECK(std::abs(v - (-std::log(1 - z) / z)) < 1e-10 * std::abs(v));
    }
    for (double t : {0.4, 1.0, 3.0}) {
        double v = t * hyp2f1(0.5, 1, 1.5, -t * t);
        CHECK(std::abs(v - std::atan(t)) < 1e-10);
    }
    // complete elliptic integral: 2F1(1/2,1/2;1;m) = 2K(m)/pi, integer c-a-b branch
    for (double m : {0.6, 0.8, 0.95})
        CHECK(std::abs(hyp2f1(0.5, 0.5, 1.0, m) - 2 * std::comp_ellint_1(std::sqrt(m)) / M_PI) <
              1e-10);
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 1.7, 1.5), DomainError);
}

TEST_CASE("normalization constants") {
    auto t = constants(FracParams(1, 0.5));
    CHECK(t.C == doctest::Approx(1 / M_PI).epsilon(1e-14));
    CHECK(t.a_fund == doctest::Approx(-1 / M_PI).epsilon(1e-15));
    CHECK(t.kappa == doctest::Approx(1 / M_PI).epsilon(1e-15));
    CHECK(t.omega_n == doctest::Approx(2.0).epsilon(1e-15));
    auto u = constants(FracParams(1, 0.75));
    CHECK(u.kappa ==
          doctest::Approx(1 / (std::pow(2, 1.5) * std::pow(std::tgamma(0.75), 2))).epsilon(1e-13));
    CHECK(u.kappa == doctest::Approx(u.a_fund * u.k_ns).epsilon(1e-13));
    CHECK(u.a_fund < 0);
    auto v = constants(FracParams(3, 0.5));
    CHECK(v.a_fund == doctest::Approx(std::tgamma(1.0) / (2 * std::pow(M_PI, 1.5) * std::sqrt(M_PI))).epsilon(1e-13));
    CHECK(v.kappa == doctest::Approx(v.a_fund * v.k_ns).epsilon(1e-13));
    CHECK(omega(2) == doctest::Approx(2 * M_PI).epsilon(1e-15));
    CHECK(omega(3) == doctest::Approx(4 * M_PI).epsilon(1e-14));
}

TEST_CASE("oscillatory gamma integral") {
    CHECK(oscillatory_gamma_closed(0.25) == doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-13));
    for (double s : {0.25, 0.4, 0.5}) {
        auto e = oscillatory_gamma_check(s);
        CHECK(std::abs(e.value - oscillatory_gamma_closed(s)) < 1e-4);
    }
    CHECK_THROWS_AS(oscillatory_gamma_check(0.7), DomainError);
}

TEST_CASE("symbol integral reproduces 1/C") {
    for (int n : {1, 2})
        for (double s : {0.25, 0.5, 0.75}) {
            FracParams p(n, s);
            auto e = symbol_integral(p);
            CHECK(std::abs(e.value * constants(p).C - 1) < 1e-6);
        }
}

TEST_CASE("second-difference cancellation identity") {
    for (double s : {0.2, 0.5, 0.8}) {
        QuadSpec q;
        q.rel_tol = 1e-12;
        q.abs_tol = 1e-13;
        auto near = integrate_1d(
            [&](double t) {
                if (t < 1e-3) {  // series of the second difference divided by t^2
                    double c2 = s * (s - 1), c4 = c2 * (s - 2) * (s - 3) / 12;
                    return c2 + c4 * t * t;
                }
                return (std::pow(1 + t, s) + std::pow(1 - t, s) - 2) / (t * t);
            },
            0, 1, Weight::left_power(1 - 2 * s), q);
        QuadOptions o;
        o.decay = 1 + s;
        auto far = integrate_1d([&](double t) { return std::pow(1 + t, s) * std::pow(t, -1 - 2 * s); },
                                1, kInf, Weight::none(), q, o);
        CHECK(std::abs(near.value + far.value - 1 / s) < 1e-8);
    }
}

TEST_CASE("sine power products give the sphere measure") {
    for (int n : {3, 4, 5}) {
        double prod = M_PI;
        for (int k = 1; k <= n - 2; ++k)
            prod *= integrate_1d([&](double th) { return std::pow(std::sin(th), k); }, 0, M_PI,
                                 Weight::none(), QuadSpec{})
                        .value;
        CHECK(std::abs(prod - std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n)) < 1e-10);
    }
}
