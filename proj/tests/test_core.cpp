#include <doctest.h>

#include <cmath>
#include <vector>

#include "nonlocal/quadrature.hpp"
#include "nonlocal/rng.hpp"

using namespace nonlocal;

TEST_CASE("fractional params reject the endpoints") {
    CHECK_THROWS_AS(FracParams(1, 0.0), DomainError);
    CHECK_THROWS_AS(FracParams(1, 1.0), DomainError);
    CHECK_THROWS_AS(FracParams(0, 0.5), DomainError);
    CHECK_NOTHROW(FracParams(3, 0.01));
}

TEST_CASE("jacobi weighted integrals") {
    QuadSpec q;
    // int_0^1 t^{s-1}(1-t)^{-s} = pi / sin(pi s)
    for (double s : {0.5, 0.2, 0.8}) {
        auto e = integrate_1d([](double) { return 1.0; }, 0, 1, Weight::jacobi(s - 1, -s), q);
        CHECK(e.value == doctest::Approx(M_PI / std::sin(M_PI * s)).epsilon(1e-12));
    }
    // same through a left weight plus a declared singularity of f at 1
    double s = 0.5;
    QuadOptions o;
    o.singularities = {{1.0, -s}};
    auto e = integrate_1d([&](double t) { return std::pow(1 - t, -s); }, 0, 1,
                          Weight::left_power(s - 1), q, o);
    CHECK(e.value == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(integrate_1d([](double) { return 1.0; }, 0, 1, Weight::none(), q).value ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weighted kernel with a shifted pole") {
    double al = 1, be = 2, s = 0.3;
    auto e = integrate_1d([&](double x) { return 1.0 / (be + x); }, 0, al,
                          Weight::jacobi(-s, s - 1), QuadSpec{});
    double expect = M_PI / std::sin(M_PI * s) * std::pow(al + be, s - 1) / std::pow(be, s);
    CHECK(std::abs(e.value - expect) < 1e-10);
}

TEST_CASE("polynomials up to degree 10 are exact") {
    for (int d = 0; d <= 10; ++d) {
        auto e = integrate_1d([&](double t) { return (d + 1) * std::pow(t, d) - 0.5 * t; }, 0, 1,
                              Weight::none(), QuadSpec{});
        CHECK(std::abs(e.value - (1.0 - 0.25)) < 1e-12);
    }
}

TEST_CASE("beta integrals through the left power weight") {
    for (double x : {0.25, 0.5, 1.5})
        for (double y : {0.25, 0.5, 1.5}) {
            QuadOptions o;
            o.singularities = {{1.0, y - 1}};
            auto e = integrate_1d([&](double t) { return std::pow(1 - t, y - 1); }, 0, 1,
                                  Weight::left_power(x - 1), QuadSpec{}, o);
            double b = std::tgamma(x) * std::tgamma(y) / std::tgamma(x + y);
            CHECK(std::abs(e.value - b) < 1e-10);
        }
}

TEST_CASE("infinite ranges") {
    auto e = integrate_1d([](double) { return 1.0; }, 0, kInf, Weight::laguerre(-0.5), QuadSpec{});
    CHECK(e.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
    QuadOptions o;
    o.decay = 1.5;
    auto t = integrate_1d([](double x) { return std::pow(x, -1.5); }, 1, kInf, Weight::none(),
                          QuadSpec{}, o);
    CHECK(t.value == doctest::Approx(2.0).epsilon(1e-10));
    o.decay = 2;
    auto r = integrate_1d([](double x) { return 1 / (1 + x * x); }, 0, kInf, Weight::none(),
                          QuadSpec{}, o);
    CHECK(r.value == doctest::Approx(M_PI / 2).epsilon(1e-10));
}

TEST_CASE("domain errors and budget exhaustion") {
    CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 0, 1, Weight::left_power(-1), {}),
                    DomainError);
    CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 1, 1, Weight::none(), {}),
                    DomainError);
    CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 2, 1, Weight::none(), {}),
                    DomainError);
    QuadSpec tight;
    tight.max_subdivisions = 1;
    auto e = integrate_1d([](double t) { return std::sin(200 * t) * std::sqrt(t); }, 0, 3,
                          Weight::none(), tight);
    CHECK_FALSE(e.converged);
}

TEST_CASE("oscillatory tail acceleration") {
    auto head = quad([](double t) { return t == 0 ? 1.0 : std::sin(t) / t; }, 0, M_PI,
                     Weight::none(), QuadSpec{});
    auto tail = oscillatory_tail(
        [](double a, double b) {
            return quad([](double t) { return std::sin(t) / t; }, a, b, Weight::none(), QuadSpec{})
                .value;
        },
        M_PI, M_PI, 1e-12);
    CHECK(tail.converged);
    CHECK(std::abs(head.value + tail.value - M_PI / 2) < 1e-10);
}

TEST_CASE("multi-dimensional regions") {
    QuadSpec q;
    NdRegion sh;
    sh.kind = NdRegion::Shell;
    sh.n = 2;
    sh.r_in = 0;
    sh.r_out = 1;
    auto area = integrate_nd([](const Point&) { return 1.0; }, sh, q);
    CHECK(area.value == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(sphere_integral([](const Point&) { return 1.0; }, 2, q) ==
          doctest::Approx(2 * M_PI).epsilon(1e-14));
    NdRegion out;
    out.kind = NdRegion::BallComplement;
    out.n = 2;
    out.r_in = 1;
    out.decay = 1.5;
    auto e = integrate_nd([](const Point& y) { return std::pow(norm(y, 2), -2.5); }, out, q);
    CHECK(e.value == doctest::Approx(4 * M_PI).epsilon(1e-9));
    NdRegion box;
    box.kind = NdRegion::Box;
    box.n = 3;
    box.lo = {0, 0, 0};
    box.hi = {1, 2, 3};
    auto b = integrate_nd([](const Point& y) { return y[0] * y[1] * y[2]; }, box, q);
    CHECK(b.value == doctest::Approx(0.5 * 2 * 4.5).epsilon(1e-12));
    NdRegion bad;
    bad.n = 4;
    CHECK_THROWS_AS(integrate_nd([](const Point&) { return 1.0; }, bad, q), UnsupportedDimension);
}

TEST_CASE("angular integral with a displaced pole") {
    // int_0^pi sin^{n-2}/(tau^2 - 2 tau cos + 1)^{n/2}, n=3, tau=2 -> 1/3
    double tau = 2;
    auto e = integrate_1d(
        [&](double th) { return std::sin(th) / std::pow(tau * tau - 2 * tau * std::cos(th) + 1, 1.5); },
        0, M_PI, Weight::none(), QuadSpec{});
    CHECK(std::abs(e.value - 1.0 / 3) < 1e-12);
}

TEST_CASE("philox known answer") {
    auto r = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(r[0] == 0x6627e8d5u);
    CHECK(r[1] == 0xe169c58du);
    CHECK(r[2] == 0xbc57ac4cu);
    CHECK(r[3] == 0x9b00dbd8u);
}

TEST_CASE("streams are deterministic and splittable") {
    RngStream a{42, 7, 0}, b{42, 8, 0};
    std::vector<double> sa, sb, ia, ib;
    RngStream x = a, y = b;
    for (int i = 0; i < 100; ++i) {
        auto [u, nx] = next_uniform(x);
        sa.push_back(u);
        x = nx;
    }
    for (int i = 0; i < 100; ++i) {
        auto [u, ny] = next_uniform(y);
        sb.push_back(u);
        y = ny;
    }
    x = a;
    y = b;
    for (int i = 0; i < 100; ++i) {  // interleaved
        auto [u, nx] = next_uniform(x);
        ia.push_back(u);
        x = nx;
        auto [v, ny] = next_uniform(y);
        ib.push_back(v);
        y = ny;
    }
    CHECK(sa == ia);
    CHECK(sb == ib);
    CHECK(sa != sb);
    auto again = next_uniform(a).first;
    CHECK(again == sa[0]);
}

TEST_CASE("uniform and direction moments") {
    RngCursor c({7, 0, 0});
    const int N = 1000000;
    double m = 0;
    for (int i = 0; i < N; ++i) m += c.uniform();
    m /= N;
    CHECK(std::abs(m - 0.5) < 3 * (1 / std::sqrt(12.0)) / 1e3);
    double mx = 0, my = 0;
    for (int i = 0; i < N; ++i) {
        Point v = c.unit_vector(2);
        mx += v[0];
        my += v[1];
    }
    double sig = std::sqrt(0.5 / N);
    CHECK(std::abs(mx / N) < 3 * sig);
    CHECK(std::abs(my / N) < 3 * sig);
}

TEST_CASE("parallel blocks are worker-count independent") {
    auto run = [](const char* threads) {
        setenv("NONLOCAL_THREADS", threads, 1);
        std::vector<Welford> w(16);
        parallel_blocks(16, [&](long long b) {
            RngCursor c(substream({3, 0, 0}, static_cast<std::uint64_t>(b)));
            for (int i = 0; i < 1000; ++i) w[b].add(c.uniform());
        });
        Welford tot;
        for (auto& x : w) tot.merge(x);
        return tot.mean;
    };
    double a = run("1"), b = run("4");
    unsetenv("NONLOCAL_THREADS");
    CHECK(a == b);
}
