#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "nonlocal/core.hpp"

namespace nonlocal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Weight w(t) multiplying the integrand.  left_power: (t-a)^alpha,
// right_power: (b-t)^alpha, jacobi: (t-a)^alpha (b-t)^beta,
// laguerre: (t-a)^alpha e^{-(t-a)} on [a, inf).
struct Weight {
    enum Kind { None, LeftPower, RightPower, Jacobi, Laguerre };
    Kind kind = None;
    double alpha = 0;
    double beta = 0;

    static Weight none() { return {}; }
    static Weight left_power(double a) { return {LeftPower, a, 0}; }
    static Weight right_power(double a) { return {RightPower, a, 0}; }
    static Weight jacobi(double a, double b) { return {Jacobi, a, b}; }
    static Weight laguerre(double a) { return {Laguerre, a, 0}; }
};

// An algebraic singularity |t - at|^exponent that is part of f itself.
// Panels touching `at` divide it out and use it as a Gauss-Jacobi weight.
struct Singularity {
    double at;
    double exponent;
};

struct QuadOptions {
    std::vector<double> breakpoints;
    std::vector<Singularity> singularities;
    // For b = inf: f(t) ~ t^{-decay}.  The tail [c, inf) is mapped to (0, 1]
    // by t = c + L(1/u - 1) and u^{decay-2} is used as the endpoint weight.
    double decay = 2.0;
    double tail_scale = 1.0;
};

struct QuadResult {
    double value = 0;
    double error = 0;
    long long evaluations = 0;
    int panels = 0;
    bool converged = true;
};

QuadResult quad(const Fn1& f, double a, double b, const Weight& w, const QuadSpec& spec,
                const QuadOptions& opt = {});

// Convenience wrapper returning the shared Estimate record (std_error = 0).
Estimate integrate_1d(const Fn1& f, double a, double b, const Weight& w, const QuadSpec& spec,
                      const QuadOptions& opt = {});

// q(r) ~ A + B r^k below rc, fitted from q(rc) and q(2 rc).  Difference
// quotients such as (f(x) - f(x - r))/r lose their digits as r -> 0.
struct SmallArgFit {
    double rc, A, B;
    int k;
    SmallArgFit(const std::function<double(double)>& q, double rc_, int k_) : rc(rc_), k(k_) {
        double q1 = q(rc), q2 = q(2 * rc), m = std::pow(2.0, k);
        A = (m * q1 - q2) / (m - 1);
        B = (q2 - q1) / ((m - 1) * std::pow(rc, k));
    }
    double operator()(double r) const { return A + B * std::pow(r, k); }
};

// Gauss-Jacobi rule on [-1,1] for (1-x)^a (1+x)^b, cached.
struct Rule {
    std::vector<double> x, w;
};
const Rule& gauss_jacobi(int npts, double a, double b);

// Sum of an integral over [a, inf) split into chunks of length `half_period`,
// accelerated with the Wynn epsilon algorithm.  `chunk` integrates one chunk.
struct OscTail {
    double value = 0;
    double error = 0;
    int chunks = 0;
    bool converged = true;
};
OscTail oscillatory_tail(const std::function<double(double, double)>& chunk, double a,
                         double half_period, double tol, int max_chunks = 400);

// Multi-dimensional regions integrated by iterated adaptive quadrature in
// polar coordinates around `center` (n <= 3).
struct NdRegion {
    enum Kind { Shell, Box, BallComplement };
    Kind kind = Shell;
    int n = 1;
    Point center{};
    double r_in = 0;
    double r_out = 1;
    Point lo{}, hi{};
    // Radial singular exponents at r_in / r_out that are part of f.
    double inner_exponent = 0;
    double outer_exponent = 0;
    // BallComplement: f(center + r theta) r^{n-1} ~ r^{-(decay)}.
    double decay = 2.0;
};

Estimate integrate_nd(const FnN& f, const NdRegion& region, const QuadSpec& spec);

// Integral over the sphere S^{n-1} of g(theta), n in {1,2,3}.
// n = 1 sums the two points.  `theta_breaks` are extra azimuthal breakpoints.
double sphere_integral(const std::function<double(const Point&)>& g, int n,
                       const QuadSpec& spec, const std::vector<double>& theta_breaks = {},
                       bool* converged = nullptr);

}  // namespace nonlocal
