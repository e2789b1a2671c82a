#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>

#include "nonlocal/errors.hpp"

namespace nonlocal {

inline constexpr double kPi = std::numbers::pi;

// Points live in R^n with n <= 3; unused trailing components stay zero.
using Point = std::array<double, 3>;

inline double dot(const Point& a, const Point& b, int n) {
    double d = 0;
    for (int i = 0; i < n; ++i) d += a[i] * b[i];
    return d;
}
inline double norm(const Point& a, int n) { return std::sqrt(dot(a, a, n)); }
inline Point axpy(double t, const Point& d, const Point& x) {
    return {x[0] + t * d[0], x[1] + t * d[1], x[2] + t * d[2]};
}
inline Point sub(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Point scale(double t, const Point& a) { return {t * a[0], t * a[1], t * a[2]}; }
inline double dist(const Point& a, const Point& b, int n) { return norm(sub(a, b), n); }

struct FracParams {
    int n = 1;
    double s = 0.5;

    FracParams() = default;
    FracParams(int n_, double s_) : n(n_), s(s_) {
        if (n < 1) throw DomainError("dimension must be >= 1");
        if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order must lie in (0,1)");
    }
};

struct QuadSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    int max_subdivisions = 4000;
    double truncation_radius = 1e3;

    void validate() const {
        if (!(rel_tol > 0 && abs_tol > 0)) throw DomainError("tolerances must be positive");
        if (max_subdivisions < 1) throw DomainError("max_subdivisions must be >= 1");
        if (!(truncation_radius > 0)) throw DomainError("truncation_radius must be positive");
    }
    QuadSpec tightened(double factor) const {
        QuadSpec q = *this;
        q.rel_tol *= factor;
        q.abs_tol *= factor;
        return q;
    }
};

// `stderr` is a macro in <cstdio>, hence std_error.
struct Estimate {
    double value = 0;
    double std_error = 0;
    long long samples_or_nodes = 0;
    bool converged = true;

    Estimate& operator+=(const Estimate& o) {
        value += o.value;
        std_error = std::hypot(std_error, o.std_error);
        samples_or_nodes += o.samples_or_nodes;
        converged = converged && o.converged;
        return *this;
    }
    Estimate scaled(double c) const {
        Estimate e = *this;
        e.value *= c;
        e.std_error *= std::abs(c);
        return e;
    }
};

inline Estimate operator+(Estimate a, const Estimate& b) { return a += b; }

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(const Point&)>;

}  // namespace nonlocal
