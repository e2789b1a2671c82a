#pragma once

#include "nonlocal/core.hpp"
#include "nonlocal/fraclap.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

// Ball of radius r centred at the origin.
struct BallGeometry {
    double r = 1;
    FracParams p;

    BallGeometry() = default;
    BallGeometry(double r_, FracParams p_) : r(r_), p(p_) {
        if (!(r > 0)) throw DomainError("ball radius must be positive");
    }
};

double phi(const Point& x, const FracParams& p);
double mean_kernel(const Point& y, double r, const FracParams& p);                 // A_r(y)
double poisson_kernel(const Point& y, const Point& x, double r, const FracParams& p);  // P_r(y,x)
double green_r0(const Point& x, const Point& z, double r, int n);
double green(const BallGeometry& g, const Point& x, const Point& z, const QuadSpec& spec = {});

// Phi(y - centre) as a field, with its singular point recorded.
ScalarField phi_field(const FracParams& p, const Point& centre = {});

// int_{|y|>r} P_r(y,x) g(y) dy; values of g inside the ball are ignored.
Estimate solve_dirichlet(const ScalarField& g, const BallGeometry& geom, const Point& x,
                         const QuadSpec& spec = {});
// int_{B_r} h(y) G(x,y) dy
Estimate solve_poisson(const ScalarField& h, const BallGeometry& geom, const Point& x,
                       const QuadSpec& spec = {});
// int_{|y|>rho} A_rho(y) u(x - y) dy
Estimate s_mean(const ScalarField& u, const Point& x, double rho, const FracParams& p,
                const QuadSpec& spec = {});
// c(n,s) int_{B_r} (r^2 - |y|^2)^{-s} |x - y|^{2s-n} dy, equal to 1 inside the ball.
Estimate ball_riesz_mass(const BallGeometry& geom, const Point& x, const QuadSpec& spec = {});

}  // namespace nonlocal
