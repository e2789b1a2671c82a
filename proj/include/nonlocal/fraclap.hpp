#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "nonlocal/core.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

// A function on R^n with the metadata the integral evaluators need.
// |f(x)| <= K (1 + |x|)^growth.  Non-smooth loci are listed so that
// quadrature can place breakpoints on them: `kinks` are points (n = 1) and
// `kink_spheres` are spheres {|y - c| = R}.
struct ScalarField {
    enum Smoothness { C2Local, Holder };

    FnN eval;
    int n = 1;
    double growth = 0;
    Smoothness smoothness = C2Local;
    double holder = 1;
    double support_radius = std::numeric_limits<double>::infinity();
    bool integrable = false;  // f in L^1(R^n); lets the heat tail decay like t^{-n/2}
    std::vector<double> kinks;
    std::vector<std::pair<Point, double>> kink_spheres;
    // Integrable point singularities |y - p|^e (e = 0 marks a logarithm).
    std::vector<std::pair<Point, double>> singular_points;

    double operator()(const Point& x) const { return eval(x); }
    double at(double x) const { return eval({x, 0, 0}); }
};

ScalarField constant_field(double c, int n = 1);
ScalarField gaussian_field(int n = 1);               // exp(-pi |x|^2)
ScalarField ball_power_field(double s, int n = 1);   // (1 - |x|^2)_+^s
ScalarField positive_power_field(double s);          // x_+^s, n = 1
ScalarField field_1d(Fn1 f, double growth = 0);

// Radii r > 0 at which x + r th or x - r th meets a listed kink of f.
std::vector<double> kink_radii(const ScalarField& f, const Point& x, const Point& th);

// (C(n,s)/2) int (2f(x) - f(x+y) - f(x-y)) |y|^{-n-2s} dy
Estimate frac_laplacian_si(const ScalarField& f, const Point& x, const FracParams& p,
                           const QuadSpec& spec = {});

// Heat-kernel convolution U(x,t) for dU/dt = Laplacian U.
double heat_extension(const ScalarField& f, const Point& x, double t, const QuadSpec& spec = {});

// (1/Gamma(-s)) int_0^inf t^{-s-1} (U(x,t) - f(x)) dt
Estimate frac_laplacian_semigroup(const ScalarField& f, const Point& x, const FracParams& p,
                                  const QuadSpec& spec = {});

// Fractional Laplacian of x_+^s in one dimension: 0 for x > 0 and
// -c_s |x|^{-s} for x < 0, with c_s computed once per s.
double ws_constant(double s);
double ws_reference(double x, double s);

}  // namespace nonlocal
