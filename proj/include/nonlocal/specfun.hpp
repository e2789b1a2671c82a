#pragma once

#include "nonlocal/core.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

double gamma(double x);
double rgamma(double x);  // 1/Gamma, zero at the poles
double beta(double x, double y);
double pochhammer(double q, int k);
double hyp2f1(double a, double b, double c, double w);

struct ConstantTable {
    double C;         // fractional Laplacian constant
    double c_kernel;  // Poisson / s-mean kernel constant
    double a_fund;    // fundamental solution constant
    double k_ns;      // Gamma(n/2) / (Gamma(n/2 - s) Gamma(s)); kappa = a_fund * k_ns off n = 2s
    double kappa;     // Green function constant
    double omega_n;   // measure of S^{n-1}
};

ConstantTable constants(const FracParams& p);
double omega(int n);
bool is_log_case(const FracParams& p);  // (n, s) == (1, 1/2)

// Integral of t^{2s-2} sin t over (0, inf) by half-period summation; the
// returned Estimate carries the alternating-tail bound in std_error.
Estimate oscillatory_gamma_check(double s, const QuadSpec& spec = {});
double oscillatory_gamma_closed(double s);

// Integral over R^n of (1 - cos w_1)/|w|^{n+2s}, split into the unit ball
// and its complement (n <= 3).  Equals 1/C(n,s).
Estimate symbol_integral(const FracParams& p, const QuadSpec& spec = {});

}  // namespace nonlocal
