#pragma once

#include <optional>
#include <vector>

#include "nonlocal/core.hpp"
#include "nonlocal/geomset.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal {

// I(A, B) = int_A int_B |x - y|^{-1-s}, closed form over interval pairs.
double interaction_1d(const IntervalList& A, const IntervalList& B, double s);

struct PerimeterMethod {
    enum Kind { ClosedForm1D, MonteCarlo };
    Kind kind = ClosedForm1D;
    long long samples = 1'000'000;
    RngStream stream{};
    // Radial proposal below r = 1 is ~ r^{-near}; 0 picks s + 1/2 (capped),
    // which keeps the variance finite for s < 1/2.
    double near = 0;
};

// Per_s(E, Omega) = I(E n Omega, CE) + I(E \ Omega, Omega \ E).
Estimate frac_perimeter(const GeomSet& E, const GeomSet& Omega, double s, const PerimeterMethod& method,
                        const QuadSpec& spec = {});

// E near q as {z > v(t)} in the frame y = q + t*tangent + z*normal (n = 2).
struct LocalGraph {
    Point q{}, tangent{}, normal{};
    Fn1 v, dv;
    double holder = 1;
    double radius = kInfRadius;  // curvature radius used for the default cylinder
    double max_t = kInfRadius;   // v is defined for |t| < max_t
    static constexpr double kInfRadius = 1e300;
};
LocalGraph local_graph(const GeomSet& E, const Point& q);

struct CurvatureQuery {
    Point q{};
    double rho = 0.1;  // PV: largest deleted radius when no grid is given
    double r = 0;      // cylinder half-width; 0 picks 0.25 * curvature radius
    double h = 0;      // cylinder half-height; 0 likewise
    QuadSpec spec{};
};

// G_s(t) = int_0^t (1 + x^2)^{-(n+s)/2} dx
double G_s(double t, int n, double s);

Estimate frac_mean_curvature_graph(const GeomSet& E, double s, const CurvatureQuery& query);

std::vector<double> default_rho_grid();
// Deleted-ball values I_s^rho on a decreasing grid.  Each value is completed
// by the integral over B_rho of a linear fit to the angular defect, and the
// completed values must agree within plateau_tol (relative).
Estimate frac_mean_curvature_pv(const GeomSet& E, const Point& q, double s,
                                const std::vector<double>& rho_grid, const QuadSpec& spec = {},
                                double plateau_tol = 1e-6, std::vector<double>* raw = nullptr);

struct AlphaResult {
    double s_value = 0;
    double s_alpha = 0;  // s * alpha_s(q, r, E)
    double std_error = 0;
    long long samples = 0;
    // 2 v(s/2) - v(s) on the same samples: removes a term linear in s.
    std::optional<double> extrapolated, extrapolated_error;
};
AlphaResult alpha_estimate(const GeomSet& E, double s, long long samples, const RngStream& stream,
                           bool extrapolate = false);
AlphaResult alpha_estimate_at(const GeomSet& E, double s, const Point& q, double r, long long samples,
                              const RngStream& stream, bool extrapolate = false);
// s * alpha_s(q, r, E) by radial quadrature of exact circle sections (n = 2).
double alpha_quadrature(const GeomSet& E, double s, const Point& q, double r, const QuadSpec& spec = {});

struct StickinessParams {
    double alpha_bar = 0;
    double beta = 0;
    int n = 2;
    double delta(double s) const;
};
StickinessParams stickiness_threshold(double alpha_bar, int n);

struct ScalarField1D {
    Fn1 u;
    std::vector<double> breaks;  // jumps or kinks
};
struct CoareaResult {
    double lhs = 0, rhs = 0;
    double lhs_error = 0, rhs_error = 0;
};
CoareaResult coarea_check(const ScalarField1D& u, const GeomSet& Omega, double s, const QuadSpec& spec = {});

struct ScanRow {
    double s = 0;
    Estimate value;
    double s_value = 0;
    double one_minus_s_value = 0;
};
std::vector<ScanRow> asymptotic_scan(const std::function<Estimate(double)>& eval,
                                     const std::vector<double>& s_grid);

}  // namespace nonlocal
