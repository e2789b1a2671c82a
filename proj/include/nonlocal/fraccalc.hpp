#pragma once

#include <limits>
#include <vector>

#include "nonlocal/core.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

// A function on R that is constant before `a` (a = -inf: no such point).
// `derivative` may be empty; central differences are used then.
// `period` > 0 marks a periodic function, which lets the Marchaud tails be
// summed as alternating chunks.  `kinks` are points where the derivative
// jumps; `derivative_singularities` are points where it behaves like
// |t - at|^exponent.
struct CausalFunction {
    double a = -std::numeric_limits<double>::infinity();
    Fn1 evaluate;
    Fn1 derivative;
    double holder_exponent = 1;
    double bound = std::numeric_limits<double>::infinity();
    double period = 0;
    std::vector<double> kinks;
    std::vector<Singularity> derivative_singularities;

    double operator()(double t) const { return evaluate(t < a ? a : t); }
    double deriv(double t) const;
};

CausalFunction causal(Fn1 f, double a, Fn1 df = {});
CausalFunction cosine_function();       // cos t, period 2 pi
CausalFunction exponential_function();  // e^t; bounded on every half-line (-inf, t]

// Initial data of the two worked examples: phi(t) = t on [0, 1] and the
// quadratic psi0 = (16/9)(t - 3/4)^2 on [0, 3/4], 0 on [3/4, 1].
CausalFunction example_linear_data();
CausalFunction example_quadratic_data();

// (1/Gamma(1-s)) int_a^x u'(t) (x-t)^{-s} dt
Estimate caputo_derivative(const CausalFunction& u, double s, double x, const QuadSpec& spec = {});

// g(t) = -int_a^b phi'(tau) (t - tau)^{-s} dtau for t >= b
double caputo_g(const CausalFunction& phi, double a, double b, double s, double t,
                const QuadSpec& spec = {});

// Solution of D_a^s u = 0 on (b, inf) with u = phi on (-inf, b].
Estimate caputo_extend(const CausalFunction& phi, double a, double b, double s, double x,
                       const QuadSpec& spec = {});
// The same solution as a CausalFunction whose derivative on (b, inf) is
// computed from the representation; a derivative singularity sits at b.
CausalFunction caputo_extension(const CausalFunction& phi, double a, double b, double s,
                                const QuadSpec& spec = {});

struct CaputoKappa {
    double limit;    // psi(1 + e) ~ limit * e^s
    double literal;  // beta(1, s) g(1), without the factor sin(pi s)/pi
};
CaputoKappa caputo_kappa(const CausalFunction& psi0, double s, const QuadSpec& spec = {});

struct CaputoSequenceParams {
    CausalFunction psi0;
    double s = 0.5;
    int j = 1;
    double kappa = 0;  // filled by make_sequence_params with the limit value

    void validate() const;
};
CaputoSequenceParams make_sequence_params(const CausalFunction& psi0, double s, int j,
                                          const QuadSpec& spec = {});
// v_j(x) = j^s psi(x/j + 1)
double caputo_sequence(const CaputoSequenceParams& p, double x, const QuadSpec& spec = {});

// Left Marchaud derivative int_0^inf (phi(t) - phi(t - tau)) tau^{-s-1} dtau,
// times s/Gamma(1-s) when normalized.
Estimate marchaud_derivative(const CausalFunction& phi, double s, double t, bool normalized,
                             const QuadSpec& spec = {});
// Right derivative int_0^inf (phi(t) - phi(t + tau)) tau^{-s-1} dtau.
Estimate marchaud_derivative_right(const CausalFunction& phi, double s, double t, bool normalized,
                                   const QuadSpec& spec = {});

struct MarchaudExtension {
    CausalFunction base;
    double s = 0.5;
    double c_ext = 0;

    MarchaudExtension() = default;
    MarchaudExtension(CausalFunction f, double s_);
    // phi(-t): its extension is U(x, -t).
    MarchaudExtension reflected() const;
};

// Psi_s(x, t) = x^{2s} e^{-x^2/(4t)} t^{-s-1} / c_ext for t > 0, else 0.
double marchaud_kernel(double s, double x, double t);
Estimate marchaud_kernel_mass(double s, double x, const QuadSpec& spec = {});

// U(x, t) = int Psi_s(x, tau) phi(t - tau) dtau
Estimate marchaud_extend(const MarchaudExtension& ext, double x, double t, const QuadSpec& spec = {});
// The same through the Gamma-weighted variable w = x^2/(4 tau).  Only for
// functions without a period; the oscillation piles up at w = 0 otherwise.
Estimate marchaud_extend_gamma(const MarchaudExtension& ext, double x, double t,
                               const QuadSpec& spec = {});

// -c_ext x^{-2s} (U(x,t) - phi(t)) along a decreasing grid; the value at the
// last grid point is returned once the last two values agree within
// `plateau_tol`.  `values` receives the whole sequence when non-null.
std::vector<double> default_trace_grid();
Estimate marchaud_trace(const MarchaudExtension& ext, double t, const std::vector<double>& x_grid,
                        const QuadSpec& spec = {}, double plateau_tol = 1e-3,
                        std::vector<double>* values = nullptr);

}  // namespace nonlocal
