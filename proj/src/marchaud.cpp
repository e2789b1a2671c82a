#include <algorithm>

#include <boost/math/special_functions/gamma.hpp>

#include "nonlocal/fraccalc.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

namespace {

void check_marchaud(const CausalFunction& phi, double s) {
    FracParams(1, s);
    if (!(phi.holder_exponent > s))
        throw IntegrabilityError("Marchaud derivative needs a Hoelder exponent above s");
}

// int_T^inf e^{-x^2/(4 tau)} tau^{-s-1} dtau  (x = 0: no damping)
double damped_tail(double s, double x, double T) {
    if (x == 0) return std::pow(T, -s) / s;
    double z = x * x / (4 * T);
    return std::pow(4 / (x * x), s) * boost::math::tgamma_lower(s, z);
}

// J(t; x) = int_0^inf e^{-x^2/(4 tau)} (phi(t) - phi(t - tau)) tau^{-s-1} dtau.
// x = 0 is the Marchaud derivative itself; for x > 0,
// U(x, t) = phi(t) - x^{2s} J / c_ext.
Estimate weighted_difference(const CausalFunction& phi, double s, double t, double x,
                             const QuadSpec& spec) {
    spec.validate();
    check_marchaud(phi, s);
    if (x < 0) throw DomainError("extension variable must be positive");
    const bool causal = std::isfinite(phi.a);
    if (causal && t <= phi.a) return {0.0, 0.0, 0, true};
    const double ft = phi(t);
    auto rho = [&](double tau) { return x > 0 ? std::exp(-x * x / (4 * tau)) : 1.0; };

    double T;
    if (causal)
        T = t - phi.a;
    else if (phi.period > 0)
        T = phi.period;
    else
        T = std::max(1.0, x * x);

    std::vector<double> br;
    double near = 1;
    for (double k : phi.kinks)
        if (k < t) {
            br.push_back(t - k);
            near = std::min(near, t - k);
        }
    if (x > 0)
        for (int k = -4; k <= 4; ++k) br.push_back(x * x * std::pow(4.0, k));
    SmallArgFit small([&](double tau) { return (ft - phi(t - tau)) / tau; }, 1e-4 * near, 1);
    br.push_back(small.rc);
    QuadOptions o;
    for (double b : br)
        if (b > 0 && b < T) o.breakpoints.push_back(b);
    std::sort(o.breakpoints.begin(), o.breakpoints.end());

    QuadSpec q = spec.tightened(0.1);
    auto head = quad(
        [&](double tau) {
            double d = tau < small.rc ? small(tau) : (ft - phi(t - tau)) / tau;
            return rho(tau) * d;
        },
        0, T, Weight::left_power(-s), q, o);
    Estimate out{head.value, head.error, head.evaluations, head.converged};

    if (causal) {
        out.value += (ft - phi(phi.a)) * damped_tail(s, x, T);
    } else if (phi.period > 0) {
        const double P = phi.period;
        double m = quad([&](double u) { return phi(u); }, 0, P, Weight::none(), q).value / P;
        auto chunk = [&](double lo, double hi) {
            auto r = quad(
                [&](double tau) { return rho(tau) * (phi(t - tau) - m) * std::pow(tau, -s - 1); }, lo,
                hi, Weight::none(), q);
            out.samples_or_nodes += r.evaluations;
            return r.value;
        };
        auto tail = oscillatory_tail(chunk, T, 0.5 * P, spec.abs_tol);
        out.value += (ft - m) * damped_tail(s, x, T) - tail.value;
        out.converged = out.converged && tail.converged;
    } else {
        QuadOptions to;
        to.decay = 1 + s;
        to.tail_scale = T;
        auto tail = quad([&](double tau) { return rho(tau) * (ft - phi(t - tau)) * std::pow(tau, -s - 1); },
                         T, kInf, Weight::none(), q, to);
        out.value += tail.value;
        out.samples_or_nodes += tail.evaluations;
        out.converged = out.converged && tail.converged;
    }
    return out;
}

CausalFunction reflect(const CausalFunction& f) {
    CausalFunction r;
    Fn1 e = f.evaluate, d = f.derivative;
    double a = f.a;
    r.evaluate = [e, a](double t) { return e(-t < a ? a : -t); };
    if (d) r.derivative = [d, a](double t) { return -t < a ? 0.0 : -d(-t); };
    r.holder_exponent = f.holder_exponent;
    r.bound = f.bound;
    r.period = f.period;
    for (double k : f.kinks) r.kinks.push_back(-k);
    if (std::isfinite(a)) r.kinks.push_back(-a);
    return r;
}

}  // namespace

Estimate marchaud_derivative(const CausalFunction& phi, double s, double t, bool normalized,
                             const QuadSpec& spec) {
    auto e = weighted_difference(phi, s, t, 0, spec);
    return normalized ? e.scaled(s / gamma(1 - s)) : e;
}

Estimate marchaud_derivative_right(const CausalFunction& phi, double s, double t, bool normalized,
                                   const QuadSpec& spec) {
    return marchaud_derivative(reflect(phi), s, -t, normalized, spec);
}

MarchaudExtension::MarchaudExtension(CausalFunction f, double s_) : base(std::move(f)), s(s_) {
    FracParams(1, s);
    c_ext = std::pow(4.0, s) * gamma(s);
}

MarchaudExtension MarchaudExtension::reflected() const { return {reflect(base), s}; }

double marchaud_kernel(double s, double x, double t) {
    if (!(t > 0)) return 0.0;
    return std::pow(x, 2 * s) * std::exp(-x * x / (4 * t)) * std::pow(t, -s - 1) /
           (std::pow(4.0, s) * gamma(s));
}

Estimate marchaud_kernel_mass(double s, double x, const QuadSpec& spec) {
    spec.validate();
    FracParams(1, s);
    if (!(x > 0)) throw DomainError("kernel mass needs x > 0");
    const double T = x * x;
    QuadOptions o;
    for (int k = -6; k < 0; ++k) o.breakpoints.push_back(T * std::pow(4.0, k));
    auto head = quad([&](double t) { return marchaud_kernel(s, x, t); }, 0, T, Weight::none(), spec, o);
    QuadOptions to;
    to.decay = 1 + s;
    to.tail_scale = T;
    auto tail = quad([&](double t) { return marchaud_kernel(s, x, t); }, T, kInf, Weight::none(), spec, to);
    return {head.value + tail.value, head.error + tail.error, head.evaluations + tail.evaluations,
            head.converged && tail.converged};
}

Estimate marchaud_extend(const MarchaudExtension& ext, double x, double t, const QuadSpec& spec) {
    if (!(x > 0)) throw DomainError("extension is evaluated at x > 0");
    auto J = weighted_difference(ext.base, ext.s, t, x, spec);
    if (!J.converged) throw NonConvergence("extension integral did not converge");
    double c = std::pow(x, 2 * ext.s) / ext.c_ext;
    return {ext.base(t) - c * J.value, c * J.std_error, J.samples_or_nodes, true};
}

Estimate marchaud_extend_gamma(const MarchaudExtension& ext, double x, double t, const QuadSpec& spec) {
    spec.validate();
    if (!(x > 0)) throw DomainError("extension is evaluated at x > 0");
    const auto& phi = ext.base;
    if (phi.period > 0) throw DomainError("Gamma-weighted form is not used for periodic data");
    const double s = ext.s, W = 60;
    auto arg = [&](double w) { return t - x * x / (4 * w); };
    double v = 0;
    long long ev = 0;
    bool ok = true;
    double w0 = 0;
    if (std::isfinite(phi.a)) {
        // phi(t - x^2/(4w)) = phi(a) for w below w0
        w0 = t > phi.a ? x * x / (4 * (t - phi.a)) : kInf;
        double lower = std::isfinite(w0) ? boost::math::tgamma_lower(s, w0) : gamma(s);
        v += phi(phi.a) * lower;
    }
    if (w0 < W) {
        QuadOptions o;
        for (double k : phi.kinks)
            if (k < t) {
                double w = x * x / (4 * (t - k));
                if (w > w0 && w < W) o.breakpoints.push_back(w);
            }
        std::sort(o.breakpoints.begin(), o.breakpoints.end());
        auto f = [&](double w) { return std::exp(-w) * phi(arg(w)); };
        QuadResult r;
        if (w0 == 0)
            r = quad(f, 0, W, Weight::left_power(s - 1), spec, o);
        else
            r = quad([&](double w) { return f(w) * std::pow(w, s - 1); }, w0, W, Weight::none(), spec, o);
        v += r.value;
        ev += r.evaluations;
        ok = r.converged;
    }
    return {v / gamma(s), 0.0, ev, ok};
}

std::vector<double> default_trace_grid() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4}; }

Estimate marchaud_trace(const MarchaudExtension& ext, double t, const std::vector<double>& x_grid,
                        const QuadSpec& spec, double plateau_tol, std::vector<double>* values) {
    if (x_grid.size() < 2) throw DomainError("trace needs at least two grid points");
    for (size_t i = 0; i < x_grid.size(); ++i) {
        if (!(x_grid[i] > 0 && x_grid[i] <= 1)) throw DomainError("trace grid must lie in (0, 1]");
        if (i > 0 && !(x_grid[i] < x_grid[i - 1])) throw DomainError("trace grid must decrease");
    }
    std::vector<double> v;
    Estimate last;
    bool ok = true;
    long long ev = 0;
    for (double x : x_grid) {
        last = weighted_difference(ext.base, ext.s, t, x, spec);
        v.push_back(last.value);
        ok = ok && last.converged;
        ev += last.samples_or_nodes;
    }
    if (values) *values = v;
    // J(x) - J(0) ~ A x^p with p = 2(gamma - s) for Hoelder exponent gamma;
    // one Richardson step per consecutive pair removes that term.
    const double p = 2 * (std::min(ext.base.holder_exponent, 1.0) - ext.s);
    std::vector<double> e;
    for (size_t k = 1; k < v.size(); ++k) {
        double q = std::pow(x_grid[k - 1] / x_grid[k], p);
        e.push_back(v[k] + (v[k] - v[k - 1]) / (q - 1));
    }
    if (e.size() < 2) return {e.back(), std::abs(e.back() - v.back()), ev, ok};
    double step = std::abs(e.back() - e[e.size() - 2]);
    if (!(step < plateau_tol)) throw NoPlateau("trace has not settled on the grid");
    return {e.back(), step, ev, ok};
}

}  // namespace nonlocal
