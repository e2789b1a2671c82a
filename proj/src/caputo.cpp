#include <algorithm>

#include "nonlocal/fraccalc.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

double CausalFunction::deriv(double t) const {
    if (t < a) return 0.0;
    if (derivative) return derivative(t);
    double h = 1e-6 * std::max(1.0, std::abs(t));
    if (t - h < a) return (evaluate(t + h) - evaluate(t)) / h;
    return (evaluate(t + h) - evaluate(t - h)) / (2 * h);
}

CausalFunction causal(Fn1 f, double a, Fn1 df) {
    CausalFunction c;
    c.a = a;
    c.evaluate = std::move(f);
    c.derivative = std::move(df);
    return c;
}

CausalFunction cosine_function() {
    CausalFunction c;
    c.evaluate = [](double t) { return std::cos(t); };
    c.derivative = [](double t) { return -std::sin(t); };
    c.bound = 1;
    c.period = 2 * kPi;
    return c;
}

CausalFunction exponential_function() {
    CausalFunction c;
    c.evaluate = [](double t) { return std::exp(t); };
    c.derivative = [](double t) { return std::exp(t); };
    return c;
}

CausalFunction example_linear_data() {
    CausalFunction c;
    c.a = 0;
    c.evaluate = [](double t) { return t; };
    c.derivative = [](double t) { return t < 0 ? 0.0 : 1.0; };
    c.bound = 1;
    return c;
}

CausalFunction example_quadratic_data() {
    CausalFunction c;
    c.a = 0;
    c.evaluate = [](double t) {
        if (t < 0) t = 0;
        return t < 0.75 ? (16.0 / 9) * (t - 0.75) * (t - 0.75) : 0.0;
    };
    c.derivative = [](double t) { return (t < 0 || t > 0.75) ? 0.0 : (32.0 / 9) * (t - 0.75); };
    c.bound = 1;
    c.kinks = {0.75};
    return c;
}

namespace {

void check_order(double s) { FracParams(1, s); }

std::vector<double> within(const std::vector<double>& v, double lo, double hi) {
    std::vector<double> o;
    for (double t : v)
        if (t > lo && t < hi) o.push_back(t);
    return o;
}

// Breakpoints on (a, b) that grade towards b when the kernel peaks at t > b.
QuadOptions near_end(const CausalFunction& phi, double a, double b, double t) {
    QuadOptions o;
    o.breakpoints = within(phi.kinks, a, b);
    double d = t - b;
    if (d > 0)
        for (double m = 1; b - m * d > a && m < 1e12; m *= 4) o.breakpoints.push_back(b - m * d);
    std::sort(o.breakpoints.begin(), o.breakpoints.end());
    return o;
}

void check_interval(double a, double b) {
    if (!std::isfinite(a) || !(b > a)) throw DomainError("need a finite initial point a < b");
}

}  // namespace

Estimate caputo_derivative(const CausalFunction& u, double s, double x, const QuadSpec& spec) {
    spec.validate();
    check_order(s);
    if (!std::isfinite(u.a)) throw DomainError("Caputo derivative needs a finite initial point");
    if (!(x > u.a)) throw DomainError("Caputo derivative needs x > a");
    QuadOptions o;
    o.breakpoints = within(u.kinks, u.a, x);
    for (const auto& sg : u.derivative_singularities) {
        if (sg.exponent <= -1) throw IntegrabilityError("derivative is not integrable");
        if (sg.at > u.a && sg.at < x) o.singularities.push_back(sg);
    }
    auto r = quad([&](double t) { return u.deriv(t); }, u.a, x, Weight::right_power(-s), spec, o);
    return {r.value / gamma(1 - s), r.error, r.evaluations, r.converged};
}

double caputo_g(const CausalFunction& phi, double a, double b, double s, double t,
                const QuadSpec& spec) {
    check_interval(a, b);
    if (t < b) throw DomainError("g is defined for t >= b");
    QuadSpec q = spec.tightened(0.01);
    auto dphi = [&](double tau) { return phi.deriv(tau); };
    if (t == b) {
        QuadOptions o;
        o.breakpoints = within(phi.kinks, a, b);
        return -quad(dphi, a, b, Weight::right_power(-s), q, o).value;
    }
    auto r = quad([&](double tau) { return dphi(tau) * std::pow(t - tau, -s); }, a, b, Weight::none(),
                  q, near_end(phi, a, b, t));
    return -r.value;
}

Estimate caputo_extend(const CausalFunction& phi, double a, double b, double s, double x,
                       const QuadSpec& spec) {
    spec.validate();
    check_order(s);
    check_interval(a, b);
    if (x <= b) return {phi(x), 0.0, 0, true};
    QuadSpec q = spec.tightened(0.1);
    long long evals = 0;
    auto r = quad(
        [&](double t) {
            ++evals;
            return caputo_g(phi, a, b, s, t, q);
        },
        b, x, Weight::right_power(s - 1), spec);
    if (!r.converged) throw NonConvergence("Caputo representation integral did not converge");
    double c = std::sin(kPi * s) / kPi;
    return {phi(b) + c * r.value, c * r.error, evals, true};
}

CausalFunction caputo_extension(const CausalFunction& phi, double a, double b, double s,
                                const QuadSpec& spec) {
    check_order(s);
    check_interval(a, b);
    const double c = std::sin(kPi * s) / kPi;
    const double gb = caputo_g(phi, a, b, s, b, spec);
    CausalFunction u;
    u.a = a;
    u.bound = phi.bound;
    u.evaluate = [=](double t) { return t <= b ? phi(t) : caputo_extend(phi, a, b, s, t, spec).value; };
    // Differentiating the representation and integrating the inner kernel in
    // closed form: u'(t) = -c (t-b)^{s-1} int_a^b phi'(y) (b-y)^{1-s} / (t-y) dy.
    u.derivative = [=](double t) {
        if (t <= b) return phi.deriv(t);
        QuadOptions o = near_end(phi, a, b, t);
        auto r = quad([&](double y) { return phi.deriv(y) / (t - y); }, a, b, Weight::right_power(1 - s),
                      spec.tightened(0.1), o);
        return -c * std::pow(t - b, s - 1) * r.value;
    };
    u.kinks = phi.kinks;
    u.kinks.push_back(b);
    if (gb != 0) u.derivative_singularities.push_back({b, s - 1});
    u.holder_exponent = std::min(phi.holder_exponent, s);
    return u;
}

CaputoKappa caputo_kappa(const CausalFunction& psi0, double s, const QuadSpec& spec) {
    check_order(s);
    double g1 = caputo_g(psi0, 0, 1, s, 1, spec);
    return {std::sin(kPi * s) / (kPi * s) * g1, g1 / s};
}

void CaputoSequenceParams::validate() const {
    check_order(s);
    if (j < 1) throw DomainError("sequence index must be a positive integer");
    if (!(kappa > 0)) throw DomainError("sequence limit constant must be positive");
    if (psi0.a != 0) throw DomainError("psi0 must start at 0");
}

CaputoSequenceParams make_sequence_params(const CausalFunction& psi0, double s, int j,
                                          const QuadSpec& spec) {
    CaputoSequenceParams p;
    p.psi0 = psi0;
    p.s = s;
    p.j = j;
    p.kappa = caputo_kappa(psi0, s, spec).limit;
    p.validate();
    return p;
}

double caputo_sequence(const CaputoSequenceParams& p, double x, const QuadSpec& spec) {
    p.validate();
    if (!(x > 0)) throw DomainError("sequence is evaluated at x > 0");
    double j = p.j;
    return std::pow(j, p.s) * caputo_extend(p.psi0, 0, 1, p.s, x / j + 1, spec).value;
}

}  // namespace nonlocal
