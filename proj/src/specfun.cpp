#include "nonlocal/specfun.hpp"

#include <array>

namespace nonlocal {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }

// sin(pi x) with exact zeros at the integers.
double sinpi(double x) {
    double k = std::nearbyint(x);
    double d = x - k;  // exact
    if (d == 0) return 0.0;
    double v = std::sin(kPi * d);
    return std::fmod(k, 2.0) == 0 ? v : -v;
}

double gamma_pos(double x) {  // x >= 0.5
    double z = x - 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + i);
    double t = z + kLanczosG + 0.5;
    return std::sqrt(2 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

double series_2f1(double a, double b, double c, double w) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 200000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > 2) return sum;
    }
    throw NonConvergence("hypergeometric series did not converge");
}

}  // namespace

double gamma(double x) {
    if (std::isnan(x)) return x;
    if (nonpositive_integer(x)) throw PoleError("Gamma has a pole at a nonpositive integer");
    if (x < 0.5) return kPi / (sinpi(x) * gamma_pos(1.0 - x));
    if (x == std::floor(x) && x <= 21) {
        double f = 1;
        for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
        return f;
    }
    return gamma_pos(x);
}

double rgamma(double x) {
    if (nonpositive_integer(x)) return 0.0;
    return 1.0 / gamma(x);
}

double beta(double x, double y) {
    if (!(x > 0 && y > 0)) throw DomainError("beta requires positive arguments");
    if (x + y > 170) return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
    return gamma(x) * gamma(y) / gamma(x + y);
}

double pochhammer(double q, int k) {
    if (k < 0) throw DomainError("pochhammer index must be nonnegative");
    double p = 1;
    for (int i = 0; i < k; ++i) p *= q + i;
    return p;
}

double hyp2f1(double a, double b, double c, double w) {
    if (a == 0 || b == 0) return 1.0;
    if (nonpositive_integer(c)) {
        // allowed only when the series terminates before the pole
        bool ta = nonpositive_integer(a) && a > c;
        bool tb = nonpositive_integer(b) && b > c;
        if (!ta && !tb) throw DomainError("c is a nonpositive integer");
        return series_2f1(a, b, c, w);
    }
    if (nonpositive_integer(a) || nonpositive_integer(b)) return series_2f1(a, b, c, w);
    if (w > 1) throw DomainError("hyp2f1 argument above 1");
    if (w == 1) {
        if (c - a - b <= 0) throw DomainError("hyp2f1 diverges at w = 1");
        return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b);
    }
    if (std::abs(w) <= 0.5) return series_2f1(a, b, c, w);
    if (w < -0.5) return std::pow(1 - w, -a) * hyp2f1(a, c - b, c, w / (w - 1));
    // 0.5 < w < 1
    double d = c - a - b;
    if (d == std::floor(d)) {
        // connection formula degenerates; the direct series still converges here
        if (w > 0.995) throw DomainError("hyp2f1 with integer c - a - b too close to w = 1");
        return series_2f1(a, b, c, w);
    }
    double t1 = gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b);
    double t2 = gamma(c) * gamma(-d) * rgamma(a) * rgamma(b);
    double v = 0;
    if (t1 != 0) v += t1 * series_2f1(a, b, 1 - d, 1 - w);
    if (t2 != 0) v += t2 * std::pow(1 - w, d) * series_2f1(c - a, c - b, 1 + d, 1 - w);
    return v;
}

double omega(int n) {
    if (n < 1) throw DomainError("dimension must be >= 1");
    return 2.0 * std::pow(kPi, 0.5 * n) / gamma(0.5 * n);
}

bool is_log_case(const FracParams& p) { return p.n == 1 && p.s == 0.5; }

ConstantTable constants(const FracParams& p) {
    const double n = p.n, s = p.s;
    const double pn2 = std::pow(kPi, 0.5 * n);
    ConstantTable t{};
    t.C = std::pow(2.0, 2 * s) * s * gamma(0.5 * n + s) / (pn2 * gamma(1 - s));
    t.c_kernel = gamma(0.5 * n) * std::sin(kPi * s) / (pn2 * kPi);
    t.omega_n = omega(p.n);
    if (is_log_case(p)) {
        t.a_fund = -1.0 / kPi;
        t.k_ns = 0.0;
        t.kappa = 1.0 / kPi;
    } else {
        t.a_fund = gamma(0.5 * n - s) / (std::pow(2.0, 2 * s) * pn2 * gamma(s));
        t.k_ns = gamma(0.5 * n) * rgamma(0.5 * n - s) / gamma(s);
        double gs = gamma(s);
        t.kappa = gamma(0.5 * n) / (std::pow(2.0, 2 * s) * pn2 * gs * gs);
    }
    return t;
}

double oscillatory_gamma_closed(double s) {
    if (s == 0.5) return kPi / 2;
    return -std::cos(kPi * s) * gamma(2 * s - 1);
}

Estimate oscillatory_gamma_check(double s, const QuadSpec& spec) {
    if (!(s > 0 && s <= 0.5)) throw DomainError("oscillatory check needs s in (0, 1/2]");
    QuadSpec sp = spec.tightened(0.01);
    // first half period: t^{2s-1} * (sin t / t)
    auto head = quad([](double t) { return t == 0 ? 1.0 : std::sin(t) / t; }, 0, kPi,
                     Weight::left_power(2 * s - 1), sp);
    long long evals = head.evaluations;
    bool ok = head.converged;
    auto chunk = [&](double lo, double hi) {
        auto r = quad([&](double t) { return std::pow(t, 2 * s - 2) * std::sin(t); }, lo, hi,
                      Weight::none(), sp);
        evals += r.evaluations;
        ok = ok && r.converged;
        return r.value;
    };
    OscTail tail = oscillatory_tail(chunk, kPi, kPi, std::max(spec.abs_tol, 1e-13));
    if (!tail.converged) throw NonConvergence("oscillatory tail did not settle");
    return {head.value + tail.value, 0.0, evals, ok};
}

Estimate symbol_integral(const FracParams& p, const QuadSpec& spec) {
    const double s = p.s;
    const int n = p.n;
    if (n > 3) throw UnsupportedDimension("symbol integral implemented for n <= 3");
    QuadSpec sp = spec.tightened(0.01);
    long long evals = 0;
    bool ok = true;
    // Tail constant T = int_pi^inf cos(w) w^{-1-2s} dw, shared by all directions.
    auto chunk = [&](double lo, double hi) {
        auto r = quad([&](double w) { return std::cos(w) * std::pow(w, -1 - 2 * s); }, lo, hi,
                      Weight::none(), sp);
        evals += r.evaluations;
        return r.value;
    };
    OscTail tail = oscillatory_tail(chunk, kPi, kPi, 1e-15);
    ok = ok && tail.converged;
    // Per direction with |theta_1| = c:
    //   ball part      int_0^1 (1 - cos(c r)) r^{-1-2s} dr
    //   exterior part  1/(2s) - c^{2s} int_c^inf cos(w) w^{-1-2s} dw
    auto radial = [&](double c) {
        if (c == 0) return 0.0;
        auto in = quad(
            [&](double r) {
                double h = std::sin(0.5 * c * r);
                return r == 0 ? 0.5 * c * c : 2 * h * h / (r * r);
            },
            0, 1, Weight::left_power(1 - 2 * s), sp);
        auto mid = quad([&](double w) { return std::cos(w) * std::pow(w, -1 - 2 * s); }, c, kPi,
                        Weight::none(), sp);
        evals += in.evaluations + mid.evaluations;
        ok = ok && in.converged && mid.converged;
        return in.value + 1.0 / (2 * s) - std::pow(c, 2 * s) * (mid.value + tail.value);
    };
    bool sok = true;
    double v = sphere_integral([&](const Point& th) { return radial(std::abs(th[0])); }, n, spec,
                               {0.5 * kPi, 1.5 * kPi}, &sok);
    return {v, 0.0, evals, ok && sok};
}

}  // namespace nonlocal
