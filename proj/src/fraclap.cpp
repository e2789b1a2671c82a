#include "nonlocal/fraclap.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "nonlocal/specfun.hpp"

namespace nonlocal {

ScalarField constant_field(double c, int n) {
    ScalarField f;
    f.eval = [c](const Point&) { return c; };
    f.n = n;
    return f;
}

ScalarField gaussian_field(int n) {
    ScalarField f;
    f.eval = [n](const Point& x) { return std::exp(-kPi * dot(x, x, n)); };
    f.n = n;
    f.integrable = true;
    return f;
}

ScalarField ball_power_field(double s, int n) {
    ScalarField f;
    f.eval = [s, n](const Point& x) {
        double q = 1 - dot(x, x, n);
        return q > 0 ? std::pow(q, s) : 0.0;
    };
    f.n = n;
    f.support_radius = 1;
    f.integrable = true;
    f.smoothness = ScalarField::Holder;
    f.holder = s;
    if (n == 1)
        f.kinks = {-1, 1};
    else
        f.kink_spheres = {{Point{}, 1.0}};
    return f;
}

ScalarField positive_power_field(double s) {
    ScalarField f;
    f.eval = [s](const Point& x) { return x[0] > 0 ? std::pow(x[0], s) : 0.0; };
    f.growth = s;
    f.smoothness = ScalarField::Holder;
    f.holder = s;
    f.kinks = {0};
    return f;
}

ScalarField field_1d(Fn1 g, double growth) {
    ScalarField f;
    f.eval = [g = std::move(g)](const Point& x) { return g(x[0]); };
    f.growth = growth;
    return f;
}

// Radii r > 0 at which x + r th or x - r th crosses a listed kink.
std::vector<double> kink_radii(const ScalarField& f, const Point& x, const Point& th) {
    std::vector<double> out;
    const int n = f.n;
    if (n == 1)
        for (double k : f.kinks) out.push_back(std::abs(k - x[0]));
    for (const auto& [c, R] : f.kink_spheres) {
        Point d = sub(x, c);
        double b = dot(d, th, n), q = dot(d, d, n) - R * R;
        for (double sg : {1.0, -1.0}) {
            double bb = sg * b, disc = bb * bb - q;
            if (disc < 0) continue;
            double sq = std::sqrt(disc);
            for (double r : {-bb - sq, -bb + sq})
                if (r > 0) out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::remove_if(out.begin(), out.end(), [](double r) { return !(r > 0); }), out.end());
    return out;
}

namespace {

std::vector<double> inside(const std::vector<double>& v, double a, double b) {
    std::vector<double> o;
    for (double t : v)
        if (t > a && t < b) o.push_back(t);
    return o;
}

}  // namespace

Estimate frac_laplacian_si(const ScalarField& f, const Point& x, const FracParams& p,
                           const QuadSpec& spec) {
    spec.validate();
    const int n = p.n;
    const double s = p.s;
    if (f.growth >= 2 * s) throw IntegrabilityError("field grows too fast for the singular integral");
    if (n != f.n) throw DomainError("field dimension does not match parameters");
    const double fx = f(x);
    const double xn = norm(x, n);
    QuadSpec inner = spec.tightened(0.1);
    long long evals = 0;
    bool ok = true;

    auto radial = [&](const Point& th) {
        auto br = kink_radii(f, x, th);
        double R0;
        bool bounded = std::isfinite(f.support_radius);
        if (bounded)
            R0 = xn + f.support_radius;
        else
            R0 = 1 + std::max(xn, br.empty() ? 0.0 : br.back());
        auto S = [&](double r) {
            return 2 * fx - f(axpy(r, th, x)) - f(axpy(-r, th, x));
        };
        QuadOptions o;
        o.breakpoints = inside(br, 0, R0);
        double near = br.empty() ? 1.0 : std::min(1.0, br.front());
        SmallArgFit small([&](double r) { return S(r) / (r * r); }, 1e-3 * near, 2);
        auto head = quad([&](double r) { return r < small.rc ? small(r) : S(r) / (r * r); }, 0, R0,
                         Weight::left_power(1 - 2 * s), inner, o);
        evals += head.evaluations;
        ok = ok && head.converged;
        double v = head.value + 2 * fx * std::pow(R0, -2 * s) / (2 * s);
        if (!bounded) {
            QuadOptions t;
            t.decay = 1 + 2 * s - f.growth;
            t.tail_scale = R0;
            auto tail = quad(
                [&](double r) {
                    return (f(axpy(r, th, x)) + f(axpy(-r, th, x))) * std::pow(r, -1 - 2 * s);
                },
                R0, kInf, Weight::none(), inner, t);
            evals += tail.evaluations;
            ok = ok && tail.converged;
            v -= tail.value;
        }
        return v;
    };
    bool sok = true;
    double J = sphere_integral(radial, n, spec, {}, &sok);
    double C = constants(p).C;
    return {0.5 * C * J, 0.0, evals, ok && sok};
}

namespace {

constexpr double kZmax = 9.0;

std::vector<double> feature_points(const ScalarField& f) {
    std::vector<double> c(f.kinks.begin(), f.kinks.end());
    c.push_back(0.0);
    return c;
}

// Breakpoints in the Gaussian variable z for step h = 2 sqrt(t).
std::vector<double> z_breaks(const ScalarField& f, const Point& x, double h, bool symmetric) {
    std::vector<double> out;
    const int n = f.n;
    std::vector<double> dists;
    if (n == 1)
        for (double c : feature_points(f)) dists.push_back(symmetric ? std::abs(c - x[0]) : c - x[0]);
    else {
        dists.push_back(norm(x, n));
        for (const auto& [c, R] : f.kink_spheres) {
            double d = dist(x, c, n);
            dists.push_back(std::abs(d - R));
            dists.push_back(d + R);
        }
    }
    for (double d : dists)
        for (double off : {0.0, -4.0, -1.0, 1.0, 4.0}) out.push_back((d + off) / h);
    double lo = symmetric ? 0.0 : -kZmax;
    auto v = inside(out, lo, kZmax);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Integral of e^{-|z|^2} g(z) over R^n divided by pi^{n/2}; g given along rays.
double gaussian_average(const ScalarField& f, const Point& x, double h, bool symmetric,
                        const std::function<double(const Point&, double)>& g,
                        const QuadSpec& spec, long long& evals, bool& ok) {
    const int n = f.n;
    if (n == 1) {
        QuadOptions o;
        o.breakpoints = z_breaks(f, x, h, symmetric);
        auto r = quad(
            [&](double z) {
                ++evals;
                return std::exp(-z * z) * g({1, 0, 0}, z);
            },
            symmetric ? 0.0 : -kZmax, kZmax, Weight::none(), spec, o);
        ok = ok && r.converged;
        return r.value / std::sqrt(kPi);
    }
    auto ray = [&](const Point& th) {
        QuadOptions o;
        o.breakpoints = z_breaks(f, x, h, true);
        auto r = quad(
            [&](double rho) {
                ++evals;
                return std::exp(-rho * rho) * std::pow(rho, n - 1) * g(th, rho);
            },
            0, kZmax, Weight::none(), spec, o);
        ok = ok && r.converged;
        return r.value;
    };
    bool sok = true;
    double v = sphere_integral(ray, n, spec, {}, &sok);
    ok = ok && sok;
    return v / std::pow(kPi, 0.5 * n) * (symmetric ? 0.5 : 1.0);
}

}  // namespace

double heat_extension(const ScalarField& f, const Point& x, double t, const QuadSpec& spec) {
    if (!(t > 0)) throw DomainError("heat extension needs t > 0");
    long long ev = 0;
    bool ok = true;
    double h = 2 * std::sqrt(t);
    return gaussian_average(
        f, x, h, false, [&](const Point& th, double z) { return f(axpy(h * z, th, x)); }, spec, ev,
        ok);
}

Estimate frac_laplacian_semigroup(const ScalarField& f, const Point& x, const FracParams& p,
                                  const QuadSpec& spec) {
    spec.validate();
    const int n = p.n;
    const double s = p.s;
    if (n != f.n) throw DomainError("field dimension does not match parameters");
    const double fx = f(x);
    long long evals = 0;
    bool ok = true;
    QuadSpec inner = spec.tightened(1e-3);

    // (U - f)(x,t) through symmetric second differences, so that the ratio
    // (U - f)/t keeps its precision as t -> 0.
    auto diff = [&](double t) {
        double h = 2 * std::sqrt(t);
        QuadSpec q = inner;
        q.abs_tol = inner.abs_tol * std::min(t, 1.0);
        return gaussian_average(
            f, x, h, true,
            [&](const Point& th, double z) {
                return f(axpy(h * z, th, x)) + f(axpy(-h * z, th, x)) - 2 * fx;
            },
            q, evals, ok);
    };
    const double T = 1.0;
    SmallArgFit small([&](double t) { return diff(t) / t; }, 1e-6, 1);
    auto head = quad([&](double t) { return t < small.rc ? small(t) : diff(t) / t; }, 0, T,
                     Weight::left_power(-s),
                     spec.tightened(0.1));
    ok = ok && head.converged;
    double tail_v;
    if (f.integrable) {
        QuadOptions o;
        o.decay = 1 + s + 0.5 * n;
        o.tail_scale = T;
        auto tail = quad(
            [&](double t) {
                double h = 2 * std::sqrt(t);
                double u = gaussian_average(
                    f, x, h, false,
                    [&](const Point& th, double z) { return f(axpy(h * z, th, x)); }, inner, evals,
                    ok);
                return u * std::pow(t, -s - 1);
            },
            T, kInf, Weight::none(), spec.tightened(0.1), o);
        ok = ok && tail.converged;
        tail_v = tail.value - fx * std::pow(T, -s) / s;
    } else {
        QuadOptions o;
        o.decay = 1 + s;
        o.tail_scale = T;
        auto tail = quad([&](double t) { return diff(t) * std::pow(t, -s - 1); }, T, kInf,
                         Weight::none(), spec.tightened(0.1), o);
        ok = ok && tail.converged;
        tail_v = tail.value;
    }
    double gneg = gamma(1 - s) / (-s);
    return {(head.value + tail_v) / gneg, 0.0, evals, ok};
}

double ws_constant(double s) {
    static std::mutex mu;
    static std::map<double, double> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
    }
    QuadSpec q;
    q.rel_tol = 1e-11;
    q.abs_tol = 1e-13;
    double v = -frac_laplacian_si(positive_power_field(s), {-1, 0, 0}, FracParams(1, s), q).value;
    std::lock_guard<std::mutex> lock(mu);
    cache[s] = v;
    return v;
}

double ws_reference(double x, double s) {
    if (x == 0) throw DomainError("x_+^s is not smooth at the origin");
    FracParams(1, s);
    if (x > 0) return 0.0;
    return -ws_constant(s) * std::pow(-x, -s);
}

}  // namespace nonlocal
