#include "nonlocal/balls.hpp"

#include <algorithm>

#include "nonlocal/specfun.hpp"

namespace nonlocal {

double phi(const Point& x, const FracParams& p) {
    double r = norm(x, p.n);
    if (r == 0) throw SingularPoint("fundamental solution is singular at the origin");
    if (is_log_case(p)) return -std::log(r) / kPi;
    return constants(p).a_fund * std::pow(r, 2 * p.s - p.n);
}

double mean_kernel(const Point& y, double r, const FracParams& p) {
    double q = dot(y, y, p.n);
    if (q <= r * r) return 0.0;
    return constants(p).c_kernel * std::pow(r, 2 * p.s) /
           (std::pow(q - r * r, p.s) * std::pow(q, 0.5 * p.n));
}

double poisson_kernel(const Point& y, const Point& x, double r, const FracParams& p) {
    double qy = dot(y, y, p.n), qx = dot(x, x, p.n);
    if (qy <= r * r) throw DomainError("Poisson kernel needs y outside the ball");
    if (qx >= r * r) throw DomainError("Poisson kernel needs x inside the ball");
    return constants(p).c_kernel * std::pow((r * r - qx) / (qy - r * r), p.s) /
           std::pow(dist(x, y, p.n), p.n);
}

double green_r0(const Point& x, const Point& z, double r, int n) {
    double d = dist(x, z, n);
    return (r * r - dot(x, x, n)) * (r * r - dot(z, z, n)) / (r * r * d * d);
}

namespace {

// int_0^{r0} t^{s-1} (1+t)^{-n/2} dt
double green_integral(double r0, int n, double s, const QuadSpec& q) {
    double hn = 0.5 * n;
    auto head = quad([&](double t) { return std::pow(1 + t, -hn); }, 0, std::min(r0, 1.0),
                     Weight::left_power(s - 1), q);
    double v = head.value;
    if (r0 <= 1) return v;
    // t = 1/v on [1, r0]: int_{1/r0}^1 v^{n/2-s-1} (1+v)^{-n/2} dv
    double e = hn - s - 1;
    if (e > -1) {
        auto full = quad([&](double u) { return std::pow(1 + u, -hn); }, 0, 1, Weight::left_power(e), q);
        auto cut = quad([&](double u) { return std::pow(1 + u, -hn); }, 0, 1 / r0,
                        Weight::left_power(e), q);
        return v + full.value - cut.value;
    }
    auto lg = quad([&](double w) { return std::exp((e + 1) * w) * std::pow(1 + std::exp(w), -hn); },
                   -std::log(r0), 0, Weight::none(), q);
    return v + lg.value;
}

// Green function without range checks; 0 on or beyond the boundary.
double green_raw(double r, const FracParams& p, const Point& x, const Point& z, const QuadSpec& q) {
    const int n = p.n;
    double qx = dot(x, x, n), qz = dot(z, z, n);
    if (qx >= r * r || qz >= r * r) return 0.0;
    double d = dist(x, z, n);
    if (is_log_case(p)) {
        double num = r * r - x[0] * z[0] + std::sqrt((r * r - qx) * (r * r - qz));
        return std::log(num / (r * d)) / kPi;
    }
    double r0 = green_r0(x, z, r, n);
    return constants(p).kappa * std::pow(d, 2 * p.s - n) * green_integral(r0, n, p.s, q);
}

double wrap_angle(double a) {
    a = std::fmod(a, 2 * kPi);
    return a < 0 ? a + 2 * kPi : a;
}

// int_{|y|>r} (|y|^2 - r^2)^{-s} K(y) dy in polar coordinates about 0.
struct Exterior {
    int n;
    double r, s;
    std::function<double(const Point&)> K;
    std::function<std::vector<double>(const Point&)> radial_breaks;
    std::vector<std::pair<Point, double>> singular;  // singular points of K
    double decay;
    std::vector<double> theta_breaks;
};

Estimate exterior_integral(const Exterior& E, const QuadSpec& spec) {
    const int n = E.n;
    const double r = E.r, s = E.s;
    QuadSpec inner = spec.tightened(0.1);
    long long evals = 0;
    bool ok = true;
    struct Hole {
        Point p;
        double d, e;
    };
    std::vector<Hole> holes;
    std::vector<std::pair<Point, double>> on_line;
    std::vector<double> tb;
    for (double t : E.theta_breaks) tb.push_back(wrap_angle(t));
    for (const auto& [pt, e] : E.singular) {
        double pr = norm(pt, n);
        if (pr <= r) continue;  // inside the ball the kernel vanishes
        if (n == 1) {
            on_line.push_back({pt, e});
        } else if (n == 2) {
            double d = 0.5 * (pr - r);
            holes.push_back({pt, d, e});
            double c = std::atan2(pt[1], pt[0]), w = std::asin(d / pr);
            for (double t : {c - w, c, c + w}) tb.push_back(wrap_angle(t));
        }
    }
    auto in_hole = [&](const Point& y) {
        for (auto& h : holes)
            if (dist(y, h.p, n) < h.d) return true;
        return false;
    };
    auto radial = [&](const Point& th) {
        QuadOptions o;
        double top = r;
        auto add = [&](double b) {
            if (b > r) o.breakpoints.push_back(b), top = std::max(top, b);
        };
        if (E.radial_breaks)
            for (double b : E.radial_breaks(th)) add(b);
        for (auto& h : holes) {
            double b = dot(h.p, th, n), q = dot(h.p, h.p, n) - h.d * h.d, disc = b * b - q;
            if (disc > 0) add(b - std::sqrt(disc)), add(b + std::sqrt(disc));
        }
        for (const auto& [pt, e] : on_line) {
            double rp = pt[0] * th[0];
            if (rp > r) {
                if (e != 0)
                    o.singularities.push_back({rp, e});
                else
                    add(rp);
                top = std::max(top, rp);
            }
        }
        o.decay = E.decay;
        o.tail_scale = std::max(1.0, top);
        auto res = quad(
            [&](double rho) {
                ++evals;
                Point y = scale(rho, th);
                if (!holes.empty() && in_hole(y)) return 0.0;
                return std::pow(rho + r, -s) * std::pow(rho, n - 1) * E.K(y);
            },
            r, kInf, Weight::left_power(-s), inner, o);
        ok = ok && res.converged;
        return res.value;
    };
    bool sok = true;
    double v = sphere_integral(radial, n, spec, tb, &sok);
    ok = ok && sok;
    for (auto& h : holes) {
        auto ray = [&](const Point& th) {
            double e = h.e;
            auto res = quad(
                [&](double rho) {
                    ++evals;
                    Point y = axpy(rho, th, h.p);
                    double w = std::pow(dot(y, y, n) - r * r, -s) * E.K(y);
                    return e != 0 ? w / std::pow(rho, e) : w;
                },
                0, h.d, Weight::left_power(n - 1 + e), inner);
            ok = ok && res.converged;
            return res.value;
        };
        bool hok = true;
        v += sphere_integral(ray, n, spec, {}, &hok);
        ok = ok && hok;
    }
    return {v, 0.0, evals, ok};
}

void check_growth(const ScalarField& f, double s) {
    if (f.growth >= 2 * s) throw IntegrabilityError("data grow too fast for the kernel tail");
}

}  // namespace

double green(const BallGeometry& g, const Point& x, const Point& z, const QuadSpec& spec) {
    const int n = g.p.n;
    double r2 = g.r * g.r;
    if (dot(x, x, n) >= r2 || dot(z, z, n) >= r2)
        throw DomainError("Green function needs both points inside the ball");
    if (dist(x, z, n) == 0) throw SingularPoint("Green function is singular at x = z");
    return green_raw(g.r, g.p, x, z, spec.tightened(0.01));
}

ScalarField phi_field(const FracParams& p, const Point& centre) {
    ScalarField f;
    f.eval = [p, centre](const Point& y) { return phi(sub(y, centre), p); };
    f.n = p.n;
    f.growth = is_log_case(p) ? 0.0 : 2 * p.s - p.n;
    f.singular_points = {{centre, is_log_case(p) ? 0.0 : 2 * p.s - p.n}};
    return f;
}

Estimate solve_dirichlet(const ScalarField& g, const BallGeometry& geom, const Point& x,
                         const QuadSpec& spec) {
    spec.validate();
    const FracParams& p = geom.p;
    const int n = p.n;
    const double r = geom.r, s = p.s;
    if (dot(x, x, n) >= r * r) throw DomainError("evaluation point must lie inside the ball");
    check_growth(g, s);
    const double pref = constants(p).c_kernel * std::pow(r * r - dot(x, x, n), s);
    Exterior E;
    E.n = n;
    E.r = r;
    E.s = s;
    E.K = [&](const Point& y) { return pref * std::pow(dist(x, y, n), -n) * g(y); };
    E.radial_breaks = [&](const Point& th) { return kink_radii(g, Point{}, th); };
    E.singular = g.singular_points;
    E.decay = 1 + 2 * s - g.growth;
    if (n >= 2 && norm(x, n) > 0) E.theta_breaks = {std::atan2(x[1], x[0])};
    return exterior_integral(E, spec);
}

Estimate s_mean(const ScalarField& u, const Point& x, double rho, const FracParams& p,
                const QuadSpec& spec) {
    spec.validate();
    if (!(rho > 0)) throw DomainError("mean radius must be positive");
    const int n = p.n;
    const double s = p.s;
    check_growth(u, s);
    const double pref = constants(p).c_kernel * std::pow(rho, 2 * s);
    Exterior E;
    E.n = n;
    E.r = rho;
    E.s = s;
    E.K = [&](const Point& y) { return pref * std::pow(norm(y, n), -n) * u(sub(x, y)); };
    E.radial_breaks = [&](const Point& th) { return kink_radii(u, x, th); };
    for (const auto& [pt, e] : u.singular_points) E.singular.push_back({sub(x, pt), e});
    E.decay = 1 + 2 * s - u.growth;
    return exterior_integral(E, spec);
}

Estimate solve_poisson(const ScalarField& h, const BallGeometry& geom, const Point& x,
                       const QuadSpec& spec) {
    spec.validate();
    const FracParams& p = geom.p;
    const int n = p.n;
    const double r = geom.r, s = p.s;
    if (dot(x, x, n) >= r * r) throw DomainError("evaluation point must lie inside the ball");
    QuadSpec inner = spec.tightened(0.1), gq = spec.tightened(1e-3);
    const double al = (n > 2 * s) ? 2 * s - 1 : 0.0;
    long long evals = 0;
    bool ok = true;
    auto ray = [&](const Point& th) {
        double b = dot(x, th, n), D = std::sqrt(b * b + r * r - dot(x, x, n));
        double rmax = -b + D;
        auto res = quad(
            [&](double rho) {
                ++evals;
                Point y = axpy(rho, th, x);
                double v = h(y) * green_raw(r, p, x, y, gq) * std::pow(rho, n - 1);
                if (al != 0) v /= std::pow(rho, al);
                return v / std::pow(rmax - rho, s);
            },
            0, rmax, Weight::jacobi(al, s), inner);
        ok = ok && res.converged;
        return res.value;
    };
    bool sok = true;
    double v = sphere_integral(ray, n, spec, {}, &sok);
    return {v, 0.0, evals, ok && sok};
}

Estimate ball_riesz_mass(const BallGeometry& geom, const Point& x, const QuadSpec& spec) {
    spec.validate();
    const FracParams& p = geom.p;
    const int n = p.n;
    const double r = geom.r, s = p.s;
    if (dot(x, x, n) >= r * r) throw DomainError("evaluation point must lie inside the ball");
    long long evals = 0;
    bool ok = true;
    auto ray = [&](const Point& th) {
        double b = dot(x, th, n), D = std::sqrt(b * b + r * r - dot(x, x, n));
        double rmax = -b + D, rmin = -b - D;
        auto res = quad(
            [&](double rho) {
                ++evals;
                return std::pow(rho - rmin, -s);
            },
            0, rmax, Weight::jacobi(2 * s - 1, -s), spec.tightened(0.1));
        ok = ok && res.converged;
        return res.value;
    };
    bool sok = true;
    double v = constants(p).c_kernel * sphere_integral(ray, n, spec, {}, &sok);
    return {v, 0.0, evals, ok && sok};
}

}  // namespace nonlocal
