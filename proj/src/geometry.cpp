#include <algorithm>

#include "nonlocal/geometry.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

namespace {

constexpr double kTwoPi = 2 * kPi;

void check_order(int n, double s) { FracParams(n, s); }

std::vector<double> inside(std::vector<double> v, double lo, double hi) {
    std::vector<double> o;
    for (double t : v)
        if (t > lo && t < hi) o.push_back(t);
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
    return o;
}

// Geometric grading between lo and hi, so that the adaptive rule sees the
// radial scale of the integrand.
void grade(std::vector<double>& br, double lo, double hi) {
    for (double t = 2 * lo; t < hi; t *= 2) br.push_back(t);
}

}  // namespace

// ---- interactions and perimeters ----

double interaction_1d(const IntervalList& A0, const IntervalList& B0, double s) {
    check_order(1, s);
    auto A = normalize(A0), B = normalize(B0);
    if (length(intersect(A, B)) > 0) throw DivergentInteraction("sets overlap on a set of positive length");
    auto F = [s](double t) { return std::pow(t, 1 - s); };
    double total = 0;
    for (const auto& a0 : A)
        for (const auto& b0 : B) {
            auto a = a0, b = b0;
            if (b.second <= a.first) std::swap(a, b);  // now a lies left of b
            auto [a1, a2] = a;
            auto [b1, b2] = b;
            double v;
            if (a1 == -kInf && b2 == kInf)
                throw DivergentInteraction("two unbounded intervals interact infinitely");
            else if (b2 == kInf)
                v = F(b1 - a1) - F(b1 - a2);
            else if (a1 == -kInf)
                v = F(b2 - a2) - F(b1 - a2);
            else
                v = F(b2 - a2) - F(b1 - a2) - F(b2 - a1) + F(b1 - a1);
            total += v;
        }
    return total / (s * (1 - s));
}

namespace {

Estimate perimeter_1d(const GeomSet& E, const GeomSet& Omega, double s) {
    auto e = E.to_intervals(), o = Omega.to_intervals();
    if (!std::isfinite(length(o))) throw DomainError("Omega must be bounded");
    double v = interaction_1d(intersect(e, o), complement(e), s) +
               interaction_1d(subtract(e, o), subtract(o, e), s);
    return {v, 0.0, 0, true};
}

bool member(const GeomSet& E, const Point& x, const Point& dir, double log_r) {
    if (log_r < 600) return E.contains(axpy(std::exp(log_r), dir, x));
    return E.contains_far(dir, log_r);
}

constexpr long long kBlock = 1 << 15;

Estimate perimeter_mc(const GeomSet& E, const GeomSet& Omega, double s, const PerimeterMethod& m) {
    const int n = E.n;
    if (Omega.n != n) throw DomainError("E and Omega must share a dimension");
    if (m.samples < 2) throw DomainError("need at least two samples");
    Point c{};
    double Rs;
    if (Omega.kind == GeomSet::Ball) {
        c = Omega.c;
        Rs = Omega.R;
    } else {
        Rs = Omega.bounding_radius(c);
    }
    if (!std::isfinite(Rs)) throw DomainError("Omega must be bounded");
    const double a = m.near > 0 ? m.near : std::min(s + 0.5, 0.95);
    if (!(a < 1)) throw DomainError("near-field exponent must be below 1");
    const double vol = omega(n) * std::pow(Rs, n) / n, wn = omega(n);
    const long long blocks = (m.samples + kBlock - 1) / kBlock;
    std::vector<Welford> acc(blocks);
    parallel_blocks(blocks, [&](long long b) {
        RngCursor cur(substream(m.stream, static_cast<std::uint64_t>(b)));
        long long cnt = std::min(kBlock, m.samples - b * kBlock);
        for (long long i = 0; i < cnt; ++i) {
            Point x = axpy(Rs * std::pow(cur.uniform_open(), 1.0 / n), cur.unit_vector(n), c);
            Point dir = cur.unit_vector(n);
            bool near = cur.uniform() < 0.5;
            double u = cur.uniform_open(), log_r, w;
            if (near) {
                log_r = std::log(u) / (1 - a);
                w = std::exp((a - 1 - s) * log_r) / (0.5 * (1 - a));
            } else {
                log_r = -std::log(u) / s;
                w = 2 / s;
            }
            double val = 0;
            if (Omega.contains(x)) {
                bool xE = E.contains(x), yE = member(E, x, dir, log_r);
                if (xE && !yE) val = 1;
                if (!xE && yE && !member(Omega, x, dir, log_r)) val = 1;
            }
            acc[b].add(val * vol * wn * w);
        }
    });
    Welford all;
    for (auto& w : acc) all.merge(w);
    return {all.mean, all.std_error(), all.count, true};
}

}  // namespace

Estimate frac_perimeter(const GeomSet& E, const GeomSet& Omega, double s, const PerimeterMethod& method,
                        const QuadSpec& spec) {
    spec.validate();
    check_order(E.n, s);
    if (method.kind == PerimeterMethod::ClosedForm1D) {
        if (E.n != 1) throw UnsupportedDimension("closed form needs n = 1");
        return perimeter_1d(E, Omega, s);
    }
    return perimeter_mc(E, Omega, s, method);
}

// ---- local graphs ----

namespace {

std::optional<LocalGraph> frame_of(const GeomSet& S, const Point& q, bool flip) {
    const double tol = 1e-9;
    std::optional<LocalGraph> g;
    switch (S.kind) {
        case GeomSet::HalfSpace:
            if (std::abs(dot(S.nu, q, 2) - S.a) < tol) {
                g.emplace();
                g->normal = S.nu;
                g->v = [](double) { return 0.0; };
                g->dv = [](double) { return 0.0; };
            }
            break;
        case GeomSet::Ball:
            if (std::abs(dist(q, S.c, 2) - S.R) < tol) {
                const double R = S.R;
                g.emplace();
                g->normal = scale(1 / R, sub(S.c, q));
                g->v = [R](double t) { return R - std::sqrt(std::max(R * R - t * t, 0.0)); };
                g->dv = [R](double t) { return t / std::sqrt(R * R - t * t); };
                g->radius = R;
                g->max_t = R;
            }
            break;
        case GeomSet::Supergraph: {
            auto G = S.graph;
            double x0 = q[0], u0 = G->u(x0);
            if (std::abs(q[1] - u0) < tol * std::max(1.0, std::abs(u0))) {
                g.emplace();
                g->normal = {0, 1, 0};
                g->v = [G, x0, u0](double t) { return G->u(x0 + t) - u0; };
                Fn1 du = G->du;
                if (!du) du = [G](double x) { return (G->u(x + 1e-6) - G->u(x - 1e-6)) / 2e-6; };
                g->dv = [du, x0](double t) { return du(x0 + t); };
                g->holder = G->holder;
                double d1 = du(x0), d2 = (du(x0 + 1e-5) - du(x0 - 1e-5)) / 2e-5;
                double k = std::abs(d2) / std::pow(1 + d1 * d1, 1.5);
                if (k > 1e-12) g->radius = 1 / k;
            }
            break;
        }
        case GeomSet::Difference: {
            auto gb = frame_of(*S.B, q, !flip);
            if (gb && S.A->contains(q) && !frame_of(*S.A, q, false)) return gb;
            auto ga = frame_of(*S.A, q, flip);
            if (ga && !S.B->contains(q) && !gb) return ga;
            return std::nullopt;
        }
        case GeomSet::Union: {
            auto ga = frame_of(*S.A, q, flip), gb = frame_of(*S.B, q, flip);
            if (ga && !gb && !S.B->contains(q)) return ga;
            if (gb && !ga && !S.A->contains(q)) return gb;
            return std::nullopt;
        }
        case GeomSet::Complement: return frame_of(*S.A, q, !flip);
        default: break;
    }
    if (g) {
        g->q = q;
        g->tangent = {-g->normal[1], g->normal[0], 0};
        if (flip) {
            g->normal = scale(-1, g->normal);
            Fn1 v = g->v, dv = g->dv;
            g->v = [v](double t) { return -v(t); };
            g->dv = [dv](double t) { return -dv(t); };
        }
    }
    return g;
}

}  // namespace

LocalGraph local_graph(const GeomSet& E, const Point& q) {
    if (E.n != 2) throw UnsupportedDimension("local graphs are built for n = 2");
    auto g = frame_of(E, q, false);
    if (!g) throw RegularityError("q is not on a smooth piece of the boundary");
    return *g;
}

double G_s(double t, int n, double s) {
    if (t == 0) return 0.0;
    if (t < 0) return -G_s(-t, n, s);
    QuadSpec q{1e-13, 1e-16, 200, 1e3};
    return quad([&](double th) { return std::pow(std::cos(th), n + s - 2); }, 0, std::atan(t), Weight::none(), q)
        .value;
}

namespace {

// G_s(x1) - G_s(x2) without cancellation.
double G_diff(double x1, double x2, int n, double s) {
    double a = std::atan(x2), b = std::atan(x1);
    if (a == b) return 0.0;
    if (a > b) return -G_diff(x2, x1, n, s);
    QuadSpec q{1e-13, 1e-18, 200, 1e3};
    return quad([&](double th) { return std::pow(std::cos(th), n + s - 2); }, a, b, Weight::none(), q).value;
}

// int_{lo}^{inf} f(rho) rho^{-1-s} drho where f is constant beyond `bounded`
// (when finite) and otherwise settles at infinity.
QuadResult radial(const std::function<double(double)>& f, double lo, double s, std::vector<double> br,
                  double bounded, const QuadSpec& spec) {
    br.push_back(lo);
    double hi = std::isfinite(bounded) ? bounded : 2 * std::max(1.0, *std::max_element(br.begin(), br.end()));
    hi = std::max(hi, 2 * lo);
    grade(br, lo, hi);
    QuadOptions o;
    o.breakpoints = inside(br, lo, hi);
    auto g = [&](double r) { return f(r) * std::pow(r, -1 - s); };
    auto head = quad(g, lo, hi, Weight::none(), spec, o);
    if (std::isfinite(bounded)) {
        head.value += f(2 * hi) * std::pow(hi, -s) / s;
        return head;
    }
    QuadOptions to;
    to.decay = 1 + s;
    to.tail_scale = hi;
    auto tail = quad(g, hi, kInf, Weight::none(), spec, to);
    head.value += tail.value;
    head.error += tail.error;
    head.evaluations += tail.evaluations;
    head.converged = head.converged && tail.converged;
    return head;
}

}  // namespace

Estimate frac_mean_curvature_graph(const GeomSet& E, double s, const CurvatureQuery& query) {
    const auto& spec = query.spec;
    spec.validate();
    check_order(2, s);
    LocalGraph g = local_graph(E, query.q);
    if (!(s < g.holder)) throw RegularityError("s must stay below the Hoelder exponent of the gradient");
    double base = g.radius < LocalGraph::kInfRadius ? 0.25 * g.radius : 1.0;
    double r = query.r > 0 ? query.r : base, h = query.h > 0 ? query.h : base;
    if (!(r < g.max_t)) throw DomainError("cylinder is wider than the graph chart");
    for (int i = -64; i <= 64; ++i)
        if (!(std::abs(g.v(r * i / 64.0)) < h)) throw DomainError("graph leaves the cylinder");

    // Graph part: 2 sum_sides int_0^r [G(v(st)/t) - G(s v'(0))] t^{-1-s} dt.
    const double d0 = g.dv(0);
    double graph_part = 0, err = 0;
    long long ev = 0;
    bool ok = true;
    for (double side : {-1.0, 1.0}) {
        auto qf = [&](double t) { return G_diff(g.v(side * t) / t, side * d0, 2, s) / t; };
        SmallArgFit small(qf, 1e-4 * r, 1);
        QuadOptions o;
        o.breakpoints = {small.rc};
        auto res = quad([&](double t) { return t < small.rc ? small(t) : qf(t); }, 0, r,
                        Weight::left_power(-s), spec.tightened(0.1), o);
        graph_part += 2 * res.value;
        err += 2 * res.error;
        ev += res.evaluations;
        ok = ok && res.converged;
    }

    // Outer part over the complement of the cylinder, circle by circle.
    const Point& q = g.q;
    GeomSet cyl = halfspace(g.tangent, dot(g.tangent, q, 2) - r, 2);
    GeomSet parts[3] = {halfspace(scale(-1, g.tangent), -dot(g.tangent, q, 2) - r, 2),
                        halfspace(g.normal, dot(g.normal, q, 2) - h, 2),
                        halfspace(scale(-1, g.normal), -dot(g.normal, q, 2) - h, 2)};
    auto outer = [&](double rho) {
        ArcSet Q = cyl.arcs(q, rho);
        for (auto& p : parts) Q = Q & p.arcs(q, rho);
        ArcSet out = ~Q, in = E.arcs(q, rho);
        return (out & ~in).measure() - (out & in).measure();
    };
    const double diag = std::hypot(r, h);
    auto br = E.radial_breaks(q);
    br.push_back(std::max(r, h));
    br.push_back(diag);
    for (double side : {-1.0, 1.0}) br.push_back(std::hypot(r, g.v(side * r)));  // boundary leaves Q
    double bounded = E.bounding_radius(q);
    if (std::isfinite(bounded)) bounded = std::max(bounded, diag);
    auto res = radial(outer, std::min(r, h), s, br, bounded, spec);
    return {graph_part + res.value, err + res.error, ev + res.evaluations, ok && res.converged};
}

std::vector<double> default_rho_grid() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

Estimate frac_mean_curvature_pv(const GeomSet& E, const Point& q, double s, const std::vector<double>& grid,
                                const QuadSpec& spec, double plateau_tol, std::vector<double>* raw) {
    spec.validate();
    check_order(E.n, s);
    if (E.n != 2) throw UnsupportedDimension("principal value form is planar");
    if (grid.size() < 2) throw DomainError("need at least two radii");
    for (size_t i = 0; i < grid.size(); ++i)
        if (!(grid[i] > 0) || (i > 0 && !(grid[i] < grid[i - 1])))
            throw DomainError("radii must be positive and decreasing");

    auto D = [&](double r) { return kTwoPi - 2 * E.arcs(q, r).measure(); };
    auto br = E.radial_breaks(q);
    br.push_back(1.0);
    auto first = radial(D, grid[0], s, br, E.bounding_radius(q), spec);
    double I = first.value;
    long long ev = first.evaluations;
    bool ok = first.converged;
    std::vector<double> v{I}, e;
    for (size_t k = 0;; ++k) {
        double rho = grid[k];
        // linear fit of D(r)/r on (0, rho] from rho and rho/2
        double f1 = D(rho) / rho, f2 = D(rho / 2) / (rho / 2);
        double b = (f1 - f2) / (rho / 2), a = f1 - b * rho;
        e.push_back(I + a * std::pow(rho, 1 - s) / (1 - s) + b * std::pow(rho, 2 - s) / (2 - s));
        if (k + 1 == grid.size()) break;
        QuadOptions o;
        o.breakpoints = inside(br, grid[k + 1], rho);
        auto piece = quad([&](double r) { return D(r) * std::pow(r, -1 - s); }, grid[k + 1], rho,
                          Weight::none(), spec, o);
        I += piece.value;
        ev += piece.evaluations;
        ok = ok && piece.converged;
        v.push_back(I);
    }
    if (raw) *raw = v;
    double step = std::abs(e.back() - e[e.size() - 2]);
    if (!(step <= plateau_tol * std::max(1.0, std::abs(e.back()))))
        throw NoPlateau("deleted-ball values do not settle");
    return {e.back(), step, ev, ok};
}

// ---- contribution from infinity ----

AlphaResult alpha_estimate_at(const GeomSet& E, double s, const Point& q, double r, long long samples,
                              const RngStream& stream, bool extrapolate) {
    check_order(E.n, s);
    if (!(r > 0)) throw DomainError("radius must be positive");
    if (samples < 2) throw DomainError("need at least two samples");
    const int n = E.n;
    const double wn = omega(n), lr = std::log(r);
    const double c1 = wn * std::pow(r, -s), c2 = wn * std::pow(r, -s / 2);
    const long long blocks = (samples + kBlock - 1) / kBlock;
    std::vector<Welford> a1(blocks), a2(blocks);
    parallel_blocks(blocks, [&](long long b) {
        RngCursor cur(substream(stream, static_cast<std::uint64_t>(b)));
        long long cnt = std::min(kBlock, samples - b * kBlock);
        for (long long i = 0; i < cnt; ++i) {
            double L = -std::log(cur.uniform_open()) / s;
            Point dir = cur.unit_vector(n);
            double x1 = member(E, q, dir, L + lr) ? c1 : 0.0;
            a1[b].add(x1);
            if (extrapolate) {
                double x2 = member(E, q, dir, 2 * L + lr) ? c2 : 0.0;
                a2[b].add(2 * x2 - x1);
            }
        }
    });
    Welford w1, w2;
    for (long long b = 0; b < blocks; ++b) {
        w1.merge(a1[b]);
        w2.merge(a2[b]);
    }
    AlphaResult out;
    out.s_value = s;
    out.s_alpha = w1.mean;
    out.std_error = w1.std_error();
    out.samples = w1.count;
    if (extrapolate) {
        out.extrapolated = w2.mean;
        out.extrapolated_error = w2.std_error();
    }
    return out;
}

AlphaResult alpha_estimate(const GeomSet& E, double s, long long samples, const RngStream& stream,
                           bool extrapolate) {
    return alpha_estimate_at(E, s, Point{}, 1.0, samples, stream, extrapolate);
}

double alpha_quadrature(const GeomSet& E, double s, const Point& q, double r, const QuadSpec& spec) {
    spec.validate();
    check_order(2, s);
    if (E.n != 2) throw UnsupportedDimension("circle sections are planar");
    auto m = [&](double rho) { return E.arcs(q, rho).measure(); };
    auto br = E.radial_breaks(q);
    br.push_back(r);
    auto res = radial(m, r, s, br, E.bounding_radius(q), spec);
    if (!res.converged) throw NonConvergence("alpha quadrature did not converge");
    return s * res.value;
}

double StickinessParams::delta(double s) const {
    check_order(n, s);
    double w = omega(n);
    return std::exp(-std::log((w + 2 * beta) / (w + beta)) / s);
}

StickinessParams stickiness_threshold(double alpha_bar, int n) {
    double w = omega(n);
    if (!(alpha_bar >= 0)) throw DomainError("alpha_bar must be nonnegative");
    if (!(alpha_bar < w / 2)) throw DomainError("alpha_bar must stay below omega_n / 2");
    return {alpha_bar, (w - 2 * alpha_bar) / 4, n};
}

// ---- co-area ----

namespace {

IntervalList superlevel(const ScalarField1D& f, const IntervalList& omega_iv, double t) {
    IntervalList out;
    for (auto [lo, hi] : omega_iv) {
        std::vector<double> nodes;
        const int N = 1000;
        for (int i = 0; i <= N; ++i) nodes.push_back(lo + (hi - lo) * i / N);
        for (double b : f.breaks)
            if (b > lo && b < hi) nodes.push_back(b);
        std::sort(nodes.begin(), nodes.end());
        for (size_t i = 0; i + 1 < nodes.size(); ++i) {
            double l = nodes[i], h = nodes[i + 1], eps = 1e-13 * (h - l);
            if (!(h > l)) continue;
            bool fl = f.u(l + eps) > t, fh = f.u(h - eps) > t;
            if (fl == fh) {
                if (fl) out.push_back({l, h});
                continue;
            }
            double a = l, b = h;
            for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                double m = 0.5 * (a + b);
                ((f.u(m) > t) == fl ? a : b) = m;
            }
            double c = 0.5 * (a + b);
            if (fl)
                out.push_back({l, c});
            else
                out.push_back({c, h});
        }
    }
    return normalize(out);
}

}  // namespace

CoareaResult coarea_check(const ScalarField1D& f, const GeomSet& Omega, double s, const QuadSpec& spec) {
    spec.validate();
    check_order(1, s);
    if (Omega.n != 1) throw UnsupportedDimension("co-area check is one-dimensional");
    auto om = Omega.to_intervals();
    if (!std::isfinite(length(om))) throw DomainError("Omega must be bounded");
    CoareaResult out;
    bool ok = true;

    // lhs = int_0^L tau^{-1-s} D(tau) dtau, D(tau) = int |u(x) - u(x - tau)| over
    // x, x - tau in Omega.  D(tau) = O(tau), so D/tau carries a tau^{-s} weight.
    QuadSpec inner_spec = spec.tightened(0.01);
    std::vector<double> marks = f.breaks;
    for (auto [lo, hi] : om) {
        marks.push_back(lo);
        marks.push_back(hi);
    }
    const double L = om.back().second - om.front().first;
    auto D = [&](double tau) {
        IntervalList shifted;
        for (auto [lo, hi] : om) shifted.push_back({lo + tau, hi + tau});
        double acc = 0;
        for (auto [lo, hi] : intersect(om, shifted)) {
            std::vector<double> br;
            for (double m : f.breaks) {
                br.push_back(m);
                br.push_back(m + tau);
            }
            QuadOptions o;
            o.breakpoints = inside(br, lo, hi);
            acc += quad([&](double x) { return std::abs(f.u(x) - f.u(x - tau)); }, lo, hi, Weight::none(),
                        inner_spec, o)
                       .value;
        }
        return acc / tau;
    };
    std::vector<double> lags;
    for (double m1 : marks)
        for (double m2 : marks) lags.push_back(std::abs(m1 - m2));
    QuadOptions lo_opt;
    lo_opt.breakpoints = inside(lags, 0, L);
    auto lr = quad(D, 0, L, Weight::left_power(-s), spec, lo_opt);
    out.lhs = lr.value;
    out.lhs_error = lr.error;
    ok = ok && lr.converged;

    auto level = [&](double t) {
        auto up = superlevel(f, om, t);
        return interaction_1d(up, subtract(om, up), s);
    };
    auto r = quad(level, 0, 1, Weight::none(), spec);
    out.rhs = r.value;
    out.rhs_error = r.error;
    ok = ok && r.converged;
    if (!ok) throw NonConvergence("co-area quadrature did not converge");
    return out;
}

std::vector<ScanRow> asymptotic_scan(const std::function<Estimate(double)>& eval,
                                     const std::vector<double>& s_grid) {
    std::vector<ScanRow> rows;
    for (double s : s_grid) {
        check_order(1, s);
        Estimate e = eval(s);
        rows.push_back({s, e, s * e.value, (1 - s) * e.value});
    }
    return rows;
}

}  // namespace nonlocal
