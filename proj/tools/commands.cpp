#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/version.hpp>
#include <cstdio>
#include <fstream>
#include <list>
#include <map>
#include <set>
#include <sstream>

#include "nonlocal/balls.hpp"
#include "nonlocal/dynamics.hpp"
#include "nonlocal/fraccalc.hpp"
#include "nonlocal/fraclap.hpp"
#include "nonlocal/geometry.hpp"
#include "nonlocal/geomset.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"
#include "nonlocal/walk.hpp"

#ifndef NONLOCAL_VERSION
#define NONLOCAL_VERSION "0.0.0"
#endif

namespace nonlocal::cli {

using json = nlohmann::json;

namespace {

// Bad flag values that CLI11 cannot see (points, lists, grids): exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Outcome {
    Estimate est;
    json details = json::object();
};

struct Leaf {
    std::string path;
    CLI::App* app = nullptr;
    std::map<std::string, double> num;
    std::map<std::string, long long> ints;
    std::map<std::string, std::string> str;
    std::map<std::string, bool> flags;
    bool seeded = false;
    std::function<Outcome(Leaf&)> eval;

    double d(const std::string& k) const { return num.at(k); }
    long long i(const std::string& k) const { return ints.at(k); }
    const std::string& s(const std::string& k) const { return str.at(k); }
    bool f(const std::string& k) const { return flags.at(k); }

    Leaf& real(const std::string& name, double def, const std::string& help) {
        num[name] = def;
        app->add_option("--" + name, num[name], help)->capture_default_str();
        return *this;
    }
    Leaf& integer(const std::string& name, long long def, const std::string& help) {
        ints[name] = def;
        app->add_option("--" + name, ints[name], help)->capture_default_str();
        return *this;
    }
    Leaf& text(const std::string& name, const std::string& def, const std::string& help,
               std::vector<std::string> choices = {}) {
        str[name] = def;
        auto* o = app->add_option("--" + name, str[name], help)->capture_default_str();
        if (!choices.empty()) o->check(CLI::IsMember(choices));
        return *this;
    }
    Leaf& flag(const std::string& name, const std::string& help) {
        flags[name] = false;
        app->add_flag("--" + name, flags[name], help);
        return *this;
    }
    Leaf& seed() {
        seeded = true;
        return integer("seed", 0, "random seed");
    }

    QuadSpec spec() const {
        QuadSpec q;
        q.rel_tol = d("rel-tol");
        q.abs_tol = d("abs-tol");
        q.validate();
        return q;
    }
    RngStream stream() const { return {static_cast<std::uint64_t>(i("seed")), 0, 0}; }
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Point parse_point(const std::string& text, int n) {
    Point p{};
    std::stringstream ss(text);
    std::string tok;
    int k = 0;
    while (std::getline(ss, tok, ',')) {
        if (k >= 3) throw UsageError("points have at most 3 coordinates: '" + text + "'");
        try {
            size_t used = 0;
            p[k] = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("not a number in '" + text + "'");
        }
        ++k;
    }
    if (k != n) throw UsageError("expected " + std::to_string(n) + " coordinates in '" + text + "'");
    return p;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("not a number in '" + text + "'");
        }
    }
    if (v.empty()) throw UsageError("empty list");
    return v;
}

const std::vector<std::string> kFields{"gaussian", "ball-power", "positive-power", "constant", "step"};

ScalarField make_field(const std::string& name, int n, double power) {
    if (name == "gaussian") return gaussian_field(n);
    if (name == "ball-power") return ball_power_field(power, n);
    if (name == "constant") return constant_field(1, n);
    if (n != 1) throw UsageError("field '" + name + "' is one-dimensional");
    if (name == "positive-power") return positive_power_field(power);
    ScalarField f;  // step: 1 for y_1 > 0
    f.n = 1;
    f.eval = [](const Point& y) { return y[0] > 0 ? 1.0 : 0.0; };
    f.kinks = {0};
    return f;
}

// f(y) for |y| < R, 0 outside
ScalarField truncate(ScalarField f, double R) {
    if (!std::isfinite(R)) return f;
    if (!(R > 0)) throw DomainError("truncation radius must be positive");
    auto g = f.eval;
    const int n = f.n;
    f.eval = [g, R, n](const Point& y) { return norm(y, n) < R ? g(y) : 0.0; };
    f.support_radius = std::min(f.support_radius, R);
    if (n == 1) {
        f.kinks.push_back(R);
        f.kinks.push_back(-R);
    } else {
        f.kink_spheres.push_back({Point{}, R});
    }
    f.integrable = true;
    return f;
}

// z -> f(z + c)
ScalarField shifted(ScalarField f, const Point& c) {
    if (norm(c, 3) == 0) return f;
    auto g = f.eval;
    f.eval = [g, c](const Point& z) { return g(axpy(1.0, c, z)); };
    for (double& k : f.kinks) k -= c[0];
    for (auto& [p, R] : f.kink_spheres) p = sub(p, c);
    for (auto& [p, e] : f.singular_points) p = sub(p, c);
    if (std::isfinite(f.support_radius)) f.support_radius += norm(c, 3);
    return f;
}

double field_power(const Leaf& L) { return std::isnan(L.d("power")) ? L.d("s") : L.d("power"); }

CausalFunction caputo_preset(const std::string& name) {
    return name == "ex221" ? example_linear_data() : example_quadratic_data();
}

CausalFunction marchaud_function(const std::string& name) {
    return name == "cos" ? cosine_function() : exponential_function();
}

Estimate exact(double v) { return {v, 0, 0, true}; }

json estimate_json(const Estimate& e) {
    return {{"value", number(e.value)}, {"stderr", number(e.std_error)}, {"converged", e.converged}};
}

// ---------------------------------------------------------------- commands

void add_constants(Leaf& L) {
    L.integer("n", 1, "dimension").real("s", 0.5, "fractional order");
    L.eval = [](Leaf& L) {
        FracParams p(static_cast<int>(L.i("n")), L.d("s"));
        auto c = constants(p);
        Outcome o{exact(c.C)};
        o.details = {{"C", number(c.C)},           {"c_kernel", number(c.c_kernel)}, {"a_fund", number(c.a_fund)},
                     {"k_ns", number(c.k_ns)},     {"kappa", number(c.kappa)},       {"omega_n", number(c.omega_n)},
                     {"log_case", is_log_case(p)}};
        return o;
    };
}

void add_fraclap(Leaf& L, bool semigroup) {
    L.integer("n", 1, "dimension").real("s", 0.5, "fractional order");
    L.text("field", "gaussian", "test function", kFields);
    L.real("power", std::nan(""), "exponent of the power fields (default: s)");
    L.text("x", "0", "evaluation point, comma separated");
    L.eval = [semigroup](Leaf& L) {
        const int n = static_cast<int>(L.i("n"));
        FracParams p(n, L.d("s"));
        auto f = make_field(L.s("field"), n, field_power(L));
        Point x = parse_point(L.s("x"), n);
        Outcome o{semigroup ? frac_laplacian_semigroup(f, x, p, L.spec()) : frac_laplacian_si(f, x, p, L.spec())};
        if (L.s("field") == "positive-power" && field_power(L) == p.s)
            o.details["reference"] = number(ws_reference(x[0], p.s));
        return o;
    };
}

void add_ball_common(Leaf& L) {
    L.integer("n", 1, "dimension").real("s", 0.5, "fractional order");
    L.text("x", "0", "evaluation point");
}

void add_dirichlet(Leaf& L) {
    add_ball_common(L);
    L.real("r", 1, "ball radius").text("centre", "", "ball centre (default: origin)");
    L.text("data", "positive-power", "exterior data", kFields);
    L.real("power", std::nan(""), "exponent of the power fields (default: s)");
    L.real("truncate", kInf, "data set to 0 for |y| >= truncate");
    L.eval = [](Leaf& L) {
        const int n = static_cast<int>(L.i("n"));
        Point c = L.s("centre").empty() ? Point{} : parse_point(L.s("centre"), n);
        auto g = shifted(truncate(make_field(L.s("data"), n, field_power(L)), L.d("truncate")), c);
        Point x = sub(parse_point(L.s("x"), n), c);
        return Outcome{solve_dirichlet(g, BallGeometry(L.d("r"), FracParams(n, L.d("s"))), x, L.spec())};
    };
}

void add_poisson(Leaf& L) {
    add_ball_common(L);
    L.real("r", 1, "ball radius").text("forcing", "constant", "right-hand side", {"constant", "gaussian"});
    L.eval = [](Leaf& L) {
        const int n = static_cast<int>(L.i("n"));
        auto h = L.s("forcing") == "constant" ? constant_field(1, n) : gaussian_field(n);
        Point x = parse_point(L.s("x"), n);
        return Outcome{solve_poisson(h, BallGeometry(L.d("r"), FracParams(n, L.d("s"))), x, L.spec())};
    };
}

void add_mean(Leaf& L) {
    add_ball_common(L);
    L.real("rho", 1, "mean radius").text("field", "positive-power", "averaged function", kFields);
    L.real("power", std::nan(""), "exponent of the power fields (default: s)");
    L.eval = [](Leaf& L) {
        const int n = static_cast<int>(L.i("n"));
        auto u = make_field(L.s("field"), n, field_power(L));
        Point x = parse_point(L.s("x"), n);
        Outcome o{s_mean(u, x, L.d("rho"), FracParams(n, L.d("s")), L.spec())};
        o.details["u(x)"] = number(u(x));
        return o;
    };
}

void add_caputo(Leaf& L, const std::string& what) {
    L.text("preset", what == "sequence" ? "ex222" : "ex221", "initial data on [0, 1]", {"ex221", "ex222"});
    L.real("s", 0.5, "fractional order").real("x", 2, "evaluation point");
    if (what == "sequence") L.integer("j", 16, "sequence index");
    L.eval = [what](Leaf& L) {
        auto phi = caputo_preset(L.s("preset"));
        const double s = L.d("s"), x = L.d("x");
        if (what == "extend") return Outcome{caputo_extend(phi, 0, 1, s, x, L.spec())};
        if (what == "deriv") {
            auto u = caputo_extension(phi, 0, 1, s, L.spec());
            return Outcome{caputo_derivative(u, s, x, L.spec())};
        }
        auto p = make_sequence_params(phi, s, static_cast<int>(L.i("j")), L.spec());
        Outcome o{exact(caputo_sequence(p, x, L.spec()))};
        o.details = {{"kappa", number(p.kappa)}, {"limit", number(p.kappa * std::pow(x, s))}};
        return o;
    };
}

void add_marchaud(Leaf& L, const std::string& what) {
    L.text("function", "cos", "input function", {"cos", "exp"});
    L.real("s", 0.5, "fractional order").real("t", 0.3, "time");
    if (what == "deriv") {
        L.flag("normalized", "multiply by s/Gamma(1-s)");
        L.text("side", "left", "left or right derivative", {"left", "right"});
    }
    if (what == "extend") L.real("x", 0.1, "extension variable");
    if (what == "trace") L.real("plateau-tol", 1e-3, "agreement required between the last two grid values");
    L.eval = [what](Leaf& L) {
        auto phi = marchaud_function(L.s("function"));
        const double s = L.d("s"), t = L.d("t");
        if (what == "deriv") {
            bool norm_ = L.f("normalized");
            return Outcome{L.s("side") == "left" ? marchaud_derivative(phi, s, t, norm_, L.spec())
                                                 : marchaud_derivative_right(phi, s, t, norm_, L.spec())};
        }
        MarchaudExtension ext(phi, s);
        if (what == "extend") return Outcome{marchaud_extend(ext, L.d("x"), t, L.spec())};
        std::vector<double> vals, grid = default_trace_grid();
        Outcome o{marchaud_trace(ext, t, grid, L.spec(), L.d("plateau-tol"), &vals)};
        o.details["grid"] = grid;
        o.details["values"] = vals;
        o.details["direct"] = number(marchaud_derivative(phi, s, t, false, L.spec()).value);
        return o;
    };
}

void add_perimeter(Leaf& L) {
    L.text("set", "half-line", "set descriptor").text("omega", "intervals:-1,1", "domain descriptor");
    L.real("s", 0.5, "fractional order");
    L.text("method", "auto", "closed (1D) or mc", {"auto", "closed", "mc"});
    L.integer("samples", 1'000'000, "Monte Carlo samples").seed();
    L.eval = [](Leaf& L) {
        auto E = parse_set(L.s("set")), Om = parse_set(L.s("omega"));
        PerimeterMethod m;
        bool one_d = E.n == 1 && Om.n == 1;
        m.kind = (L.s("method") == "closed" || (L.s("method") == "auto" && one_d)) ? PerimeterMethod::ClosedForm1D
                                                                                  : PerimeterMethod::MonteCarlo;
        m.samples = L.i("samples");
        m.stream = L.stream();
        return Outcome{frac_perimeter(E, Om, L.d("s"), m, L.spec())};
    };
}

void add_curvature(Leaf& L, bool pv) {
    L.text("set", "dimple", "set descriptor").text("q", "1,0", "boundary point");
    L.real("s", 0.5, "fractional order");
    if (pv) {
        L.real("plateau-tol", 1e-6, "relative agreement across the radius grid");
    } else {
        L.real("r", 0, "cylinder half-width (0: automatic)").real("h", 0, "cylinder half-height (0: automatic)");
    }
    L.eval = [pv](Leaf& L) {
        auto E = parse_set(L.s("set"));
        Point q = parse_point(L.s("q"), 2);
        if (pv) {
            std::vector<double> raw, grid = default_rho_grid();
            Outcome o{frac_mean_curvature_pv(E, q, L.d("s"), grid, L.spec(), L.d("plateau-tol"), &raw)};
            o.details["rho"] = grid;
            o.details["completed"] = raw;
            return o;
        }
        CurvatureQuery cq;
        cq.q = q;
        cq.r = L.d("r");
        cq.h = L.d("h");
        cq.spec = L.spec();
        return Outcome{frac_mean_curvature_graph(E, L.d("s"), cq)};
    };
}

void add_alpha(Leaf& L) {
    L.text("set", "cubic", "set descriptor").real("s", 0.01, "fractional order");
    L.integer("samples", 1'000'000, "Monte Carlo samples").seed();
    L.flag("extrapolate", "report 2 v(s/2) - v(s), which removes the term linear in s");
    L.text("q", "0,0", "centre of the excluded ball").real("r", 1, "radius of the excluded ball");
    L.eval = [](Leaf& L) {
        auto E = parse_set(L.s("set"));
        Point q = parse_point(L.s("q"), 2);
        auto a = alpha_estimate_at(E, L.d("s"), q, L.d("r"), L.i("samples"), L.stream(), L.f("extrapolate"));
        Outcome o{{a.s_alpha, a.std_error, a.samples, true}};
        o.details = {{"s_alpha", number(a.s_alpha)}, {"s_alpha_stderr", number(a.std_error)}};
        if (a.extrapolated) {
            o.est.value = *a.extrapolated;
            o.est.std_error = *a.extrapolated_error;
            o.details["extrapolated"] = number(*a.extrapolated);
            o.details["extrapolated_stderr"] = number(*a.extrapolated_error);
        }
        return o;
    };
}

void add_delta(Leaf& L) {
    L.real("alpha-bar", 0.1, "bound on the contribution from infinity");
    L.integer("n", 2, "dimension").real("s", 0.5, "fractional order");
    L.eval = [](Leaf& L) {
        auto st = stickiness_threshold(L.d("alpha-bar"), static_cast<int>(L.i("n")));
        Outcome o{exact(st.delta(L.d("s")))};
        o.details = {{"beta", number(st.beta)}};
        return o;
    };
}

void add_coarea(Leaf& L) {
    L.text("field", "linear", "u on the line", {"linear", "constant", "indicator"});
    L.real("a", 0.3, "indicator interval start").real("b", 0.7, "indicator interval end");
    L.text("omega", "intervals:0,1", "domain descriptor").real("s", 0.5, "fractional order");
    L.eval = [](Leaf& L) {
        ScalarField1D u;
        const double a = L.d("a"), b = L.d("b");
        if (L.s("field") == "linear") u.u = [](double x) { return x; };
        if (L.s("field") == "constant") u.u = [](double) { return 1.0; };
        if (L.s("field") == "indicator") {
            if (!(a < b)) throw UsageError("indicator needs a < b");
            u.u = [a, b](double x) { return (x > a && x < b) ? 1.0 : 0.0; };
            u.breaks = {a, b};
        }
        auto c = coarea_check(u, parse_set(L.s("omega")), L.d("s"), L.spec());
        Outcome o{{c.lhs - c.rhs, std::hypot(c.lhs_error, c.rhs_error), 0, true}};
        o.details = {{"lhs", number(c.lhs)}, {"rhs", number(c.rhs)}};
        return o;
    };
}

void add_walk(Leaf& L) {
    L.integer("n", 1, "dimension").real("s", 0.5, "fractional order").real("h", 0.02, "space step");
    L.text("centre", "2", "domain centre").real("radius", 0.5, "domain radius");
    L.text("x", "2", "starting point");
    L.text("data", "positive-power", "payoff outside the domain", kFields);
    L.real("power", std::nan(""), "exponent of the power fields (default: s)");
    L.real("truncate", 50, "payoff set to 0 for |y| >= truncate");
    L.integer("trials", 100'000, "paths").integer("max-steps", 1'000'000, "steps per path").seed();
    L.eval = [](Leaf& L) {
        const int n = static_cast<int>(L.i("n"));
        auto g = truncate(make_field(L.s("data"), n, field_power(L)), L.d("truncate"));
        auto cfg = make_walk(FracParams(n, L.d("s")), L.d("h"), parse_point(L.s("centre"), n), L.d("radius"), g,
                             L.i("max-steps"));
        auto e = estimate_payoff(parse_point(L.s("x"), n), cfg, L.i("trials"), L.stream());
        Outcome o{{e.value, e.std_error, e.exits, true}};
        o.details = {{"exits", e.exits}, {"truncated_paths", e.truncated_paths}, {"mean_steps", number(e.mean_steps)}};
        return o;
    };
}

void add_dislocation(Leaf& L) {
    L.text("x", "-0.5,0.5", "initial positions, increasing").text("xi", "1,-1", "orientations (+1/-1)");
    L.real("s", 0.5, "fractional order").real("gamma", 1, "mobility").real("sigma", 0, "constant external stress");
    L.real("t-end", 10, "final time").real("epsilon", 1e-6, "collision gap");
    L.eval = [](Leaf& L) {
        DislocationState st;
        st.x = parse_list(L.s("x"));
        for (double v : parse_list(L.s("xi"))) {
            if (v != 1 && v != -1) throw UsageError("orientations are +1 or -1");
            st.xi.push_back(static_cast<int>(v));
        }
        st.s = L.d("s");
        st.gamma = L.d("gamma");
        if (double sig = L.d("sigma"); sig != 0) st.sigma = [sig](double, double) { return sig; };
        auto r = integrate(st, L.d("t-end"), {}, L.d("epsilon"));
        const char* reason[] = {"t_end", "collision", "blowup_guard"};
        Outcome o{exact(r.times.back())};
        o.est.std_error = r.bracket;
        json cols = json::array();
        for (const auto& c : r.collisions)
            cols.push_back({{"time", number(c.time)}, {"i", c.i}, {"j", c.j}, {"gap", number(c.gap)}});
        o.details = {{"reason", reason[r.terminated]}, {"collisions", cols},
                     {"final_positions", r.positions.back()}, {"steps", r.times.size() - 1}};
        if (st.x.size() == 2 && st.xi[0] != st.xi[1] && !st.sigma)
            o.details["closed_form_collision_time"] = number(pair_collision_time(st.s, st.x[1] - st.x[0], st.gamma));
        return o;
    };
}

// ---------------------------------------------------------------- driver

struct Scan {
    std::string var;
    std::vector<double> grid;
};

Scan parse_scan(const std::string& text, const Leaf& L) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw UsageError("--scan expects var=a:b:step");
    Scan sc;
    sc.var = text.substr(0, eq);
    if (!L.num.count(sc.var)) throw UsageError("cannot scan '" + sc.var + "' for " + L.path);
    std::vector<double> abs;
    std::stringstream ss(text.substr(eq + 1));
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            size_t used = 0;
            abs.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("bad scan range '" + text + "'");
        }
    }
    if (abs.size() != 3) throw UsageError("--scan expects var=a:b:step");
    const double a = abs[0], b = abs[1], step = abs[2];
    if (step > 0 && b >= a) {
        long long count = static_cast<long long>(std::floor((b - a) / step + 1e-9)) + 1;
        for (long long k = 0; k < count; ++k) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", a + k * step);  // 0.05 rather than 0.05000000000000001
            sc.grid.push_back(std::stod(buf));
        }
    }
    if (sc.grid.empty()) throw UsageError("empty scan grid '" + text + "'");
    if (sc.var == "s")
        for (double v : sc.grid)
            if (!(v > 0 && v < 1)) throw UsageError("scan grid must lie inside (0, 1)");
    return sc;
}

json inputs_of(const Leaf& L) {
    json in = json::object();
    for (const auto& [k, v] : L.num) in[k] = number(v);
    for (const auto& [k, v] : L.ints) in[k] = v;
    for (const auto& [k, v] : L.str) in[k] = v;
    for (const auto& [k, v] : L.flags) in[k] = v;
    return in;
}

json versions() {
    return {{"nonlocal", NONLOCAL_VERSION}, {"boost", BOOST_LIB_VERSION}, {"cli11", CLI11_VERSION}};
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Appends config-file entries as flags unless the command line already sets them.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string file;
    for (size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config") {
            if (k + 1 >= args.size()) throw UsageError("--config needs a file");
            file = args[k + 1];
            args.erase(args.begin() + k, args.begin() + k + 2);
            break;
        }
        if (args[k].rfind("--config=", 0) == 0) {
            file = args[k].substr(9);
            args.erase(args.begin() + k);
            break;
        }
    }
    if (file.empty()) return args;
    std::ifstream in(file);
    if (!in) throw UsageError("cannot read config file '" + file + "'");
    std::set<std::string> given;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                             : a.find('=') - 2));
    std::string line;
    auto trim = [](std::string t) {
        auto b = t.find_first_not_of(" \t\r"), e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config lines are key=value: '" + line + "'");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (given.count(key)) continue;
        if (val == "true" || val == "false") {
            if (val == "true") args.push_back("--" + key);
        } else {
            args.push_back("--" + key + "=" + val);
        }
    }
    return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional-order nonlocal analysis toolkit", "nonlocal"};
    app.require_subcommand(1);
    app.set_help_flag("-h,--help", "print this help and exit");
    app.set_help_all_flag("--help-all", "all subcommands");
    std::list<Leaf> leaves;

    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) -> Leaf& {
        Leaf& L = leaves.emplace_back();
        L.app = parent->add_subcommand(name, help);
        L.app->set_help_flag("--help", "print this help and exit");  // frees -h / --h for parameters
        L.path = (parent == &app ? "" : parent->get_name() + " ") + name;
        L.text("format", "json", "output format", {"json", "csv"});
        L.text("scan", "", "scan a parameter: var=a:b:step (CSV output)");
        L.real("rel-tol", 1e-8, "quadrature relative tolerance").real("abs-tol", 1e-10, "quadrature absolute tolerance");
        return L;
    };
    auto group = [&](const std::string& name, const std::string& help) {
        auto* g = app.add_subcommand(name, help);
        g->require_subcommand(1);
        return g;
    };

    add_constants(leaf(&app, "constants", "kernel constants C(n,s), c, a, kappa"));
    auto* fl = group("fraclap", "fractional Laplacian of a test function");
    add_fraclap(leaf(fl, "si", "singular-integral form"), false);
    add_fraclap(leaf(fl, "semigroup", "heat-semigroup form"), true);
    auto* bl = group("ball", "potential theory on balls");
    add_dirichlet(leaf(bl, "dirichlet", "Poisson-kernel solution with exterior data"));
    add_poisson(leaf(bl, "poisson", "Green-function solution with zero exterior data"));
    add_mean(leaf(bl, "mean", "s-mean value"));
    auto* cp = group("caputo", "Caputo derivative and its extension problem");
    add_caputo(leaf(cp, "deriv", "Caputo derivative of the extended solution"), "deriv");
    add_caputo(leaf(cp, "extend", "solution of D^s u = 0 beyond the data"), "extend");
    add_caputo(leaf(cp, "sequence", "blow-up sequence v_j"), "sequence");
    auto* mc = group("marchaud", "Marchaud derivative and its parabolic extension");
    add_marchaud(leaf(mc, "deriv", "Marchaud derivative"), "deriv");
    add_marchaud(leaf(mc, "extend", "extension U(x, t)"), "extend");
    add_marchaud(leaf(mc, "trace", "derivative recovered from the extension"), "trace");
    auto* gm = group("geom", "fractional perimeter and curvature");
    add_perimeter(leaf(gm, "perimeter", "Per_s(E, Omega)"));
    add_curvature(leaf(gm, "curvature", "fractional mean curvature, graph form"), false);
    add_curvature(leaf(gm, "curvature-pv", "fractional mean curvature, principal value"), true);
    add_alpha(leaf(gm, "alpha", "contribution from infinity, s * alpha_s"));
    add_delta(leaf(gm, "delta", "stickiness threshold"));
    add_coarea(leaf(gm, "coarea", "co-area identity residual, lhs - rhs"));
    auto* wk = group("walk", "long-jump random walk");
    add_walk(leaf(wk, "payoff", "expected payoff at exit"));
    auto* ds = group("dislocation", "dislocation dynamics");
    add_dislocation(leaf(ds, "run", "integrate until t_end or a collision"));

    Leaf* chosen = nullptr;
    try {
        auto args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
        for (auto& L : leaves)
            if (L.app->parsed()) chosen = &L;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (!chosen) {
        err << app.help();
        return 2;
    }
    Leaf& L = *chosen;
    json meta_seed = L.seeded ? json(L.i("seed")) : json(nullptr);

    try {
        if (!L.s("scan").empty()) {
            Scan sc = parse_scan(L.s("scan"), L);
            std::ostringstream csv;
            csv << sc.var << ",value,stderr,converged\n";
            bool all = true;
            for (double v : sc.grid) {
                L.num[sc.var] = v;
                Outcome o = L.eval(L);
                all = all && o.est.converged;
                char gv[32];
                std::snprintf(gv, sizeof gv, "%.12g", v);
                csv << gv << ',' << fmt(o.est.value) << ',' << fmt(o.est.std_error) << ','
                    << (o.est.converged ? "true" : "false") << '\n';
            }
            out << csv.str();
            if (!all) err << "warning: some grid points did not converge\n";
            return 0;
        }
        Outcome o = L.eval(L);
        if (L.s("format") == "csv") {
            out << "value,stderr,converged\n"
                << fmt(o.est.value) << ',' << fmt(o.est.std_error) << ',' << (o.est.converged ? "true" : "false")
                << '\n';
        } else {
            json j = estimate_json(o.est);
            if (!o.details.empty()) j["details"] = o.details;
            j["meta"] = {{"command", L.path}, {"inputs", inputs_of(L)}, {"versions", versions()}, {"seed", meta_seed}};
            out << j.dump(2) << '\n';
        }
        if (!o.est.converged) err << "warning: " << L.path << " did not converge\n";
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: InternalError: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace nonlocal::cli
