#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "nonlocal/geomset.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

namespace {

constexpr double kTwoPi = 2 * kPi;

double wrap(double t) {
    double w = std::fmod(t, kTwoPi);
    return w < 0 ? w + kTwoPi : w;
}

// {t : cos(t - phi) > k}
ArcSet cos_above(double phi, double k) {
    if (k >= 1) return ArcSet::empty();
    if (k < -1) return ArcSet::full();
    double w = std::acos(k);
    return ArcSet::between(phi - w, phi + w);
}

std::vector<std::pair<double, double>> merge(std::vector<std::pair<double, double>> v) {
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> out;
    for (auto& iv : v) {
        if (!(iv.second > iv.first)) continue;
        if (!out.empty() && iv.first <= out.back().second)
            out.back().second = std::max(out.back().second, iv.second);
        else
            out.push_back(iv);
    }
    return out;
}

std::vector<std::pair<double, double>> overlap(const std::vector<std::pair<double, double>>& a,
                                               const std::vector<std::pair<double, double>>& b) {
    std::vector<std::pair<double, double>> out;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double lo = std::max(a[i].first, b[j].first), hi = std::min(a[i].second, b[j].second);
        if (hi > lo) out.push_back({lo, hi});
        if (a[i].second < b[j].second)
            ++i;
        else
            ++j;
    }
    return out;
}

std::vector<std::pair<double, double>> gaps(const std::vector<std::pair<double, double>>& a, double lo,
                                            double hi) {
    std::vector<std::pair<double, double>> out;
    double cur = lo;
    for (auto& iv : a) {
        if (iv.first > cur) out.push_back({cur, iv.first});
        cur = std::max(cur, iv.second);
    }
    if (hi > cur) out.push_back({cur, hi});
    return out;
}

Point unit(const Point& v, int n) {
    double l = norm(v, n);
    if (!(l > 0)) throw DomainError("normal vector must be nonzero");
    return scale(1 / l, v);
}

bool in_sectors(const std::vector<std::pair<double, double>>& sec, double t) {
    for (auto& [a, b] : sec) {
        if (b - a >= kTwoPi) return true;
        double d = wrap(t - a);
        if (d > 0 && d < b - a) return true;
    }
    return false;
}

ArcSet sector_arcs(double t1, double t2, const Point& c, double r) {
    double w = t2 - t1;
    if (w >= kTwoPi) return ArcSet::full();
    if (w > kPi) return sector_arcs(t1, t1 + w / 2, c, r) | sector_arcs(t1 + w / 2, t2, c, r);
    // intersection of {n1 . y > 0} and {n2 . y > 0}
    Point n1{-std::sin(t1), std::cos(t1), 0}, n2{std::sin(t2), -std::cos(t2), 0};
    auto half = [&](const Point& nv) {
        return cos_above(std::atan2(nv[1], nv[0]), -dot(nv, c, 2) / r);
    };
    return half(n1) & half(n2);
}

}  // namespace

ArcSet ArcSet::full() { return {{{0.0, kTwoPi}}}; }

ArcSet ArcSet::between(double lo, double hi) {
    if (!(hi > lo)) return empty();
    if (hi - lo >= kTwoPi) return full();
    double a = wrap(lo), b = a + (hi - lo);
    if (b <= kTwoPi) return {{{a, b}}};
    return {{{0.0, b - kTwoPi}, {a, kTwoPi}}};
}

ArcSet ArcSet::operator|(const ArcSet& o) const {
    auto v = arcs;
    v.insert(v.end(), o.arcs.begin(), o.arcs.end());
    return {merge(v)};
}
ArcSet ArcSet::operator&(const ArcSet& o) const { return {overlap(arcs, o.arcs)}; }
ArcSet ArcSet::operator~() const { return {gaps(arcs, 0, kTwoPi)}; }
double ArcSet::measure() const {
    double m = 0;
    for (auto& [a, b] : arcs) m += b - a;
    return m;
}

IntervalList normalize(IntervalList v) { return merge(std::move(v)); }
IntervalList intersect(const IntervalList& a, const IntervalList& b) { return overlap(a, b); }
IntervalList complement(const IntervalList& a) { return gaps(a, -kInf, kInf); }
IntervalList subtract(const IntervalList& a, const IntervalList& b) {
    return overlap(a, complement(b));
}
double length(const IntervalList& a) {
    double l = 0;
    for (auto& [lo, hi] : a) l += hi - lo;
    return l;
}

GraphData graph_preset(const std::string& name) {
    GraphData g;
    g.name = name;
    auto sc = [](double t) { return std::pair{std::sin(t), std::cos(t)}; };
    if (name == "parabola") {
        g.u = [](double x) { return x * x; };
        g.du = [](double x) { return 2 * x; };
        g.far = [sc](double t, double L) {
            auto [s, c] = sc(t);
            if (s <= 0) return false;
            return c == 0 || std::log(s) > L + 2 * std::log(std::abs(c));
        };
    } else if (name == "cubic") {
        g.u = [](double x) { return x * x * x; };
        g.du = [](double x) { return 3 * x * x; };
        g.far = [sc](double t, double L) {
            auto [s, c] = sc(t);
            if (c == 0) return s > 0;
            if (c > 0) return s > 0 && std::log(s) > 2 * L + 3 * std::log(c);
            if (s >= 0) return true;
            return std::log(-s) < 2 * L + 3 * std::log(-c);
        };
    } else if (name == "tanh") {
        g.u = [](double x) { return std::tanh(x); };
        g.du = [](double x) { return 1 / (std::cosh(x) * std::cosh(x)); };
        g.far = [sc](double t, double) {
            auto [s, c] = sc(t);
            return s > 0 || (s == 0 && c < 0);
        };
    } else if (name == "sqrt-sublinear" || name == "neg-sqrt-sublinear") {
        const double sg = name[0] == 'n' ? -1 : 1;
        g.u = [sg](double x) { return sg * std::sqrt(std::abs(x)); };
        g.du = [sg](double x) {
            return x == 0 ? 0.0 : sg * (x > 0 ? 1 : -1) / (2 * std::sqrt(std::abs(x)));
        };
        g.holder = 0;
        g.far = [sc, sg](double t, double L) {
            auto [s, c] = sc(t);
            double bound = c == 0 ? -kInf : -L / 2 + 0.5 * std::log(std::abs(c));
            if (sg > 0) return s > 0 && std::log(s) > bound;
            return s >= 0 || std::log(-s) < bound;
        };
    } else {
        throw DomainError("unknown graph preset '" + name + "'");
    }
    return g;
}

GeomSet halfspace(const Point& nu, double a, int n) {
    if (n < 1 || n > 3) throw UnsupportedDimension("half-spaces live in dimension 1..3");
    GeomSet e;
    e.kind = GeomSet::HalfSpace;
    e.n = n;
    e.nu = unit(nu, n);
    e.a = a / norm(nu, n);
    return e;
}

GeomSet ball(const Point& c, double R, int n) {
    if (n < 1 || n > 3) throw UnsupportedDimension("balls live in dimension 1..3");
    if (!(R > 0)) throw DomainError("ball radius must be positive");
    GeomSet e;
    e.kind = GeomSet::Ball;
    e.n = n;
    e.c = c;
    e.R = R;
    return e;
}

GeomSet cone2d(std::vector<std::pair<double, double>> sectors) {
    for (auto& [a, b] : sectors)
        if (!(b > a)) throw DomainError("cone sectors need t1 < t2");
    GeomSet e;
    e.kind = GeomSet::Cone2D;
    e.n = 2;
    e.sectors = std::move(sectors);
    return e;
}

GeomSet cap_cone(const Point& axis, double half_angle, int n) {
    if (!(half_angle > 0 && half_angle <= kPi)) throw DomainError("cap half-angle must lie in (0, pi]");
    GeomSet e;
    e.kind = GeomSet::Cap;
    e.n = n;
    e.nu = unit(axis, n);
    e.a = half_angle;
    return e;
}

GeomSet supergraph(GraphData g) {
    if (!g.u) throw DomainError("supergraph needs a graph function");
    GeomSet e;
    e.kind = GeomSet::Supergraph;
    e.n = 2;
    e.graph = std::make_shared<GraphData>(std::move(g));
    return e;
}

GeomSet intervals(IntervalList v) {
    for (auto& [a, b] : v)
        if (!(b > a)) throw DomainError("intervals need a < b");
    GeomSet e;
    e.kind = GeomSet::Intervals;
    e.n = 1;
    e.intervals = normalize(std::move(v));
    return e;
}

namespace {
GeomSet combine(GeomSet::Kind k, const GeomSet& A, const GeomSet* B) {
    if (B && A.n != B->n) throw DomainError("combined sets must share a dimension");
    GeomSet e;
    e.kind = k;
    e.n = A.n;
    e.A = std::make_shared<const GeomSet>(A);
    if (B) e.B = std::make_shared<const GeomSet>(*B);
    return e;
}
}  // namespace

GeomSet difference(const GeomSet& A, const GeomSet& B) { return combine(GeomSet::Difference, A, &B); }
GeomSet set_union(const GeomSet& A, const GeomSet& B) { return combine(GeomSet::Union, A, &B); }
GeomSet set_complement(const GeomSet& A) { return combine(GeomSet::Complement, A, nullptr); }

bool GeomSet::contains(const Point& y) const {
    switch (kind) {
        case HalfSpace: return dot(y, nu, n) > a;
        case Ball: return dist(y, c, n) < R;
        case Cone2D: return (y[0] != 0 || y[1] != 0) && in_sectors(sectors, std::atan2(y[1], y[0]));
        case Cap: {
            double l = norm(y, n);
            return l > 0 && dot(y, nu, n) > l * std::cos(a);
        }
        case Supergraph: return y[1] > graph->u(y[0]);
        case Intervals:
            for (auto& [lo, hi] : intervals)
                if (y[0] > lo && y[0] < hi) return true;
            return false;
        case Difference: return A->contains(y) && !B->contains(y);
        case Union: return A->contains(y) || B->contains(y);
        case Complement: return !A->contains(y);
    }
    return false;
}

bool GeomSet::contains_far(const Point& dir, double log_r) const {
    if (log_r < 600) return contains(scale(std::exp(log_r), dir));
    switch (kind) {
        case HalfSpace: {
            double d = dot(dir, nu, n);
            return d != 0 ? d > 0 : 0 > a;
        }
        case Ball: return false;
        case Cone2D:
        case Cap: return contains(dir);
        case Supergraph:
            if (graph->far) return graph->far(std::atan2(dir[1], dir[0]), log_r);
            return contains(scale(1e300, dir));
        case Intervals:
            if (intervals.empty()) return false;
            return dir[0] > 0 ? intervals.back().second == kInf : intervals.front().first == -kInf;
        case Difference: return A->contains_far(dir, log_r) && !B->contains_far(dir, log_r);
        case Union: return A->contains_far(dir, log_r) || B->contains_far(dir, log_r);
        case Complement: return !A->contains_far(dir, log_r);
    }
    return false;
}

ArcSet GeomSet::arcs(const Point& centre, double r) const {
    if (n != 2) throw UnsupportedDimension("circle sections are planar");
    if (!(r > 0)) throw DomainError("circle radius must be positive");
    switch (kind) {
        case HalfSpace:
            return cos_above(std::atan2(nu[1], nu[0]), (a - dot(nu, centre, 2)) / r);
        case Ball: {
            Point d = sub(c, centre);
            double D = norm(d, 2);
            if (D == 0) return r < R ? ArcSet::full() : ArcSet::empty();
            return cos_above(std::atan2(d[1], d[0]), (D * D + r * r - R * R) / (2 * r * D));
        }
        case Cone2D: {
            ArcSet out;
            for (auto& [t1, t2] : sectors) out = out | sector_arcs(t1, t2, centre, r);
            return out;
        }
        case Cap: throw UnsupportedDimension("cap cones are not planar; use cone2d");
        case Supergraph: {
            // Sample the circle and bisect every membership change.
            const int M = 2048;
            auto in = [&](double t) {
                return contains({centre[0] + r * std::cos(t), centre[1] + r * std::sin(t), 0});
            };
            std::vector<char> m(M + 1);
            for (int i = 0; i <= M; ++i) m[i] = in(kTwoPi * i / M);
            std::vector<std::pair<double, double>> out;
            double start = m[0] ? 0.0 : -1;
            for (int i = 0; i < M; ++i) {
                if (m[i] == m[i + 1]) continue;
                double lo = kTwoPi * i / M, hi = kTwoPi * (i + 1) / M;
                for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (in(mid) == static_cast<bool>(m[i]) ? lo : hi) = mid;
                }
                double t = 0.5 * (lo + hi);
                if (m[i]) {
                    out.push_back({start, t});
                    start = -1;
                } else {
                    start = t;
                }
            }
            if (start >= 0) out.push_back({start, kTwoPi});
            return {merge(out)};
        }
        case Intervals: throw UnsupportedDimension("interval sets are one-dimensional");
        case Difference: return A->arcs(centre, r) & ~B->arcs(centre, r);
        case Union: return A->arcs(centre, r) | B->arcs(centre, r);
        case Complement: return ~A->arcs(centre, r);
    }
    return {};
}

std::vector<double> GeomSet::radial_breaks(const Point& centre) const {
    std::vector<double> out;
    switch (kind) {
        case HalfSpace: out.push_back(std::abs(a - dot(nu, centre, n))); break;
        case Ball: {
            double D = dist(c, centre, n);
            out.push_back(std::abs(D - R));
            out.push_back(D + R);
            break;
        }
        case Cone2D:
            out.push_back(norm(centre, 2));
            for (auto& [t1, t2] : sectors) {
                out.push_back(std::abs(-std::sin(t1) * centre[0] + std::cos(t1) * centre[1]));
                out.push_back(std::abs(std::sin(t2) * centre[0] - std::cos(t2) * centre[1]));
            }
            break;
        case Difference:
        case Union: {
            out = A->radial_breaks(centre);
            auto b = B->radial_breaks(centre);
            out.insert(out.end(), b.begin(), b.end());
            break;
        }
        case Complement: out = A->radial_breaks(centre); break;
        default: break;
    }
    return out;
}

double GeomSet::bounding_radius(const Point& centre) const {
    switch (kind) {
        case Ball: return dist(c, centre, n) + R;
        case Intervals: {
            double m = 0;
            for (auto& [lo, hi] : intervals)
                m = std::max({m, std::abs(lo - centre[0]), std::abs(hi - centre[0])});
            return m;
        }
        case Difference: return A->bounding_radius(centre);
        case Union: return std::max(A->bounding_radius(centre), B->bounding_radius(centre));
        default: return kInf;
    }
}

IntervalList GeomSet::to_intervals() const {
    if (n != 1) throw UnsupportedDimension("interval form needs n = 1");
    switch (kind) {
        case HalfSpace:
            return nu[0] > 0 ? IntervalList{{a, kInf}} : IntervalList{{-kInf, -a}};
        case Ball: return {{c[0] - R, c[0] + R}};
        case Intervals: return intervals;
        case Difference: return subtract(A->to_intervals(), B->to_intervals());
        case Union: {
            auto v = A->to_intervals();
            auto b = B->to_intervals();
            v.insert(v.end(), b.begin(), b.end());
            return normalize(v);
        }
        case Complement: return complement(A->to_intervals());
        default: throw UnsupportedDimension("set has no interval form");
    }
}

// ---- descriptor parser ----

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\n"), b = s.find_last_not_of(" \t\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double number(const std::string& s) {
    std::string t = trim(s);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0') throw DomainError("bad number '" + s + "'");
    return v;
}

std::vector<double> numbers(const std::string& s) {
    std::vector<double> v;
    for (auto& p : split(s, ',')) v.push_back(number(p));
    return v;
}

std::pair<double, double> pair_of(const std::string& s) {
    auto v = numbers(s);
    if (v.size() != 2) throw DomainError("expected a pair '" + s + "'");
    return {v[0], v[1]};
}

Point vec(const std::vector<double>& v) {
    if (v.empty() || v.size() > 3) throw DomainError("vectors have 1 to 3 components");
    Point p{};
    for (size_t i = 0; i < v.size(); ++i) p[i] = v[i];
    return p;
}

std::pair<std::vector<double>, double> keyed(const std::string& body, const std::string& kv,
                                             const std::string& ks) {
    std::vector<double> v;
    double x = 0;
    bool hv = false, hs = false;
    for (auto& part : split(body, ';')) {
        auto eq = part.find('=');
        if (eq == std::string::npos) throw DomainError("expected key=value in '" + part + "'");
        std::string k = trim(part.substr(0, eq)), val = part.substr(eq + 1);
        if (k == kv) {
            v = numbers(val);
            hv = true;
        } else if (k == ks) {
            x = number(val);
            hs = true;
        } else {
            throw DomainError("unknown key '" + k + "'");
        }
    }
    if (!hv || !hs) throw DomainError("missing " + kv + " or " + ks);
    return {v, x};
}

GeomSet parse(const std::string& text);

std::string named(const std::string& t) {
    if (t == "dimple") return "diff(ball:c=0,0;R=2,ball:c=2,0;R=1)";
    if (t == "candy")
        return "union(ball:c=0,0;R=1,diff(graph:neg-sqrt-sublinear,graph:sqrt-sublinear))";
    if (t == "parabola" || t == "cubic" || t == "tanh") return "graph:" + t;
    if (t == "half-line") return "intervals:0,inf";
    if (t == "halfplane") return "halfspace:nu=0,1;a=0";
    if (t == "exterior-halfplane") return "diff(halfspace:nu=0,1;a=0,ball:c=0,0;R=1)";
    return "";
}

GeomSet parse_binary(const std::string& inner, bool is_diff) {
    std::vector<GeomSet> found;
    int depth = 0;
    for (size_t i = 0; i < inner.size(); ++i) {
        char ch = inner[i];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch != ',' || depth != 0) continue;
        try {
            GeomSet A = parse(inner.substr(0, i)), B = parse(inner.substr(i + 1));
            found.push_back(is_diff ? difference(A, B) : set_union(A, B));
        } catch (const Error&) {
        }
    }
    if (found.size() != 1) throw DomainError("cannot split '" + inner + "' into two sets");
    return found[0];
}

GeomSet parse(const std::string& text) {
    std::string t = trim(text);
    if (auto nm = named(t); !nm.empty()) return parse(nm);
    for (const char* op : {"diff(", "union(", "compl("}) {
        std::string o = op;
        if (t.rfind(o, 0) == 0) {
            if (t.back() != ')') throw DomainError("unbalanced '" + t + "'");
            std::string inner = t.substr(o.size(), t.size() - o.size() - 1);
            if (o == "compl(") return set_complement(parse(inner));
            return parse_binary(inner, o == "diff(");
        }
    }
    auto colon = t.find(':');
    if (colon == std::string::npos) throw DomainError("unknown set '" + t + "'");
    std::string kind = t.substr(0, colon), body = t.substr(colon + 1);
    if (kind == "halfspace") {
        auto [v, a] = keyed(body, "nu", "a");
        return halfspace(vec(v), a, static_cast<int>(v.size()));
    }
    if (kind == "ball") {
        auto [v, R] = keyed(body, "c", "R");
        return ball(vec(v), R, static_cast<int>(v.size()));
    }
    if (kind == "cone2d") {
        if (body.rfind("arcs=", 0) != 0) throw DomainError("cone2d needs arcs=");
        std::vector<std::pair<double, double>> sec;
        for (auto& p : split(body.substr(5), ';')) sec.push_back(pair_of(p));
        return cone2d(sec);
    }
    if (kind == "graph") return supergraph(graph_preset(trim(body)));
    if (kind == "intervals") {
        IntervalList v;
        for (auto& p : split(body, ';')) v.push_back(pair_of(p));
        return intervals(v);
    }
    throw DomainError("unknown set kind '" + kind + "'");
}

}  // namespace

GeomSet parse_set(const std::string& text) { return parse(text); }

}  // namespace nonlocal
