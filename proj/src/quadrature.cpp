#include "nonlocal/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <queue>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace nonlocal {

namespace {

Rule make_gauss_jacobi(int N, double A, double B) {
    Eigen::VectorXd diag(N), sub(N > 1 ? N - 1 : 1);
    for (int k = 0; k < N; ++k) {
        double ab = 2.0 * k + A + B;
        diag[k] = (k == 0) ? (B - A) / (A + B + 2.0) : (B * B - A * A) / (ab * (ab + 2.0));
    }
    for (int k = 1; k < N; ++k) {
        double ab = 2.0 * k + A + B;
        double bk = (k == 1) ? 4.0 * (1 + A) * (1 + B) / ((2 + A + B) * (2 + A + B) * (3 + A + B))
                             : 4.0 * k * (k + A) * (k + B) * (k + A + B) /
                                   (ab * ab * (ab + 1.0) * (ab - 1.0));
        sub[k - 1] = std::sqrt(bk);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (N > 1) {
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    }
    double mu0 = std::exp((A + B + 1) * std::log(2.0) + std::lgamma(A + 1) + std::lgamma(B + 1) -
                          std::lgamma(A + B + 2));
    Rule r;
    r.x.resize(N);
    r.w.resize(N);
    if (N == 1) {
        r.x[0] = diag[0];
        r.w[0] = mu0;
        return r;
    }
    for (int i = 0; i < N; ++i) {
        r.x[i] = es.eigenvalues()[i];
        double v = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v * v;
    }
    return r;
}

struct Panel {
    double p, q;      // panel in the integration variable (t or u)
    double eL, eR;    // endpoint exponents handled by the rule
    bool tail;        // u-variable panel of the mapped tail
    double value, err, absval;
    bool refinable;
};

struct PanelOrder {
    bool operator()(const Panel& a, const Panel& b) const { return a.err < b.err; }
};

constexpr int kLow = 10;
constexpr int kHigh = 20;

}  // namespace

const Rule& gauss_jacobi(int npts, double a, double b) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(npts, a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, make_gauss_jacobi(npts, a, b)).first->second;
}

QuadResult quad(const Fn1& f, double a, double b, const Weight& w, const QuadSpec& spec,
                const QuadOptions& opt) {
    QuadResult res;
    if (std::isnan(a) || std::isnan(b)) throw DomainError("NaN integration limit");
    if (a > b) throw DomainError("integration requires a < b");
    if (a == b) return res;
    if (!std::isfinite(a)) throw DomainError("lower limit must be finite");
    const bool infinite = std::isinf(b);

    double wa = 0, wb = 0;  // weight exponents at a and b
    switch (w.kind) {
        case Weight::None: break;
        case Weight::LeftPower: wa = w.alpha; break;
        case Weight::RightPower: wb = w.alpha; break;
        case Weight::Jacobi: wa = w.alpha; wb = w.beta; break;
        case Weight::Laguerre: wa = w.alpha; break;
    }
    if (wa <= -1 || wb <= -1) throw DomainError("weight exponent must exceed -1");
    if (infinite && (w.kind == Weight::RightPower || w.kind == Weight::Jacobi))
        throw DomainError("right endpoint weight needs a finite upper limit");
    if (w.kind == Weight::Laguerre && !infinite)
        throw DomainError("laguerre weight needs an infinite upper limit");
    for (auto& sg : opt.singularities)
        if (sg.exponent <= -1) throw DomainError("singularity exponent must exceed -1");

    // Interior structure points of the finite part.
    std::vector<double> cuts;
    double top = a;
    for (double x : opt.breakpoints)
        if (x > a && x < b) cuts.push_back(x), top = std::max(top, x);
    for (auto& sg : opt.singularities)
        if (sg.at > a && sg.at < b) cuts.push_back(sg.at), top = std::max(top, sg.at);

    double c = b;  // end of the finite part
    double L = 1;
    const bool laguerre = w.kind == Weight::Laguerre;
    double tail_exp = 0;
    if (infinite) {
        c = top + (laguerre ? std::max(1.0, opt.tail_scale) : opt.tail_scale);
        L = laguerre ? 1.0 : std::max(std::abs(c), opt.tail_scale);
        double p = laguerre ? 2.0 : opt.decay;
        if (p <= 1) throw IntegrabilityError("tail decay exponent must exceed 1");
        tail_exp = p - 2;
    }
    cuts.push_back(a);
    cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto sing_exp = [&](double x) {
        double e = 0;
        for (auto& sg : opt.singularities)
            if (sg.at == x) e += sg.exponent;
        return e;
    };
    auto endpoint_exp = [&](double x) {
        double e = sing_exp(x);
        if (x == a) e += wa;
        if (!infinite && x == b) e += wb;
        return e;
    };

    // Full integrand in t with the weight factors that are not absorbed by
    // the panel rule.  dl/dr: distances to the panel ends.
    auto g_t = [&](double t, double pl, double dl, double pr, double dr) {
        double v = f(t);
        if (wa != 0 && pl != a) v *= std::pow(t - a, wa);
        if (wb != 0 && pr != b) v *= std::pow(b - t, wb);
        if (laguerre) v *= std::exp(-(t - a));
        double sl = sing_exp(pl);
        if (sl != 0) v /= std::pow(dl, sl);
        double sr = sing_exp(pr);
        if (sr != 0) v /= std::pow(dr, sr);
        return v;
    };

    long long evals = 0;
    auto eval_panel = [&](Panel& P) {
        double vals[2], absv = 0;
        int ns[2] = {kLow, kHigh};
        double h = P.q - P.p;
        for (int k = 0; k < 2; ++k) {
            const Rule& R = gauss_jacobi(ns[k], P.eR, P.eL);
            double acc = 0, aacc = 0;
            for (size_t i = 0; i < R.x.size(); ++i) {
                double dl = 0.5 * h * (1 + R.x[i]);
                double dr = 0.5 * h * (1 - R.x[i]);
                double y = (R.x[i] < 0) ? P.p + dl : P.q - dr;
                double v;
                if (!P.tail) {
                    v = g_t(y, P.p, dl, P.q, dr);
                } else {
                    double u = y;
                    double t = c + L * (1.0 / u - 1.0);
                    double fx = f(t);
                    if (wa != 0) fx *= std::pow(t - a, wa);
                    if (laguerre) fx *= std::exp(-(t - a));
                    if (fx == 0) {
                        v = 0;
                    } else {
                        v = fx * L / (u * u);
                        if (P.eL != 0) v /= std::pow(u, P.eL);
                    }
                }
                acc += R.w[i] * v;
                aacc += R.w[i] * std::abs(v);
            }
            double sc = std::pow(0.5 * h, 1.0 + P.eL + P.eR);
            vals[k] = acc * sc;
            if (k == 1) absv = aacc * sc;
            evals += static_cast<long long>(R.x.size());
        }
        P.value = vals[1];
        P.err = std::abs(vals[1] - vals[0]);
        P.absval = absv;
        if (!std::isfinite(P.value)) throw NonConvergence("non-finite integrand value");
        double mag = std::max(std::abs(P.p), std::abs(P.q));
        P.refinable = h > 1e5 * std::numeric_limits<double>::epsilon() * std::max(mag, 1e-300) &&
                      h > 1e-290;
    };

    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> pq;
    std::vector<Panel> done;
    double run_val = 0, run_err = 0, run_abs = 0;
    auto push = [&](double p, double q, bool tail) {
        Panel P{p, q, 0, 0, tail, 0, 0, 0, true};
        if (!tail) {
            P.eL = endpoint_exp(p);
            P.eR = (infinite && q == c) ? sing_exp(q) : endpoint_exp(q);
        } else {
            P.eL = (p == 0.0) ? tail_exp : 0.0;
        }
        eval_panel(P);
        run_val += P.value;
        run_err += P.err;
        run_abs += P.absval;
        if (P.refinable)
            pq.push(P);
        else
            done.push_back(P);
    };
    for (size_t i = 0; i + 1 < cuts.size(); ++i) push(cuts[i], cuts[i + 1], false);
    if (infinite) push(0.0, 1.0, true);

    auto totals = [&](double& val, double& err, double& absv) {
        val = err = absv = 0;
        auto copy = pq;
        while (!copy.empty()) {
            val += copy.top().value;
            err += copy.top().err;
            absv += copy.top().absval;
            copy.pop();
        }
        for (auto& P : done) val += P.value, err += P.err, absv += P.absval;
    };

    int subdiv = 0;
    const double eps = std::numeric_limits<double>::epsilon();
    bool ok = true;
    while (true) {
        double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(run_val));
        double floor_ = 50 * eps * run_abs;
        if (run_err <= target || run_err <= floor_) break;
        if (pq.empty()) {
            ok = run_err <= std::max(target, 1e3 * floor_);
            break;
        }
        if (subdiv >= spec.max_subdivisions) {
            ok = false;
            break;
        }
        Panel P = pq.top();
        pq.pop();
        run_val -= P.value;
        run_err -= P.err;
        run_abs -= P.absval;
        double m = 0.5 * (P.p + P.q);
        push(P.p, m, P.tail);
        push(m, P.q, P.tail);
        ++subdiv;
        if (subdiv % 256 == 0) totals(run_val, run_err, run_abs);
    }
    double val = 0, err = 0, absv = 0;
    totals(val, err, absv);
    // deterministic final sum in position order
    std::vector<Panel> all = done;
    while (!pq.empty()) all.push_back(pq.top()), pq.pop();
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) {
        return x.tail != y.tail ? !x.tail : x.p < y.p;
    });
    double s = 0, comp = 0;
    for (auto& P : all) {  // Kahan summation
        double yv = P.value - comp;
        double tv = s + yv;
        comp = (tv - s) - yv;
        s = tv;
    }
    res.value = s;
    res.error = err;
    res.evaluations = evals;
    res.panels = static_cast<int>(all.size());
    res.converged = ok;
    return res;
}

Estimate integrate_1d(const Fn1& f, double a, double b, const Weight& w, const QuadSpec& spec,
                      const QuadOptions& opt) {
    spec.validate();
    if (!(a < b)) throw DomainError("integrate_1d requires a < b");
    QuadResult r = quad(f, a, b, w, spec, opt);
    return {r.value, 0.0, r.evaluations, r.converged};
}

namespace {

double wynn(const std::vector<double>& S) {
    size_t m = S.size();
    if (m < 3) return S.back();
    std::vector<double> prev(m, 0.0), cur(S.begin(), S.end());
    double best = S.back();
    for (size_t j = 1; j < m; ++j) {
        std::vector<double> nxt(cur.size() - 1);
        for (size_t k = 0; k + 1 < cur.size(); ++k) {
            double d = cur[k + 1] - cur[k];
            if (d == 0) return (j % 2 == 1) ? cur.back() : best;
            nxt[k] = prev[k + 1] + 1.0 / d;
        }
        prev = cur;
        cur = std::move(nxt);
        if (j % 2 == 0 && !cur.empty()) best = cur.back();
        if (cur.size() < 2) break;
    }
    return best;
}

}  // namespace

OscTail oscillatory_tail(const std::function<double(double, double)>& chunk, double a,
                         double half_period, double tol, int max_chunks) {
    OscTail out;
    std::vector<double> sums;
    double s = 0, prev_est = NAN, prev2 = NAN;
    for (int k = 0; k < max_chunks; ++k) {
        double lo = a + k * half_period;
        double term = chunk(lo, lo + half_period);
        s += term;
        sums.push_back(s);
        ++out.chunks;
        if (sums.size() > 40) sums.erase(sums.begin());
        if (k < 6) continue;
        double est = wynn(sums);
        double d1 = std::abs(est - prev_est), d2 = std::abs(est - prev2);
        if (std::isfinite(d1) && std::isfinite(d2) && std::max(d1, d2) < tol) {
            out.value = est;
            out.error = std::max(d1, d2);
            return out;
        }
        prev2 = prev_est;
        prev_est = est;
    }
    out.value = std::isfinite(prev_est) ? prev_est : s;
    out.error = std::abs(out.value - prev2);
    out.converged = false;
    return out;
}

double sphere_integral(const std::function<double(const Point&)>& g, int n, const QuadSpec& spec,
                       const std::vector<double>& theta_breaks, bool* converged) {
    bool ok = true;
    double v = 0;
    if (n == 1) {
        v = g({1, 0, 0}) + g({-1, 0, 0});
    } else if (n == 2) {
        QuadOptions o;
        o.breakpoints = theta_breaks;
        auto r = quad([&](double th) { return g({std::cos(th), std::sin(th), 0}); }, 0, 2 * kPi,
                      Weight::none(), spec, o);
        ok = r.converged;
        v = r.value;
    } else if (n == 3) {
        QuadSpec inner = spec.tightened(0.1);
        QuadOptions o;
        o.breakpoints = theta_breaks;
        auto r = quad(
            [&](double ph) {
                double sp = std::sin(ph), cp = std::cos(ph);
                auto ri = quad(
                    [&](double th) { return g({sp * std::cos(th), sp * std::sin(th), cp}); }, 0,
                    2 * kPi, Weight::none(), inner, o);
                ok = ok && ri.converged;
                return sp * ri.value;
            },
            0, kPi, Weight::none(), spec);
        ok = ok && r.converged;
        v = r.value;
    } else {
        throw UnsupportedDimension("sphere integrals implemented for n <= 3");
    }
    if (converged) *converged = ok;
    return v;
}

Estimate integrate_nd(const FnN& f, const NdRegion& R, const QuadSpec& spec) {
    spec.validate();
    if (R.n < 1 || R.n > 3) throw UnsupportedDimension("integrate_nd supports n <= 3");
    const int n = R.n;
    bool ok = true;
    long long evals = 0;
    QuadSpec inner = spec.tightened(0.1);
    if (R.kind == NdRegion::Box) {
        std::function<double(int, Point&)> rec = [&](int d, Point& y) -> double {
            if (d == n) {
                ++evals;
                return f(y);
            }
            auto r = quad(
                [&](double t) {
                    Point z = y;
                    z[d] = t;
                    return rec(d + 1, z);
                },
                R.lo[d], R.hi[d], Weight::none(), d == 0 ? spec : inner);
            ok = ok && r.converged;
            return r.value;
        };
        Point y{};
        double v = rec(0, y);
        return {v, 0.0, evals, ok};
    }
    const bool outer = R.kind == NdRegion::BallComplement;
    auto radial = [&](const Point& th) {
        QuadOptions o;
        std::vector<Singularity> sg;
        if (R.inner_exponent != 0) o.singularities.push_back({R.r_in, R.inner_exponent});
        if (!outer && R.outer_exponent != 0) o.singularities.push_back({R.r_out, R.outer_exponent});
        o.decay = R.decay;
        o.tail_scale = std::max(1.0, R.r_in);
        auto r = quad(
            [&](double rr) {
                ++evals;
                return f(axpy(rr, th, R.center)) * std::pow(rr, n - 1);
            },
            R.r_in, outer ? kInf : R.r_out, Weight::none(), inner, o);
        ok = ok && r.converged;
        return r.value;
    };
    bool sok = true;
    double v = sphere_integral(radial, n, spec, {}, &sok);
    return {v, 0.0, evals, ok && sok};
}

}  // namespace nonlocal
