#include <algorithm>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "nonlocal/dynamics.hpp"

namespace nonlocal {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

void DislocationState::validate() const {
    FracParams(1, s);
    if (!(gamma > 0)) throw DomainError("mobility must be positive");
    if (x.size() != xi.size()) throw DomainError("one orientation per dislocation");
    if (x.empty()) throw DomainError("need at least one dislocation");
    for (int o : xi)
        if (o != 1 && o != -1) throw DomainError("orientations are +1 or -1");
    for (size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw DomainError("positions must be strictly increasing");
}

namespace {

void rhs(const DislocationState& st, const State& x, State& dx, double t) {
    const size_t N = x.size();
    const double s = st.s;
    for (size_t i = 0; i < N; ++i) {
        double v = st.sigma ? -st.xi[i] * st.sigma(t, x[i]) : 0.0;
        for (size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            double d = x[i] - x[j];
            if (d == 0) throw SingularState("coincident dislocations");
            v += st.xi[i] * st.xi[j] * d / (2 * s * std::pow(std::abs(d), 2 * s + 1));
        }
        dx[i] = st.gamma * v;
    }
}

// smallest neighbouring gap and its left index (negative once the order breaks)
std::pair<double, int> min_gap(const State& x) {
    double g = std::numeric_limits<double>::infinity();
    int k = 0;
    for (size_t i = 1; i < x.size(); ++i)
        if (x[i] - x[i - 1] < g) {
            g = x[i] - x[i - 1];
            k = static_cast<int>(i - 1);
        }
    return {g, k};
}

}  // namespace

std::vector<double> velocity(const DislocationState& st) {
    st.validate();
    State dx(st.x.size());
    rhs(st, st.x, dx, st.t);
    return dx;
}

TrajectoryResult integrate(const DislocationState& st, double t_end, const StepControl& ctrl,
                           double epsilon_collision) {
    st.validate();
    if (!(t_end > st.t)) throw DomainError("t_end must lie after the initial time");
    if (!(epsilon_collision > 0)) throw DomainError("collision threshold must be positive");
    TrajectoryResult out;
    State x = st.x;
    double t = st.t;
    out.times.push_back(t);
    out.positions.push_back(x);
    if (x.size() > 1 && min_gap(x).first < epsilon_collision) {
        auto [g, k] = min_gap(x);
        out.collisions.push_back({t, k, k + 1, g});
        out.terminated = TrajectoryResult::Collision;
        return out;
    }

    auto sys = [&](const State& y, State& dy, double tt) { rhs(st, y, dy, tt); };
    auto stepper = odeint::make_controlled(ctrl.abs_tol, ctrl.rel_tol, odeint::runge_kutta_dopri5<State>());
    odeint::runge_kutta_dopri5<State> plain;
    double dt = std::min(ctrl.max_dt, (t_end - t) / 16);
    double next_snap = t + ctrl.snapshot_dt;
    const double exponent = 2 * st.s + 1;

    for (long long step = 0; step < ctrl.max_steps; ++step) {
        if (x.size() > 1) dt = std::min(dt, ctrl.gap_factor * std::pow(min_gap(x).first, exponent) / st.gamma);
        dt = std::min(dt, t_end - t);
        const double floor_dt = 1e-15 * std::max(1.0, std::abs(t));
        if (!(dt > floor_dt)) {
            // below time resolution: accept only if the closing gap reaches epsilon within it
            if (x.size() > 1) {
                auto [g, k] = min_gap(x);
                State v(x.size());
                rhs(st, x, v, t);
                double closing = v[k] - v[k + 1];
                double tau = (g - 0.5 * epsilon_collision) / closing;
                if (closing > 0 && tau < 64 * floor_dt) {
                    for (size_t i = 0; i < x.size(); ++i) x[i] += tau * v[i];
                    out.times.push_back(t + tau);
                    out.positions.push_back(x);
                    out.collisions.push_back({t + tau, k, k + 1, min_gap(x).first});
                    out.terminated = TrajectoryResult::Collision;
                    out.bracket = tau;
                    return out;
                }
            }
            throw BlowupGuard("step size underflow without a collision");
        }
        State trial = x;
        double tt = t, h = dt;
        odeint::controlled_step_result r;
        try {
            r = stepper.try_step(sys, trial, tt, h);
        } catch (const SingularState&) {
            dt /= 4;
            continue;
        }
        if (r == odeint::fail) {
            dt = h;
            continue;
        }
        bool crossed = x.size() > 1 && !(min_gap(trial).first >= epsilon_collision);
        if (crossed) {
            // bisect the collision time with plain steps from (t, x)
            double lo = 0, hi = tt - t;
            State y;
            while (hi - lo > 1e-10 * std::max(1.0, t) && hi - lo > 1e-15) {
                double mid = 0.5 * (lo + hi);
                y = x;
                bool ok = true;
                try {
                    plain.do_step(sys, y, t, mid);
                } catch (const SingularState&) {
                    ok = false;
                }
                if (ok && min_gap(y).first >= epsilon_collision)
                    lo = mid;
                else
                    hi = mid;
            }
            // report the state at the upper end, where the gap is below epsilon
            y = x;
            try {
                plain.do_step(sys, y, t, hi);
            } catch (const SingularState&) {
                y = x;
                plain.do_step(sys, y, t, lo);
            }
            auto [g, k] = min_gap(y);
            double tc = t + 0.5 * (lo + hi);
            out.times.push_back(tc);
            out.positions.push_back(y);
            out.collisions.push_back({tc, k, k + 1, g});
            out.terminated = TrajectoryResult::Collision;
            out.bracket = hi - lo;
            return out;
        }
        x = trial;
        t = tt;
        dt = std::min(h, ctrl.max_dt);
        if (ctrl.snapshot_dt <= 0 || t >= next_snap || t >= t_end) {
            out.times.push_back(t);
            out.positions.push_back(x);
            next_snap += ctrl.snapshot_dt;
        }
        if (t >= t_end) return out;
    }
    throw NonConvergence("step budget exhausted");
}

double pair_collision_time(double s, double theta0, double gamma) {
    FracParams(1, s);
    return s * std::pow(theta0, 2 * s + 1) / ((2 * s + 1) * gamma);
}

double pair_repulsive_gap(double s, double theta0, double gamma, double t) {
    FracParams(1, s);
    return std::pow(std::pow(theta0, 2 * s + 1) + (2 * s + 1) * gamma * t / s, 1 / (2 * s + 1));
}

}  // namespace nonlocal
