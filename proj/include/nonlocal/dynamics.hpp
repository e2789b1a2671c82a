#pragma once

#include <functional>
#include <vector>

#include "nonlocal/core.hpp"

namespace nonlocal {

// x_i' = gamma ( -xi_i sigma(t, x_i) + sum_{j != i} xi_i xi_j (x_i - x_j) / (2s |x_i - x_j|^{2s+1}) )
struct DislocationState {
    std::vector<double> x;
    std::vector<int> xi;  // +1 / -1
    double s = 0.5;
    double gamma = 1;
    std::function<double(double t, double x)> sigma;  // empty: no external stress
    double t = 0;

    void validate() const;
};

std::vector<double> velocity(const DislocationState& st);

struct StepControl {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double gap_factor = 0.02;  // dt <= gap_factor * gap^{2s+1} / gamma
    double max_dt = 1e-2;
    long long max_steps = 10'000'000;
    double snapshot_dt = 0;  // 0: record every accepted step
};

struct CollisionEvent {
    double time = 0;
    int i = 0, j = 0;
    double gap = 0;
};

struct TrajectoryResult {
    enum Reason { TEnd, Collision, BlowupGuard };
    std::vector<double> times;
    std::vector<std::vector<double>> positions;
    std::vector<CollisionEvent> collisions;
    Reason terminated = TEnd;
    double bracket = 0;  // width of the final collision-time bracket
};

TrajectoryResult integrate(const DislocationState& st, double t_end, const StepControl& ctrl = {},
                           double epsilon_collision = 1e-6);

// Closed forms for a pair with sigma = 0.
double pair_collision_time(double s, double theta0, double gamma);
double pair_repulsive_gap(double s, double theta0, double gamma, double t);

}  // namespace nonlocal
