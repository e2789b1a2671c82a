#pragma once

#include <memory>
#include <vector>

#include "nonlocal/core.hpp"
#include "nonlocal/fraclap.hpp"
#include "nonlocal/rng.hpp"

namespace nonlocal {

// P(k) = c_walk k^{-1-2s}: exact table for k <= table_size, continuous Pareto
// tail above (drawn by inversion and rounded up).
struct JumpLaw {
    double s = 0.5;
    double c_walk = 0;
    std::vector<double> cdf;  // cdf[k-1] = P(K <= k)
    double tail_mass = 0;     // P(K > table_size)

    JumpLaw() = default;
    JumpLaw(double s, int table_size = 65536);
    long long draw(double u, double v) const;  // two uniforms in (0, 1)
    double tail_probability(long long K) const;  // P(K > k) summed exactly
};

// sum_{k >= 1} k^{-1-2s} (partial sums plus Euler-Maclaurin remainder)
double walk_zeta(double s);

struct WalkConfig {
    FracParams p;
    double h = 0.05;
    double tau = 0;  // h^{2s}
    Point centre{};
    double radius = 1;  // domain: closed ball B_radius(centre); exits are strictly outside
    ScalarField payoff;  // support_radius must be finite
    long long max_steps = 1'000'000;
    std::shared_ptr<const JumpLaw> law;

    double c_walk() const { return law->c_walk; }
    void validate() const;
};
WalkConfig make_walk(const FracParams& p, double h, const Point& centre, double radius, ScalarField payoff,
                     long long max_steps = 1'000'000);

Point sample_jump(const WalkConfig& cfg, RngCursor& rng);
std::pair<Point, RngStream> sample_jump(const WalkConfig& cfg, const RngStream& stream);

struct PayoffEstimate {
    double value = 0;
    double std_error = 0;
    long long exits = 0;
    long long truncated_paths = 0;
    double mean_steps = 0;
};
PayoffEstimate estimate_payoff(const Point& x0, const WalkConfig& cfg, long long trials,
                               const RngStream& stream);

}  // namespace nonlocal
