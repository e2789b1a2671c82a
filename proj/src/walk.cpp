#include <algorithm>

#include "nonlocal/walk.hpp"

namespace nonlocal {

double walk_zeta(double s) {
    FracParams(1, s);
    const double e = 1 + 2 * s;
    const int K = 4096;
    double sum = 0;
    for (int k = K; k >= 1; --k) sum += std::pow(k, -e);
    // sum_{k > K} k^{-e} = int_K^inf - f(K)/2 - f'(K)/12 + f'''(K)/720 - ...
    double Kd = K;
    sum += std::pow(Kd, 1 - e) / (e - 1) - 0.5 * std::pow(Kd, -e) + e / 12 * std::pow(Kd, -e - 1) -
           e * (e + 1) * (e + 2) / 720 * std::pow(Kd, -e - 3);
    return sum;
}

JumpLaw::JumpLaw(double s_, int table_size) : s(s_) {
    FracParams(1, s);
    if (table_size < 1) throw DomainError("jump table needs at least one entry");
    c_walk = 1 / walk_zeta(s);
    cdf.resize(table_size);
    double acc = 0;
    for (int k = 1; k <= table_size; ++k) {
        acc += c_walk * std::pow(k, -1 - 2 * s);
        cdf[k - 1] = acc;
    }
    tail_mass = tail_probability(table_size);
}

double JumpLaw::tail_probability(long long K) const {
    if (K < 1) return 1.0;
    double head = 0;
    if (K <= static_cast<long long>(cdf.size())) return 1 - cdf[K - 1] > 0 ? (1 - cdf[K - 1]) : 0.0;
    for (long long k = 1; k <= K; ++k) head += std::pow(k, -1 - 2 * s);
    return 1 - c_walk * head;
}

long long JumpLaw::draw(double u, double v) const {
    const double table_mass = 1 - tail_mass;
    if (u < table_mass) {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        return std::min<long long>(it - cdf.begin() + 1, static_cast<long long>(cdf.size()));
    }
    // Pareto: P(X > x) = (x / K)^{-2s} for x >= K, then K = ceil(X) > table size
    double K = static_cast<double>(cdf.size());
    double x = K * std::pow(v, -1 / (2 * s));
    if (!(x < 9e18)) return static_cast<long long>(9e18);
    return std::max<long long>(static_cast<long long>(std::ceil(x)), static_cast<long long>(cdf.size()) + 1);
}

void WalkConfig::validate() const {
    FracParams(p.n, p.s);
    if (!(h > 0)) throw DomainError("space step must be positive");
    if (!(radius > 0)) throw DomainError("domain radius must be positive");
    if (!payoff.eval) throw DomainError("walk needs a payoff");
    if (!std::isfinite(payoff.support_radius))
        throw DomainError("payoff support must be bounded (set support_radius)");
    if (max_steps < 1) throw DomainError("max_steps must be positive");
    if (!law || law->s != p.s) throw DomainError("jump law does not match the order");
}

WalkConfig make_walk(const FracParams& p, double h, const Point& centre, double radius, ScalarField payoff,
                     long long max_steps) {
    WalkConfig c;
    c.p = p;
    c.h = h;
    c.tau = std::pow(h, 2 * p.s);
    c.centre = centre;
    c.radius = radius;
    c.payoff = std::move(payoff);
    c.max_steps = max_steps;
    c.law = std::make_shared<JumpLaw>(p.s);
    c.validate();
    return c;
}

Point sample_jump(const WalkConfig& cfg, RngCursor& rng) {
    double u = rng.uniform_open(), v = rng.uniform_open();
    long long k = cfg.law->draw(u, v);
    return scale(static_cast<double>(k) * cfg.h, rng.unit_vector(cfg.p.n));
}

std::pair<Point, RngStream> sample_jump(const WalkConfig& cfg, const RngStream& stream) {
    RngCursor c(stream);
    Point d = sample_jump(cfg, c);
    return {d, c.state()};
}

PayoffEstimate estimate_payoff(const Point& x0, const WalkConfig& cfg, long long trials,
                               const RngStream& stream) {
    cfg.validate();
    const int n = cfg.p.n;
    if (!(dist(x0, cfg.centre, n) < cfg.radius)) throw DomainError("start point must be inside the domain");
    if (trials < 2) throw DomainError("need at least two trials");
    const long long block = 4096, blocks = (trials + block - 1) / block;
    std::vector<Welford> acc(blocks), steps(blocks);
    std::vector<long long> cut(blocks, 0);
    parallel_blocks(blocks, [&](long long b) {
        RngCursor rng(substream(stream, static_cast<std::uint64_t>(b)));
        long long cnt = std::min(block, trials - b * block);
        for (long long i = 0; i < cnt; ++i) {
            Point x = x0;
            long long k = 0;
            while (dist(x, cfg.centre, n) <= cfg.radius && k < cfg.max_steps) {
                x = axpy(1.0, sample_jump(cfg, rng), x);
                ++k;
            }
            if (dist(x, cfg.centre, n) <= cfg.radius) {
                ++cut[b];
                continue;
            }
            double g = dist(x, Point{}, n) < cfg.payoff.support_radius ? cfg.payoff(x) : 0.0;
            acc[b].add(g);
            steps[b].add(static_cast<double>(k));
        }
    });
    Welford all, st;
    long long truncated = 0;
    for (long long b = 0; b < blocks; ++b) {
        all.merge(acc[b]);
        st.merge(steps[b]);
        truncated += cut[b];
    }
    if (truncated > trials / 100) throw ExcessTruncation("more than 1% of the paths hit max_steps");
    return {all.mean, all.std_error(), all.count, truncated, st.mean};
}

}  // namespace nonlocal
