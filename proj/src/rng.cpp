#include "nonlocal/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nonlocal {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
        std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

namespace {

std::uint64_t draw64(const RngStream& s) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(s.counter), static_cast<std::uint32_t>(s.counter >> 32),
        static_cast<std::uint32_t>(s.stream_id), static_cast<std::uint32_t>(s.stream_id >> 32)};
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(s.seed),
                                        static_cast<std::uint32_t>(s.seed >> 32)};
    auto r = philox4x32(ctr, key);
    return (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
}

double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::pair<double, RngStream> next_uniform(const RngStream& s) {
    RngStream nx = s;
    ++nx.counter;
    return {to_unit(draw64(s)), nx};
}

double RngCursor::uniform() {
    double u = to_unit(draw64(s_));
    ++s_.counter;
    return u;
}

double RngCursor::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double RngCursor::normal() {
    // Box-Muller using two positions; the second variate is discarded so
    // that each call consumes a fixed number of counters.
    double u1 = uniform_open();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * kPi * u2);
}

Point RngCursor::unit_vector(int n) {
    if (n == 1) return {uniform() < 0.5 ? -1.0 : 1.0, 0, 0};
    if (n == 2) {
        double th = 2 * kPi * uniform();
        return {std::cos(th), std::sin(th), 0};
    }
    if (n == 3) {
        double z = 2 * uniform() - 1;
        double th = 2 * kPi * uniform();
        double r = std::sqrt(std::max(0.0, 1 - z * z));
        return {r * std::cos(th), r * std::sin(th), z};
    }
    throw UnsupportedDimension("unit vectors implemented for n <= 3");
}

std::pair<Point, RngStream> next_unit_vector(const RngStream& s, int n) {
    RngCursor c(s);
    Point p = c.unit_vector(n);
    return {p, c.state()};
}

std::pair<double, RngStream> next_normal(const RngStream& s) {
    RngCursor c(s);
    double z = c.normal();
    return {z, c.state()};
}

RngStream substream(const RngStream& s, std::uint64_t index) {
    RngStream c;
    c.seed = s.seed;
    c.stream_id = splitmix(splitmix(s.stream_id) ^ (index + 0x632BE59BD9B4E019ull));
    c.counter = 0;
    return c;
}

void Welford::merge(const Welford& o) {
    if (o.count == 0) return;
    if (count == 0) {
        *this = o;
        return;
    }
    long long n = count + o.count;
    double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / static_cast<double>(n);
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) /
                     static_cast<double>(n);
    count = n;
}

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* e = std::getenv("NONLOCAL_THREADS")) {
        int v = std::atoi(e);
        if (v >= 1) return std::min(v, 256);
    }
    return hw;
}

void parallel_blocks(long long blocks, const std::function<void(long long)>& body) {
    int workers = static_cast<int>(std::min<long long>(worker_count(), blocks));
    if (workers <= 1) {
        for (long long b = 0; b < blocks; ++b) body(b);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                long long b = next.fetch_add(1);
                if (b >= blocks) return;
                try {
                    body(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                    next = blocks;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace nonlocal
