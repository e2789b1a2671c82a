#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "nonlocal/core.hpp"

namespace nonlocal {

// Counter-based stream: the value at position `counter` is a pure function of
// (seed, stream_id, counter), computed with Philox4x32-10.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;
};

std::pair<double, RngStream> next_uniform(const RngStream& s);
std::pair<Point, RngStream> next_unit_vector(const RngStream& s, int n);
std::pair<double, RngStream> next_normal(const RngStream& s);

// Independent child stream, e.g. one per Monte Carlo block.
RngStream substream(const RngStream& s, std::uint64_t index);

// Raw Philox block (exposed for tests).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Mutable cursor over a stream for hot loops; equivalent to chaining
// next_uniform on the immutable tokens.
class RngCursor {
public:
    explicit RngCursor(RngStream s) : s_(s) {}
    double uniform();
    double uniform_open();  // (0,1)
    Point unit_vector(int n);
    double normal();
    const RngStream& state() const { return s_; }

private:
    RngStream s_;
};

// Running mean/variance (Welford), mergeable in a fixed order.
struct Welford {
    long long count = 0;
    double mean = 0;
    double m2 = 0;
    void add(double x) {
        ++count;
        double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    void merge(const Welford& o);
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_error() const {
        return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
    }
};

// Worker count from NONLOCAL_THREADS (default: hardware concurrency).
int worker_count();

// Runs body(b) for b in [0, blocks) on up to worker_count() threads.  Callers
// write into per-block slots and combine in block order, so results do not
// depend on the number of workers.
void parallel_blocks(long long blocks, const std::function<void(long long)>& body);

}  // namespace nonlocal
