#pragma once

#include <algorithm>
#include <chrono>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace pgaslab {

/// Outcome of a bandwidth measurement. Rates are bytes per second per thread.
struct BandwidthResult {
    double copy_bytes_per_sec = 0;
    double triad_bytes_per_sec = 0;
    int threads = 0;
    std::size_t buffer_bytes = 0;
    int repetitions = 0;
};

namespace detail {

inline double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace detail

/// STREAM-style copy and triad over per-thread private buffers. Reports the
/// best repetition, as aggregate traffic divided by the thread count. The
/// buffer must dwarf the last-level cache or the result measures cache, not
/// memory.
inline BandwidthResult measure_local_bandwidth(int threads, std::size_t buffer_bytes,
                                               int repetitions) {
    constexpr std::size_t kAssumedLlcBytes = 16ull << 20;
    if (threads < 1) throw std::invalid_argument("measure_local_bandwidth: threads must be >= 1");
    if (repetitions < 3)
        throw std::invalid_argument("measure_local_bandwidth: need at least 3 repetitions");
    if (buffer_bytes < 4 * kAssumedLlcBytes)
        throw std::invalid_argument(
            "measure_local_bandwidth: buffer must be at least 4x the assumed 16 MiB cache");

    const std::size_t n = buffer_bytes / sizeof(double);
    std::vector<std::vector<double>> a(threads), b(threads), c(threads);
    for (int t = 0; t < threads; ++t) {
        a[t].assign(n, 1.0);
        b[t].assign(n, 2.0);
        c[t].assign(n, 0.0);
    }

    double best_copy = std::numeric_limits<double>::infinity();
    double best_triad = std::numeric_limits<double>::infinity();
    std::vector<std::thread> workers;
    for (int rep = 0; rep < repetitions; ++rep) {
        double t0 = detail::now_seconds();
        workers.clear();
        for (int t = 0; t < threads; ++t)
            workers.emplace_back([&, t] { std::memcpy(c[t].data(), a[t].data(), n * sizeof(double)); });
        for (auto& w : workers) w.join();
        best_copy = std::min(best_copy, detail::now_seconds() - t0);

        t0 = detail::now_seconds();
        workers.clear();
        for (int t = 0; t < threads; ++t)
            workers.emplace_back([&, t] {
                double* __restrict__ ap = a[t].data();
                const double* __restrict__ bp = b[t].data();
                const double* __restrict__ cp = c[t].data();
                for (std::size_t i = 0; i < n; ++i) ap[i] = bp[i] + 3.0 * cp[i];
            });
        for (auto& w : workers) w.join();
        best_triad = std::min(best_triad, detail::now_seconds() - t0);
    }

    BandwidthResult r;
    r.threads = threads;
    r.buffer_bytes = n * sizeof(double);
    r.repetitions = repetitions;
    // copy moves 2 bytes per byte of buffer (read + write), triad moves 3
    r.copy_bytes_per_sec = 2.0 * n * sizeof(double) / best_copy;
    r.triad_bytes_per_sec = 3.0 * n * sizeof(double) / best_triad;
    return r;
}

struct RandomAccessResult {
    double random_seconds_per_access = 0;
    double sequential_seconds_per_access = 0;
    double latency_estimate = 0;  // random minus sequential, floored at zero
    std::size_t accesses = 0;
};

/// Chases a shuffled block permutation through an out-of-cache array and
/// subtracts the contiguous-traversal baseline. Deterministic access pattern
/// for a given seed; timings naturally vary.
inline RandomAccessResult measure_random_access(std::size_t array_bytes, std::size_t blocksize,
                                                std::uint64_t seed) {
    if (blocksize < 1) throw std::invalid_argument("measure_random_access: blocksize must be >= 1");
    const std::size_t n = array_bytes / sizeof(double);
    const std::size_t nblocks = n / blocksize;
    if (nblocks < 1024 || array_bytes < (1u << 20))
        throw std::invalid_argument(
            "measure_random_access: array too small, need >= 1 MiB and >= 1024 blocks");

    std::vector<double> data(n, 1.0);
    std::vector<std::size_t> order(nblocks);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t accesses = nblocks * blocksize;
    volatile double sink = 0;

    double t0 = detail::now_seconds();
    double acc = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const double* p = data.data() + order[b] * blocksize;
        for (std::size_t i = 0; i < blocksize; ++i) acc += p[i];
    }
    sink = acc;
    const double random_total = detail::now_seconds() - t0;

    t0 = detail::now_seconds();
    acc = 0;
    for (std::size_t i = 0; i < accesses; ++i) acc += data[i];
    sink = acc;
    const double seq_total = detail::now_seconds() - t0;
    (void)sink;

    RandomAccessResult r;
    r.accesses = accesses;
    r.random_seconds_per_access = random_total / accesses;
    r.sequential_seconds_per_access = seq_total / accesses;
    r.latency_estimate = std::max(0.0, r.random_seconds_per_access - r.sequential_seconds_per_access);
    return r;
}

}  // namespace pgaslab
