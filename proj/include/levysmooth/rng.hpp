#pragma once

// Reproducible random streams and deterministic data-parallel Monte Carlo.
//
// Work is split into fixed-size blocks of paths; block i draws from an
// independent substream derived from (master seed, i) and partial results are
// reduced in block order. Estimates are therefore bit-identical for a given
// seed no matter how many threads run.

#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "common.hpp"

namespace levysmooth {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline Rng substream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return Rng(splitmix64(splitmix64(master_seed) ^ (stream_index + 1)));
}

inline constexpr std::size_t kMcBlock = 16384;

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(block_index, first_path, n_paths, rng) for every block covering
// [0, n) and returns the per-block results in block order.
template <class T, class Fn>
std::vector<T> run_blocks(std::uint64_t seed, std::size_t n, int threads, Fn&& fn,
                          std::size_t block_size = kMcBlock) {
    const std::size_t nblocks = n == 0 ? 0 : (n + block_size - 1) / block_size;
    std::vector<T> out(nblocks);
    const int k = std::min<std::size_t>(resolve_threads(threads), nblocks == 0 ? 1 : nblocks);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            const std::size_t first = b * block_size;
            const std::size_t count = std::min(block_size, n - first);
            Rng rng = substream(seed, b);
            out[b] = fn(b, first, count, rng);
        }
    };
    if (k <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(k);
        for (int i = 0; i < k; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

// Per-block accumulator for mean / variance reductions.
struct MomentAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    MomentAccumulator& operator+=(const MomentAccumulator& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
        return *this;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : kNaN; }
    double stderr_() const {
        if (n < 2) return kNaN;
        const double m = mean();
        double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        if (var < 0.0) var = 0.0;
        return std::sqrt(var / static_cast<double>(n));
    }
};

// Mean/stderr of sample(rng) over n draws, deterministically parallel.
template <class Sampler>
McEstimate mc_mean(std::uint64_t seed, std::size_t n, int threads, Sampler&& sample) {
    auto partials = run_blocks<MomentAccumulator>(
        seed, n, threads, [&](std::size_t, std::size_t, std::size_t count, Rng& rng) {
            MomentAccumulator acc;
            for (std::size_t i = 0; i < count; ++i) acc.add(sample(rng));
            return acc;
        });
    MomentAccumulator total;
    for (const auto& p : partials) total += p;
    return {total.mean(), total.stderr_(), total.n, EvalStatus::Ok};
}

inline double std_normal(Rng& rng) {
    std::normal_distribution<double> n01;
    return n01(rng);
}

inline double uniform01(Rng& rng) {
    std::uniform_real_distribution<double> u01;
    return u01(rng);
}

}  // namespace levysmooth
