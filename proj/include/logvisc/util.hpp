// Shared utilities: error types, compensated summation, small vector math,
// and the element-wise parallel map used by the field kernels.
#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace logvisc {

/// Numerical failure inside a solver or stepper (CLI exit code 2).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad configuration or usage (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Small fixed-size point/vector in physical space.
template <int D>
using Vec = std::array<double, D>;

// The operators deduce the extent as std::size_t (std::array's own
// non-type parameter); `int D` would not deduce from an array argument.
template <std::size_t D>
inline std::array<double, D> operator+(const std::array<double, D>& a,
                                       const std::array<double, D>& b) {
    std::array<double, D> r{};
    for (std::size_t i = 0; i < D; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t D>
inline std::array<double, D> operator-(const std::array<double, D>& a,
                                       const std::array<double, D>& b) {
    std::array<double, D> r{};
    for (std::size_t i = 0; i < D; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t D>
inline std::array<double, D> operator*(double s, const std::array<double, D>& a) {
    std::array<double, D> r{};
    for (std::size_t i = 0; i < D; ++i) r[i] = s * a[i];
    return r;
}

/// Kahan compensated accumulator.  All norm and energy reductions in the
/// library go through this type, summing in a fixed serial order so results
/// are bit-reproducible across runs and thread counts.
struct KahanSum {
    double sum  = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp           = (t - sum) - y;
        sum            = t;
    }
    double value() const { return sum; }
};

/// Trapezoid-rule time integral with a compensated running sum.  Call
/// `start(f(t0))` once, then `advance(f(t), dt)` once per step.
struct TrapezoidIntegral {
    KahanSum acc;
    double   prev     = 0.0;
    bool     started  = false;

    void start(double f0) {
        prev    = f0;
        started = true;
    }
    void advance(double f, double dt) {
        acc.add(0.5 * (prev + f) * dt);
        prev = f;
    }
    double value() const { return acc.value(); }
};

/// Number of worker threads for element-wise maps.  Controlled by the
/// LOGVISC_THREADS environment variable; defaults to the hardware count.
inline int thread_count() {
    static const int n = [] {
        if (const char* env = std::getenv("LOGVISC_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1 && v <= 256) return static_cast<int>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }();
    return n;
}

/// Apply `fn(i)` for i in [0, n).  Work is split into contiguous blocks, one
/// per thread; every iteration writes only its own slot, so the result is
/// identical for any thread count.  Reductions must NOT use this — they are
/// serial by design (see KahanSum).
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    const int nt = thread_count();
    if (nt <= 1 || n < 4096) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t       block = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::int64_t lo = t * block;
        const std::int64_t hi = std::min(n, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// FNV-1a 64-bit hash (used for config fingerprints in manifests and
/// checkpoints).
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace logvisc
