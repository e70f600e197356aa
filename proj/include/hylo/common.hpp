#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hylo {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Full round-trip formatting for doubles (17 significant digits).
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Number of worker threads for independent jobs. HYLO_THREADS bounds it;
// unset or 0 means hardware concurrency.
inline unsigned job_thread_limit() {
    if (const char* env = std::getenv("HYLO_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(i) for i in [0, n) on up to job_thread_limit() threads.
// Jobs must write only to their own slots; results are then independent
// of scheduling order.
template <class Fn>
void parallel_jobs(std::size_t n, Fn&& fn) {
    unsigned workers = std::min<std::size_t>(job_thread_limit(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

inline int ceil_even(double x) {
    int n = static_cast<int>(std::ceil(x - 1e-12));
    if (n % 2 != 0) ++n;
    return n < 2 ? 2 : n;
}

}  // namespace hylo
