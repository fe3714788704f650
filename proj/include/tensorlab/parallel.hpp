#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tensorlab {

// Thread count: TENSORLAB_THREADS env var, else hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("TENSORLAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// the result is schedule-independent.
template <typename Fn>
void parallel_for(long n, Fn&& fn) {
    const int threads = std::min<long>(thread_count(), n);
    if (threads <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (long i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Compensated (Kahan) accumulator for order-stable reductions.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace tensorlab
