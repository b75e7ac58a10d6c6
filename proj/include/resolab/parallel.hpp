#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace resolab {

// Thread budget: RESOLAB_THREADS wins, otherwise min(8, hardware).
inline int worker_count() {
    if (const char* env = std::getenv("RESOLAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(8u, std::max(1u, hw)));
}

// Deterministic parallel map: output order is the input order regardless of
// scheduling, so results are bit-identical across thread counts.
template <class T, class F>
std::vector<double> parallel_map(const std::vector<T>& xs, F&& f) {
    int nw = worker_count();
    std::vector<double> out(xs.size());
    if (nw <= 1 || xs.size() < 4) {
        for (size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
        return out;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= xs.size() || failed.load()) return;
            try {
                out[i] = f(xs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nw - 1; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(first_error);
    return out;
}

}  // namespace resolab
