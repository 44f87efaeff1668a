#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace darcywave {

/// Worker count for data-parallel kernels, read from DARCYWAVE_THREADS (default 1).
inline int thread_count() {
    static const int n = [] {
        const char* s = std::getenv("DARCYWAVE_THREADS");
        if (s == nullptr) return 1;
        const int v = std::atoi(s);
        return v > 0 ? v : 1;
    }();
    return n;
}

/// Runs body(i) for i in [0, n). Each index writes only its own output, so the
/// result does not depend on the schedule.
template <class Body>
void parallel_for(int n, Body&& body) {
    const int t = std::min(thread_count(), n);
    if (t <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
    for (int k = 0; k < t; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (int i = k; i < n; i += t) body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace darcywave
