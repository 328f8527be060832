#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace rotinv {

/// Worker count for a request. 0 means "as many as available". The
/// ROTINV_THREADS environment variable caps the result; it is read on
/// every call so changes take effect between commands.
inline int effective_threads(int requested = 0) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int n = requested > 0 ? requested : hw;
    if (const char* env = std::getenv("ROTINV_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, n);
}

/// Run fn(i) for i in [0, n). Work items must be independent and write only
/// to their own output slots, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
    const int workers = std::min<std::size_t>(effective_threads(threads), n == 0 ? 1 : n);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) break;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rotinv
