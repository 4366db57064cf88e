#include "sdfm/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sdfm {

int worker_count() {
    if (const char* env = std::getenv("SDFM_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
            // fall through to defaults on malformed values
        }
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(long n, const std::function<void(long)>& fn) {
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<long>(worker_count(), n));
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }

    // Dynamic chunks of indices; each index's work only touches its own output
    // slot, so scheduling cannot affect results.
    std::atomic<long> next(0);
    const long chunk = std::max<long>(1, n / (static_cast<long>(workers) * 8));
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;

    auto run = [&]() {
        for (;;) {
            const long begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const long end = std::min(n, begin + chunk);
            try {
                for (long i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace sdfm
