#include "schrodlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace schrodlab {

namespace {

std::atomic<unsigned> g_threads{0};

unsigned default_threads() {
    if (const char* env = std::getenv("SCHRODLAB_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

} // namespace

unsigned thread_count() {
    unsigned k = g_threads.load();
    if (k == 0) {
        k = default_threads();
        g_threads.store(k);
    }
    return k;
}

void set_thread_count(unsigned k) { g_threads.store(k == 0 ? default_threads() : k); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    unsigned k = std::min<std::size_t>(thread_count(), count);
    if (k <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(k - 1);
    for (unsigned t = 1; t < k; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace schrodlab
