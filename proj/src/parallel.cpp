#include "evdet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace evdet {

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
    const unsigned n = g_max_threads.load();
    if (n != 0) {
        return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ScopedThreadLimit::ScopedThreadLimit(unsigned n) : previous_(g_max_threads.exchange(n)) {}

ScopedThreadLimit::~ScopedThreadLimit() { g_max_threads.store(previous_); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) {
        return;
    }
    const std::size_t workers = std::min<std::size_t>(max_threads(), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }

    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) {
            break;
        }
        threads.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    // Report the lowest-indexed failure so error output is reproducible too.
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace evdet
