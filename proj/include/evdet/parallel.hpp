#pragma once

#include <cstddef>
#include <functional>

namespace evdet {

// Process-wide cap on worker threads. 0 restores the default
// (std::thread::hardware_concurrency). Results never depend on this value.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Sets the cap for its lifetime and restores the previous setting.
class ScopedThreadLimit {
public:
    explicit ScopedThreadLimit(unsigned n);
    ~ScopedThreadLimit();
    ScopedThreadLimit(const ScopedThreadLimit&) = delete;
    ScopedThreadLimit& operator=(const ScopedThreadLimit&) = delete;

private:
    unsigned previous_;
};

// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
// depend only on n and the worker count, and every index is visited exactly
// once, so callers that write to disjoint per-index slots are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace evdet
