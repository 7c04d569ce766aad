#ifndef INDIRECT_ALLOC_COUNTER_HPP
#define INDIRECT_ALLOC_COUNTER_HPP

#include <atomic>
#include <cstddef>

namespace indirect
{

/// Live and high-water heap bytes. Only updated in programs that include
/// counting_new.hpp in one translation unit; otherwise stays zero.
struct AllocCounters
{
    std::atomic<std::size_t> live{0};
    std::atomic<std::size_t> peak{0};
    std::atomic<bool> installed{false};

    void add(std::size_t n) noexcept
    {
        const std::size_t now = live.fetch_add(n, std::memory_order_relaxed) + n;
        std::size_t p = peak.load(std::memory_order_relaxed);
        while (now > p && !peak.compare_exchange_weak(p, now, std::memory_order_relaxed))
        {
        }
    }
    void sub(std::size_t n) noexcept { live.fetch_sub(n, std::memory_order_relaxed); }

    /// Restarts the high-water mark at the current live size.
    std::size_t reset_peak() noexcept
    {
        const std::size_t now = live.load(std::memory_order_relaxed);
        peak.store(now, std::memory_order_relaxed);
        return now;
    }
};

inline AllocCounters& alloc_counters() noexcept
{
    static AllocCounters c;
    return c;
}

} // namespace indirect

#endif
