#ifndef INDIRECT_COUNTING_NEW_HPP
#define INDIRECT_COUNTING_NEW_HPP

// Replaces the global allocation functions with counting versions.
// Include from exactly one translation unit of an executable.

#include <cstdlib>
#include <new>

#include <malloc.h>

#include "indirect/alloc_counter.hpp"

namespace indirect::detail
{
inline void* counted_alloc(std::size_t n)
{
    void* p = std::malloc(n == 0 ? 1 : n);
    if (!p)
        throw std::bad_alloc();
    auto& c = alloc_counters();
    c.installed.store(true, std::memory_order_relaxed);
    c.add(malloc_usable_size(p));
    return p;
}

inline void counted_free(void* p) noexcept
{
    if (!p)
        return;
    alloc_counters().sub(malloc_usable_size(p));
    std::free(p);
}
} // namespace indirect::detail

void* operator new(std::size_t n) { return indirect::detail::counted_alloc(n); }
void* operator new[](std::size_t n) { return indirect::detail::counted_alloc(n); }
void* operator new(std::size_t n, const std::nothrow_t&) noexcept
{
    try
    {
        return indirect::detail::counted_alloc(n);
    }
    catch (...)
    {
        return nullptr;
    }
}
void* operator new[](std::size_t n, const std::nothrow_t& t) noexcept { return operator new(n, t); }
void operator delete(void* p) noexcept { indirect::detail::counted_free(p); }
void operator delete[](void* p) noexcept { indirect::detail::counted_free(p); }
void operator delete(void* p, std::size_t) noexcept { indirect::detail::counted_free(p); }
void operator delete[](void* p, std::size_t) noexcept { indirect::detail::counted_free(p); }

#endif
