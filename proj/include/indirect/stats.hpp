#ifndef INDIRECT_STATS_HPP
#define INDIRECT_STATS_HPP

#include <array>
#include <cstdint>

#include "indirect/formulas.hpp"

namespace indirect
{

/// Per-predicate stage counters. Counters are kept per thread (sharded), so
/// concurrent predicate calls never contend; each thread reads its own
/// shard through stage_stats().
struct StageCounters
{
    std::uint64_t calls = 0;
    std::uint64_t fp_success = 0;
    std::uint64_t interval_success = 0;
    std::uint64_t exact_evaluations = 0;
    std::uint64_t undefined_hits = 0; // subset of exact_evaluations
    std::uint64_t rational_fallbacks = 0; // exact evaluations redone in rationals

    StageCounters& operator+=(const StageCounters& o) noexcept
    {
        calls += o.calls;
        fp_success += o.fp_success;
        interval_success += o.interval_success;
        exact_evaluations += o.exact_evaluations;
        undefined_hits += o.undefined_hits;
        rational_fallbacks += o.rational_fallbacks;
        return *this;
    }
};

struct StageStats
{
    std::array<StageCounters, 4> per_predicate{};

    // Number of times implicit-point lambdas were evaluated, per model.
    std::uint64_t lambda_fp_evaluations = 0;
    std::uint64_t lambda_interval_evaluations = 0;
    std::uint64_t lambda_exact_evaluations = 0;

    StageCounters& operator[](PredicateKind p) noexcept
    {
        return per_predicate[static_cast<std::size_t>(p)];
    }
    const StageCounters& operator[](PredicateKind p) const noexcept
    {
        return per_predicate[static_cast<std::size_t>(p)];
    }

    StageCounters total() const noexcept
    {
        StageCounters t;
        for (const auto& c : per_predicate)
            t += c;
        return t;
    }
};

inline StageStats& stage_stats() noexcept
{
    thread_local StageStats stats;
    return stats;
}

inline void reset_stage_stats() noexcept { stage_stats() = StageStats{}; }

} // namespace indirect

#endif
