#ifndef INDIRECT_INTERVAL_HPP
#define INDIRECT_INTERVAL_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cfenv>
#if defined(__SSE2__) && defined(__x86_64__)
#include <xmmintrin.h>
#endif
#include <cstdlib>
#include <limits>
#include <optional>

#include "indirect/expansion.hpp"
#include "indirect/sign.hpp"

namespace indirect
{

// Directed rounding is emulated from error-free transformations instead of
// switching the FPU rounding mode: the exact residual of each rounded
// operation tells whether fl(x) lies below or above the true value, and
// the bound is stepped by one ulp only when it lies on the wrong side.
// This gives the same bounds as hardware directed rounding and touches no
// thread or process state.
#if defined(__GNUC__)
#define INDIRECT_ALWAYS_INLINE [[gnu::always_inline]] inline
#else
#define INDIRECT_ALWAYS_INLINE inline
#endif

namespace rounding
{

inline double next_up(double x) noexcept
{
    if (x == 0.0)
        return std::numeric_limits<double>::denorm_min();
    if (!(std::fabs(x) < std::numeric_limits<double>::infinity()))
        return x == -std::numeric_limits<double>::infinity() ? -std::numeric_limits<double>::max() : x;
    auto bits = std::bit_cast<std::uint64_t>(x);
    bits += x > 0.0 ? 1 : -1;
    return std::bit_cast<double>(bits);
}

inline double next_down(double x) noexcept { return -next_up(-x); }

inline constexpr double max_finite = std::numeric_limits<double>::max();

// Below this magnitude a product residual may be lost to underflow.
inline constexpr double product_underflow_guard = 0x1p-969;
// Above this magnitude Dekker splitting may overflow.
inline constexpr double product_overflow_guard = 0x1p+995;

struct Bounds
{
    double down;
    double up;
};

inline Bounds add(double a, double b) noexcept
{
    const double s = a + b;
    if (!std::isfinite(s))
        return {s == std::numeric_limits<double>::infinity() ? max_finite : s,
                s == -std::numeric_limits<double>::infinity() ? -max_finite : s};
    const double e = two_sum(a, b).lo;
    if (e > 0.0)
        return {s, next_up(s)};
    if (e < 0.0)
        return {next_down(s), s};
    return {s, s};
}

inline Bounds mul(double a, double b) noexcept
{
    if (a == 0.0 || b == 0.0)
        return {0.0, 0.0};
    const double p = a * b;
    if (std::isnan(p))
        return {0.0, 0.0}; // 0 * inf on an overflowed bound
    if (!std::isfinite(p))
        return {p > 0 ? max_finite : p, p < 0 ? -max_finite : p};
    const double ap = std::fabs(p);
    if (ap < product_underflow_guard)
        return {next_down(p), next_up(p)};
#if !(defined(__FMA__) || defined(INDIRECT_FORCE_FMA))
    if (std::fabs(a) > product_overflow_guard
        || std::fabs(b) > product_overflow_guard)
        return {next_down(p), next_up(p)};
#endif
    const double e = two_product(a, b).lo;
    if (e > 0.0)
        return {p, next_up(p)};
    if (e < 0.0)
        return {next_down(p), p};
    return {p, p};
}

// Single-sided variants. The fast path covers finite, normal-range
// results; everything else goes through the general routines above.

namespace detail
{
// One ulp toward +inf when `cond` holds; x must be finite and nonzero.
INDIRECT_ALWAYS_INLINE double step_up_if(double x, bool cond) noexcept
{
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const std::uint64_t neg = bits >> 63;
    const std::uint64_t c = cond ? 1 : 0;
    return std::bit_cast<double>(bits + c - 2 * (c & neg));
}
} // namespace detail

INDIRECT_ALWAYS_INLINE double add_up(double a, double b) noexcept
{
    const double s = a + b;
    if (std::fabs(s) <= max_finite) [[likely]]
        return detail::step_up_if(s, two_sum(a, b).lo > 0.0);
    return add(a, b).up;
}

INDIRECT_ALWAYS_INLINE double add_down(double a, double b) noexcept { return -add_up(-a, -b); }

INDIRECT_ALWAYS_INLINE double mul_up(double a, double b) noexcept
{
    const double p = a * b;
    const double ap = std::fabs(p);
#if defined(__FMA__) || defined(INDIRECT_FORCE_FMA)
    const bool split_safe = true;
#else
    const bool split_safe = std::fabs(a) <= product_overflow_guard && std::fabs(b) <= product_overflow_guard;
#endif
    if (ap >= product_underflow_guard && ap <= max_finite && split_safe) [[likely]]
        return detail::step_up_if(p, two_product(a, b).lo > 0.0);
    return mul(a, b).up;
}

INDIRECT_ALWAYS_INLINE double mul_down(double a, double b) noexcept { return -mul_up(-a, b); }

} // namespace rounding

/// Closed interval [lo, hi] enclosing an exact real.
struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double l, double h) noexcept : lo(l), hi(h) {}

    /// Degenerate interval around an exactly representable value. NaN is a
    /// programming error.
    explicit Interval(double a) noexcept : lo(a), hi(a)
    {
        if (std::isnan(a))
            std::abort();
    }

    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    bool is_point() const noexcept { return lo == hi; }

    Interval operator-() const noexcept { return {-hi, -lo}; }

    INDIRECT_ALWAYS_INLINE friend Interval operator+(const Interval& x, const Interval& y) noexcept
    {
        return {rounding::add_down(x.lo, y.lo), rounding::add_up(x.hi, y.hi)};
    }

    INDIRECT_ALWAYS_INLINE friend Interval operator-(const Interval& x, const Interval& y) noexcept
    {
        return {rounding::add_down(x.lo, -y.hi), rounding::add_up(x.hi, -y.lo)};
    }

    INDIRECT_ALWAYS_INLINE friend Interval operator*(const Interval& x, const Interval& y) noexcept
    {
        // Sign-case dispatch keeps the common cases at two products.
        if (x.lo >= 0.0)
        {
            if (y.lo >= 0.0)
                return {rounding::mul_down(x.lo, y.lo), rounding::mul_up(x.hi, y.hi)};
            if (y.hi <= 0.0)
                return {rounding::mul_down(x.hi, y.lo), rounding::mul_up(x.lo, y.hi)};
            return {rounding::mul_down(x.hi, y.lo), rounding::mul_up(x.hi, y.hi)};
        }
        if (x.hi <= 0.0)
        {
            if (y.lo >= 0.0)
                return {rounding::mul_down(x.lo, y.hi), rounding::mul_up(x.hi, y.lo)};
            if (y.hi <= 0.0)
                return {rounding::mul_down(x.hi, y.hi), rounding::mul_up(x.lo, y.lo)};
            return {rounding::mul_down(x.lo, y.hi), rounding::mul_up(x.lo, y.lo)};
        }
        if (y.lo >= 0.0)
            return {rounding::mul_down(x.lo, y.hi), rounding::mul_up(x.hi, y.hi)};
        if (y.hi <= 0.0)
            return {rounding::mul_down(x.hi, y.lo), rounding::mul_up(x.lo, y.lo)};
        const double lo = std::min(rounding::mul_down(x.lo, y.hi),
                                   rounding::mul_down(x.hi, y.lo));
        const double hi = std::max(rounding::mul_up(x.lo, y.lo),
                                   rounding::mul_up(x.hi, y.hi));
        return {lo, hi};
    }

    /// Certain sign, or nullopt when the interval straddles zero.
    std::optional<Sign> sign() const noexcept
    {
        if (lo > 0.0)
            return Sign::Positive;
        if (hi < 0.0)
            return Sign::Negative;
        if (lo == 0.0 && hi == 0.0)
            return Sign::Zero;
        return std::nullopt;
    }
};

namespace rounding
{

/// Switches the calling thread to upward rounding for its lifetime and
/// restores the previous mode on exit. Nested scopes are free.
class UpwardScope
{
public:
    UpwardScope() noexcept
    {
        if (depth()++ == 0)
        {
#if defined(__SSE2__) && defined(__x86_64__)
            // Scalar double arithmetic runs on SSE here; only MXCSR matters.
            saved_ = _mm_getcsr();
            _mm_setcsr((saved_ & ~0x6000u) | 0x4000u);
#else
            saved_ = static_cast<unsigned>(std::fegetround());
            std::fesetround(FE_UPWARD);
#endif
        }
    }
    ~UpwardScope()
    {
        if (--depth() == 0)
        {
#if defined(__SSE2__) && defined(__x86_64__)
            _mm_setcsr(saved_);
#else
            std::fesetround(static_cast<int>(saved_));
#endif
        }
    }
    UpwardScope(const UpwardScope&) = delete;
    UpwardScope& operator=(const UpwardScope&) = delete;

    static bool active() noexcept { return depth() > 0; }

private:
    static int& depth() noexcept
    {
        thread_local int d = 0;
        return d;
    }
    unsigned saved_ = 0;
};

// Hides a value from the optimizer so arithmetic on it can neither be
// hoisted above nor sunk below a rounding-mode switch, nor merged with
// round-to-nearest computations of the same expression.
INDIRECT_ALWAYS_INLINE double opaque(double x) noexcept
{
#if (defined(__GNUC__) || defined(__clang__)) && (defined(__x86_64__) || defined(__i386__))
    asm volatile("" : "+x"(x));
    return x;
#elif defined(__GNUC__) || defined(__clang__)
    asm volatile("" : "+r"(x));
    return x;
#else
    volatile double v = x;
    return v;
#endif
}

} // namespace rounding

/// Interval for use under rounding::UpwardScope only. Stores the negated
/// lower bound so both bounds round upward.
struct UpInterval
{
    double nlo = 0.0; // -lo
    double hi = 0.0;

    UpInterval() = default;
    UpInterval(double neg_lo, double h, int) noexcept : nlo(neg_lo), hi(h) {}

    /// Entry from a mode-free interval; call inside the scope.
    static UpInterval from(const Interval& x) noexcept
    {
        return {rounding::opaque(-x.lo), rounding::opaque(x.hi), 0};
    }
    explicit UpInterval(double a) noexcept : nlo(rounding::opaque(-a)), hi(rounding::opaque(a)) {}

    double lo() const noexcept { return -nlo; }
    Interval to_interval() const noexcept { return {-nlo, hi}; }

    INDIRECT_ALWAYS_INLINE friend UpInterval operator+(const UpInterval& x, const UpInterval& y) noexcept
    {
        return {rounding::opaque(x.nlo + y.nlo), rounding::opaque(x.hi + y.hi), 0};
    }

    INDIRECT_ALWAYS_INLINE friend UpInterval operator-(const UpInterval& x, const UpInterval& y) noexcept
    {
        return {rounding::opaque(x.nlo + y.hi), rounding::opaque(x.hi + y.nlo), 0};
    }

    INDIRECT_ALWAYS_INLINE friend UpInterval operator*(const UpInterval& x, const UpInterval& y) noexcept
    {
        // up(a, b) = a * b and down(a, b) = -((-a) * b) under upward rounding;
        // results are returned as (-down, up).
        const double xl = -x.nlo, yl = -y.nlo;
        double n, h;
        if (xl >= 0.0)
        {
            if (yl >= 0.0)
            {
                n = x.nlo * yl;
                h = x.hi * y.hi;
            }
            else if (y.hi <= 0.0)
            {
                n = (-x.hi) * yl;
                h = xl * y.hi;
            }
            else
            {
                n = (-x.hi) * yl;
                h = x.hi * y.hi;
            }
        }
        else if (x.hi <= 0.0)
        {
            if (yl >= 0.0)
            {
                n = x.nlo * y.hi;
                h = x.hi * yl;
            }
            else if (y.hi <= 0.0)
            {
                n = (-x.hi) * y.hi;
                h = x.nlo * y.nlo;
            }
            else
            {
                n = x.nlo * y.hi;
                h = x.nlo * y.nlo;
            }
        }
        else if (yl >= 0.0)
        {
            n = x.nlo * y.hi;
            h = x.hi * y.hi;
        }
        else if (y.hi <= 0.0)
        {
            n = (-x.hi) * yl;
            h = x.nlo * y.nlo;
        }
        else
        {
            n = max_keep_nan(x.nlo * y.hi, (-x.hi) * yl);
            h = max_keep_nan(x.nlo * y.nlo, x.hi * y.hi);
        }
        return {rounding::opaque(n), rounding::opaque(h), 0};
    }

    // A NaN bound (from 0 * inf) means the bound is unknown; comparisons
    // against it are false, so it never certifies a sign.
    static double max_keep_nan(double a, double b) noexcept { return (a < b || b != b) ? b : a; }

    std::optional<Sign> sign() const noexcept
    {
        if (nlo < 0.0)
            return Sign::Positive;
        if (hi < 0.0)
            return Sign::Negative;
        if (nlo == 0.0 && hi == 0.0)
            return Sign::Zero;
        return std::nullopt;
    }
};

inline Interval iv_from(double a) noexcept { return Interval(a); }
inline Interval iv_add(const Interval& x, const Interval& y) noexcept { return x + y; }
inline Interval iv_sub(const Interval& x, const Interval& y) noexcept { return x - y; }
inline Interval iv_mul(const Interval& x, const Interval& y) noexcept { return x * y; }
inline std::optional<Sign> iv_sign(const Interval& x) noexcept { return x.sign(); }

} // namespace indirect

#endif
