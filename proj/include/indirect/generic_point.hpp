#ifndef INDIRECT_GENERIC_POINT_HPP
#define INDIRECT_GENERIC_POINT_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <variant>

#include "indirect/expansion.hpp"
#include "indirect/interval.hpp"
#include "indirect/stats.hpp"

namespace indirect
{

struct Point2
{
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

struct Point3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    friend bool operator==(const Point3&, const Point3&) = default;
};

/// Intersection of the line through a1, a2 with the line through b1, b2.
struct LLIDef
{
    Point2 a1, a2, b1, b2;
    friend bool operator==(const LLIDef&, const LLIDef&) = default;
};

/// Intersection of the line through q1, q2 with the plane through r, s, t.
struct LPIDef
{
    Point3 q1, q2, r, s, t;
    friend bool operator==(const LPIDef&, const LPIDef&) = default;
};

/// Homogeneous coordinates (x/d, y/d, z/d); z unused for 2D points.
template <typename T>
struct Homogeneous
{
    T x{};
    T y{};
    T z{};
    T d{};
};

/// Lambda values under the floating-point model, with the b-factor bound
/// of the construction.
struct LambdaFP
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double d = 0.0;
    double beta = 0.0;
};

using LambdaIV = Homogeneous<Interval>;
using LambdaExact = Homogeneous<Expansion>;

/// Which models keep lambda values on the point after first use.
enum class CacheLevel : int
{
    None = 0,
    FP = 1,
    Interval = 2, // FP + Interval
    Exact = 3,    // FP + Interval + Exact
};

namespace detail
{
inline std::atomic<CacheLevel>& cache_level_cell() noexcept
{
    static std::atomic<CacheLevel> level{CacheLevel::Interval};
    return level;
}
} // namespace detail

inline CacheLevel cache_level() noexcept
{
    return detail::cache_level_cell().load(std::memory_order_relaxed);
}

inline void set_cache_level(CacheLevel level) noexcept
{
    detail::cache_level_cell().store(level, std::memory_order_relaxed);
}

/// Restores the previous cache level on scope exit.
class ScopedCacheLevel
{
public:
    explicit ScopedCacheLevel(CacheLevel level) : saved_(cache_level()) { set_cache_level(level); }
    ~ScopedCacheLevel() { set_cache_level(saved_); }
    ScopedCacheLevel(const ScopedCacheLevel&) = delete;
    ScopedCacheLevel& operator=(const ScopedCacheLevel&) = delete;

private:
    CacheLevel saved_;
};

// ---------------------------------------------------------------------------
// Lambda polynomials. The operation order matches formulas::lli_block and
// formulas::lpi_block exactly; the derived filter constants depend on it.

template <typename T>
Homogeneous<T> lli_lambda(const LLIDef& p)
{
    const T a1x(p.a1.x), a1y(p.a1.y), a2x(p.a2.x), a2y(p.a2.y);
    const T b1x(p.b1.x), b1y(p.b1.y), b2x(p.b2.x), b2y(p.b2.y);
    const T ca = a1x * a2y - a2x * a1y;
    const T cb = b1x * b2y - b2x * b1y;
    const T tax = a1x - a2x;
    const T tay = a1y - a2y;
    const T tbx = b1x - b2x;
    const T tby = b1y - b2y;
    Homogeneous<T> h;
    h.x = ca * tbx - cb * tax;
    h.y = ca * tby - cb * tay;
    h.d = tax * tby - tay * tbx;
    return h;
}

/// `want` selects which numerators to compute; d is always computed.
template <typename T>
Homogeneous<T> lpi_lambda(const LPIDef& p, std::array<bool, 3> want = {true, true, true})
{
    const T q1x(p.q1.x), q1y(p.q1.y), q1z(p.q1.z);
    const T q2x(p.q2.x), q2y(p.q2.y), q2z(p.q2.z);
    const T rx(p.r.x), ry(p.r.y), rz(p.r.z);
    const T sx(p.s.x), sy(p.s.y), sz(p.s.z);
    const T tx(p.t.x), ty(p.t.y), tz(p.t.z);
    const T ax = q1x - q2x, ay = q1y - q2y, az = q1z - q2z;
    const T bx = sx - rx, by = sy - ry, bz = sz - rz;
    const T cx = tx - rx, cy = ty - ry, cz = tz - rz;
    const T ex = q1x - rx, ey = q1y - ry, ez = q1z - rz;
    const T c1 = by * cz - bz * cy;
    const T c2 = bx * cz - bz * cx;
    const T c3 = bx * cy - by * cx;
    Homogeneous<T> h;
    h.d = ax * c1 - ay * c2 + az * c3;
    const T n = ex * c1 - ey * c2 + ez * c3;
    if (want[0])
        h.x = h.d * q1x + n * q2x - n * q1x;
    if (want[1])
        h.y = h.d * q1y + n * q2y - n * q1y;
    if (want[2])
        h.z = h.d * q1z + n * q2z - n * q1z;
    return h;
}

/// Largest b-factor of the construction: plain coordinates and the input
/// differences that its polynomials use.
inline double lli_beta(const LLIDef& p) noexcept
{
    const double v[] = {p.a1.x, p.a1.y, p.a2.x, p.a2.y, p.b1.x, p.b1.y, p.b2.x, p.b2.y,
                        p.a1.x - p.a2.x, p.a1.y - p.a2.y, p.b1.x - p.b2.x, p.b1.y - p.b2.y};
    double b = 0.0;
    for (double x : v)
        b = std::max(b, std::fabs(x));
    return b;
}

inline double lpi_beta(const LPIDef& p) noexcept
{
    const double v[] = {p.q1.x, p.q1.y, p.q1.z, p.q2.x, p.q2.y, p.q2.z,
                        p.q1.x - p.q2.x, p.q1.y - p.q2.y, p.q1.z - p.q2.z,
                        p.s.x - p.r.x, p.s.y - p.r.y, p.s.z - p.r.z,
                        p.t.x - p.r.x, p.t.y - p.r.y, p.t.z - p.r.z,
                        p.q1.x - p.r.x, p.q1.y - p.r.y, p.q1.z - p.r.z};
    double b = 0.0;
    for (double x : v)
        b = std::max(b, std::fabs(x));
    return b;
}

namespace detail
{

// Publishes value into a write-once slot. If another thread won the race
// its (identical) value is kept and ours is dropped.
template <typename C>
const C* publish_once(std::atomic<C*>& slot, C value)
{
    auto fresh = std::make_unique<C>(std::move(value));
    C* expected = nullptr;
    if (slot.compare_exchange_strong(expected, fresh.get(), std::memory_order_acq_rel,
                                     std::memory_order_acquire))
        return fresh.release();
    return expected;
}

template <typename C>
void free_slot(std::atomic<C*>& slot) noexcept
{
    delete slot.exchange(nullptr, std::memory_order_acq_rel);
}

} // namespace detail

/// A point that is either explicit (2D or 3D coordinates) or an implicit
/// intersection (LLI in 2D, LPI in 3D). Implicit points lazily cache their
/// homogeneous lambdas per arithmetic model according to cache_level().
/// Copies carry the definition only, never the caches.
class GenericPoint
{
public:
    enum class Type
    {
        Explicit2D,
        Explicit3D,
        LLI,
        LPI,
    };

    using Definition = std::variant<Point2, Point3, LLIDef, LPIDef>;

    GenericPoint() : def_(Point2{}) {}
    GenericPoint(Point2 p) : def_(p) {}
    GenericPoint(Point3 p) : def_(p) {}
    GenericPoint(const LLIDef& d) : def_(d) {}
    GenericPoint(const LPIDef& d) : def_(d) {}

    static GenericPoint explicit2d(double x, double y) { return GenericPoint(Point2{x, y}); }
    static GenericPoint explicit3d(double x, double y, double z)
    {
        return GenericPoint(Point3{x, y, z});
    }
    static GenericPoint lli(Point2 a1, Point2 a2, Point2 b1, Point2 b2)
    {
        return GenericPoint(LLIDef{a1, a2, b1, b2});
    }
    static GenericPoint lpi(Point3 q1, Point3 q2, Point3 r, Point3 s, Point3 t)
    {
        return GenericPoint(LPIDef{q1, q2, r, s, t});
    }

    GenericPoint(const GenericPoint& o) : def_(o.def_) {}
    GenericPoint(GenericPoint&& o) noexcept : def_(o.def_) {}
    GenericPoint& operator=(const GenericPoint& o)
    {
        if (this != &o)
        {
            clear_caches();
            def_ = o.def_;
        }
        return *this;
    }
    GenericPoint& operator=(GenericPoint&& o) noexcept
    {
        if (this != &o)
        {
            clear_caches();
            def_ = o.def_;
        }
        return *this;
    }
    ~GenericPoint() { clear_caches(); }

    Type type() const noexcept { return static_cast<Type>(def_.index()); }
    bool is_implicit() const noexcept { return def_.index() >= 2; }
    bool is_explicit() const noexcept { return def_.index() < 2; }
    /// 2 for Explicit2D and LLI, 3 for Explicit3D and LPI.
    int dimension() const noexcept
    {
        return (type() == Type::Explicit2D || type() == Type::LLI) ? 2 : 3;
    }

    const Definition& definition() const noexcept { return def_; }
    const Point2& as_point2() const { return std::get<Point2>(def_); }
    const Point3& as_point3() const { return std::get<Point3>(def_); }
    const LLIDef& as_lli() const { return std::get<LLIDef>(def_); }
    const LPIDef& as_lpi() const { return std::get<LPIDef>(def_); }

    /// Explicit coordinate along axis (0, 1, 2). Explicit points only.
    double coord(int axis) const
    {
        if (const auto* p = std::get_if<Point2>(&def_))
            return axis == 0 ? p->x : p->y;
        const auto& p = std::get<Point3>(def_);
        return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
    }

    /// Floating-point lambdas (x, y, z, d) and beta. Explicit points yield
    /// (coordinates, 1) and beta = max |coordinate|.
    LambdaFP lambda_fp() const
    {
        if (const auto* c = fp_.load(std::memory_order_acquire))
            return *c;
        LambdaFP v = compute_fp();
        if (is_implicit() && cache_level() >= CacheLevel::FP)
            detail::publish_once(fp_, v);
        return v;
    }

    LambdaIV lambda_interval() const
    {
        if (const auto* c = iv_.load(std::memory_order_acquire))
            return *c;
        LambdaIV v = compute_interval();
        if (is_implicit() && cache_level() >= CacheLevel::Interval)
            detail::publish_once(iv_, v);
        return v;
    }

    LambdaExact lambda_exact() const
    {
        if (const auto* c = ex_.load(std::memory_order_acquire))
            return *c;
        ExactnessProbe probe;
        LambdaExact v = compute_exact();
        if (is_implicit() && cache_level() >= CacheLevel::Exact && !probe.tripped())
            detail::publish_once(ex_, v);
        return v;
    }

    /// Lambda numerators needed by a 2D predicate on a projection; for LPI
    /// the dropped axis is never computed when uncached.
    LambdaFP lambda_fp_projected(int ax0, int ax1) const;
    LambdaIV lambda_interval_projected(int ax0, int ax1) const;

    bool has_fp_cache() const noexcept { return fp_.load(std::memory_order_acquire) != nullptr; }
    bool has_interval_cache() const noexcept
    {
        return iv_.load(std::memory_order_acquire) != nullptr;
    }
    bool has_exact_cache() const noexcept { return ex_.load(std::memory_order_acquire) != nullptr; }

    /// Cached values, or nullptr.
    const LambdaFP* fp_cache() const noexcept { return fp_.load(std::memory_order_acquire); }
    const LambdaIV* interval_cache() const noexcept { return iv_.load(std::memory_order_acquire); }

private:
    template <typename T>
    Homogeneous<T> explicit_homogeneous() const
    {
        Homogeneous<T> h;
        if (const auto* p = std::get_if<Point2>(&def_))
        {
            h.x = T(p->x);
            h.y = T(p->y);
        }
        else
        {
            const auto& q = std::get<Point3>(def_);
            h.x = T(q.x);
            h.y = T(q.y);
            h.z = T(q.z);
        }
        h.d = T(1.0);
        return h;
    }

    LambdaFP compute_fp(std::array<bool, 3> want = {true, true, true}) const
    {
        switch (type())
        {
        case Type::Explicit2D:
        case Type::Explicit3D: {
            const auto h = explicit_homogeneous<double>();
            return {h.x, h.y, h.z, 1.0,
                    std::max({std::fabs(h.x), std::fabs(h.y), std::fabs(h.z)})};
        }
        case Type::LLI: {
            ++stage_stats().lambda_fp_evaluations;
            const auto& def = std::get<LLIDef>(def_);
            const auto h = lli_lambda<double>(def);
            return {h.x, h.y, 0.0, h.d, lli_beta(def)};
        }
        case Type::LPI: {
            ++stage_stats().lambda_fp_evaluations;
            const auto& def = std::get<LPIDef>(def_);
            const auto h = lpi_lambda<double>(def, want);
            return {h.x, h.y, h.z, h.d, lpi_beta(def)};
        }
        }
        return {};
    }

    LambdaIV compute_interval(std::array<bool, 3> want = {true, true, true}) const
    {
        switch (type())
        {
        case Type::Explicit2D:
        case Type::Explicit3D: return explicit_homogeneous<Interval>();
        case Type::LLI:
            ++stage_stats().lambda_interval_evaluations;
            return lli_lambda<Interval>(std::get<LLIDef>(def_));
        case Type::LPI:
            ++stage_stats().lambda_interval_evaluations;
            return lpi_lambda<Interval>(std::get<LPIDef>(def_), want);
        }
        return {};
    }

    LambdaExact compute_exact() const
    {
        switch (type())
        {
        case Type::Explicit2D:
        case Type::Explicit3D: return explicit_homogeneous<Expansion>();
        case Type::LLI:
            ++stage_stats().lambda_exact_evaluations;
            return lli_lambda<Expansion>(std::get<LLIDef>(def_));
        case Type::LPI:
            ++stage_stats().lambda_exact_evaluations;
            return lpi_lambda<Expansion>(std::get<LPIDef>(def_));
        }
        return {};
    }

    void clear_caches() noexcept
    {
        detail::free_slot(fp_);
        detail::free_slot(iv_);
        detail::free_slot(ex_);
    }

    Definition def_;
    mutable std::atomic<LambdaFP*> fp_{nullptr};
    mutable std::atomic<LambdaIV*> iv_{nullptr};
    mutable std::atomic<LambdaExact*> ex_{nullptr};
};

inline LambdaFP GenericPoint::lambda_fp_projected(int ax0, int ax1) const
{
    if (type() != Type::LPI)
        return lambda_fp();
    if (const auto* c = fp_.load(std::memory_order_acquire))
        return *c;
    if (cache_level() >= CacheLevel::FP)
        return lambda_fp();
    std::array<bool, 3> want{false, false, false};
    want[static_cast<std::size_t>(ax0)] = true;
    want[static_cast<std::size_t>(ax1)] = true;
    return compute_fp(want);
}

inline LambdaIV GenericPoint::lambda_interval_projected(int ax0, int ax1) const
{
    if (type() != Type::LPI)
        return lambda_interval();
    if (const auto* c = iv_.load(std::memory_order_acquire))
        return *c;
    if (cache_level() >= CacheLevel::Interval)
        return lambda_interval();
    std::array<bool, 3> want{false, false, false};
    want[static_cast<std::size_t>(ax0)] = true;
    want[static_cast<std::size_t>(ax1)] = true;
    return compute_interval(want);
}

/// Homogeneous representation under model T (double, Interval, Expansion).
template <typename T>
Homogeneous<T> lambdas(const GenericPoint& p);

template <>
inline Homogeneous<double> lambdas<double>(const GenericPoint& p)
{
    const auto v = p.lambda_fp();
    return {v.x, v.y, v.z, v.d};
}

template <>
inline Homogeneous<Interval> lambdas<Interval>(const GenericPoint& p)
{
    return p.lambda_interval();
}

template <>
inline Homogeneous<Expansion> lambdas<Expansion>(const GenericPoint& p)
{
    return p.lambda_exact();
}

} // namespace indirect

#endif
