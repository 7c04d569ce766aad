#ifndef INDIRECT_PREDICATES_HPP
#define INDIRECT_PREDICATES_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include <boost/multiprecision/gmp.hpp>

#include "indirect/expansion.hpp"
#include "indirect/filter_kit.hpp"
#include "indirect/filter_table.hpp"
#include "indirect/formulas.hpp"
#include "indirect/generic_point.hpp"
#include "indirect/interval.hpp"
#include "indirect/sign.hpp"
#include "indirect/stats.hpp"

namespace indirect
{

/// Outcome of an indirect predicate: a sign, or Undefined when the
/// construction of argument `undefined_index()` has a zero denominator.
class PredicateResult
{
public:
    constexpr PredicateResult() = default;
    constexpr PredicateResult(Sign s) noexcept : sign_(s) {}

    static constexpr PredicateResult undefined(int index) noexcept
    {
        PredicateResult r;
        r.undefined_ = index;
        return r;
    }

    constexpr bool is_undefined() const noexcept { return undefined_ >= 0; }
    constexpr int undefined_index() const noexcept { return undefined_; }
    constexpr Sign sign() const noexcept { return sign_; }

    constexpr bool is_positive() const noexcept { return !is_undefined() && sign_ == Sign::Positive; }
    constexpr bool is_negative() const noexcept { return !is_undefined() && sign_ == Sign::Negative; }
    constexpr bool is_zero() const noexcept { return !is_undefined() && sign_ == Sign::Zero; }

    constexpr PredicateResult operator-() const noexcept
    {
        return is_undefined() ? *this : PredicateResult(-sign_);
    }

    friend constexpr bool operator==(const PredicateResult& a, const PredicateResult& b) noexcept
    {
        if (a.is_undefined() || b.is_undefined())
            return a.undefined_ == b.undefined_;
        return a.sign_ == b.sign_;
    }

    friend std::ostream& operator<<(std::ostream& os, const PredicateResult& r)
    {
        if (r.is_undefined())
            return os << "Undefined(" << r.undefined_ << ")";
        return os << r.sign_;
    }

private:
    Sign sign_ = Sign::Zero;
    int undefined_ = -1;
};

enum class Stage : int
{
    FP = 0,
    Interval = 1,
    Exact = 2,
};

namespace detail
{
inline std::atomic<Stage>& first_stage_cell() noexcept
{
    static std::atomic<Stage> s{Stage::FP};
    return s;
}
} // namespace detail

/// Stage the engine starts from. Skipping stages never changes results.
inline Stage first_stage() noexcept
{
    return detail::first_stage_cell().load(std::memory_order_relaxed);
}
inline void set_first_stage(Stage s) noexcept
{
    detail::first_stage_cell().store(s, std::memory_order_relaxed);
}

class ScopedFirstStage
{
public:
    explicit ScopedFirstStage(Stage s) : saved_(first_stage()) { set_first_stage(s); }
    ~ScopedFirstStage() { set_first_stage(saved_); }
    ScopedFirstStage(const ScopedFirstStage&) = delete;
    ScopedFirstStage& operator=(const ScopedFirstStage&) = delete;

private:
    Stage saved_;
};

/// Argument-type signature and the permutation putting implicit arguments
/// first. perm[k] is the original index of canonical position k.
struct Signature
{
    int arity = 0;
    int implicit_count = 0;
    std::array<bool, 4> tags{};  // original order, true = implicit
    std::array<int, 4> perm{};
    bool odd = false;
};

inline Signature canonical_signature(std::span<const bool> implicit_tags)
{
    if (implicit_tags.size() < 2 || implicit_tags.size() > 4)
        throw std::invalid_argument("predicate arity must be 2, 3 or 4");
    Signature s;
    s.arity = static_cast<int>(implicit_tags.size());
    int k = 0;
    for (int i = 0; i < s.arity; ++i)
    {
        s.tags[static_cast<std::size_t>(i)] = implicit_tags[static_cast<std::size_t>(i)];
        if (implicit_tags[static_cast<std::size_t>(i)])
            s.perm[static_cast<std::size_t>(k++)] = i;
    }
    s.implicit_count = k;
    for (int i = 0; i < s.arity; ++i)
        if (!implicit_tags[static_cast<std::size_t>(i)])
            s.perm[static_cast<std::size_t>(k++)] = i;
    int inversions = 0;
    for (int i = 0; i < s.arity; ++i)
        for (int j = i + 1; j < s.arity; ++j)
            if (s.perm[static_cast<std::size_t>(i)] > s.perm[static_cast<std::size_t>(j)])
                ++inversions;
    s.odd = inversions % 2 == 1;
    return s;
}

/// Axis pair used when 2D predicates look at 3D points.
struct Projection
{
    int u = 0;
    int v = 1;

    static constexpr Projection xy() noexcept { return {0, 1}; }
    static constexpr Projection yz() noexcept { return {1, 2}; }
    static constexpr Projection zx() noexcept { return {2, 0}; }
};

class DegeneratePlane : public std::domain_error
{
public:
    DegeneratePlane() : std::domain_error("plane points are collinear") {}
};

// ---------------------------------------------------------------------------
// Polynomials of the canonical instances. Operation order mirrors
// formulas::program() exactly. For explicit arguments only x/y/z are read.

namespace poly
{

template <typename T>
T orient2d(int implicit, const Homogeneous<T>& p1, const Homogeneous<T>& p2,
           const Homogeneous<T>& p3)
{
    switch (implicit)
    {
    case 0: return (p2.x - p1.x) * (p3.y - p1.y) - (p2.y - p1.y) * (p3.x - p1.x);
    case 1:
        return (p1.d * p2.x - p1.x) * (p1.d * p3.y - p1.y)
               - (p1.d * p2.y - p1.y) * (p1.d * p3.x - p1.x);
    case 2:
        return (p1.d * p2.x - p2.d * p1.x) * (p1.d * p3.y - p1.y)
               - (p1.d * p2.y - p2.d * p1.y) * (p1.d * p3.x - p1.x);
    default:
        return (p1.d * p2.x - p2.d * p1.x) * (p1.d * p3.y - p3.d * p1.y)
               - (p1.d * p2.y - p2.d * p1.y) * (p1.d * p3.x - p3.d * p1.x);
    }
}

template <typename T>
T det3(const std::array<std::array<T, 3>, 3>& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <typename T>
T incircle(int implicit, const std::array<const Homogeneous<T>*, 4>& p)
{
    const Homogeneous<T>& p4 = *p[3];
    std::array<std::array<T, 3>, 3> m;
    for (int i = 0; i < 3; ++i)
    {
        const Homogeneous<T>& pi = *p[static_cast<std::size_t>(i)];
        auto& row = m[static_cast<std::size_t>(i)];
        if (i >= implicit)
        {
            row[0] = pi.x - p4.x;
            row[1] = pi.y - p4.y;
            row[2] = row[0] * row[0] + row[1] * row[1];
        }
        else if (implicit < 4)
        {
            const T dd = pi.d * pi.d;
            row[0] = pi.d * pi.x - dd * p4.x;
            row[1] = pi.d * pi.y - dd * p4.y;
            const T t = pi.d * (pi.x * p4.x + pi.y * p4.y);
            row[2] = pi.x * pi.x + pi.y * pi.y + dd * (p4.x * p4.x + p4.y * p4.y) - (t + t);
        }
        else
        {
            const T dd4 = pi.d * p4.d;
            const T dd = pi.d * pi.d;
            const T a = dd4 * p4.d;
            const T b = dd * p4.d;
            row[0] = a * pi.x - b * p4.x;
            row[1] = a * pi.y - b * p4.y;
            const T t = dd4 * (pi.x * p4.x + pi.y * p4.y);
            row[2] = p4.d * p4.d * (pi.x * pi.x + pi.y * pi.y)
                     + dd * (p4.x * p4.x + p4.y * p4.y) - (t + t);
        }
    }
    return det3(m);
}

template <typename T>
T orient3d(int implicit, const std::array<const Homogeneous<T>*, 4>& p)
{
    const Homogeneous<T>& p4 = *p[3];
    std::array<std::array<T, 3>, 3> r;
    for (int i = 0; i < 3; ++i)
    {
        const Homogeneous<T>& pi = *p[static_cast<std::size_t>(i)];
        auto& row = r[static_cast<std::size_t>(i)];
        if (i >= implicit)
        {
            row[0] = pi.x - p4.x;
            row[1] = pi.y - p4.y;
            row[2] = pi.z - p4.z;
        }
        else if (implicit < 4)
        {
            row[0] = pi.x - pi.d * p4.x;
            row[1] = pi.y - pi.d * p4.y;
            row[2] = pi.z - pi.d * p4.z;
        }
        else
        {
            row[0] = p4.d * pi.x - pi.d * p4.x;
            row[1] = p4.d * pi.y - pi.d * p4.y;
            row[2] = p4.d * pi.z - pi.d * p4.z;
        }
    }
    return det3(r);
}

/// Compares along the x slot of the homogeneous values.
template <typename T>
T compare(int implicit, const Homogeneous<T>& p1, const Homogeneous<T>& p2)
{
    if (implicit == 1)
        return p1.x - p1.d * p2.x;
    return p2.d * p1.x - p1.d * p2.x;
}

} // namespace poly

namespace detail
{

// Runtime thresholds: delta is inflated to cover the rounding of the
// plain floating-point power beta^k, so delta' * fl(beta^k) >= delta * beta^k.
inline const std::array<double, instance_count>& runtime_deltas()
{
    static const std::array<double, instance_count> table = [] {
        std::array<double, instance_count> t{};
        for (std::size_t i = 0; i < instance_count; ++i)
        {
            const auto& s = filter_table[i];
            const double slack =
                rounding::add_up(1.0, rounding::mul_up(filter_kit::unit_roundoff,
                                                       2.0 * (s.degree + 2)));
            t[i] = rounding::mul_up(s.delta, slack);
        }
        return t;
    }();
    return table;
}

// Thresholds this small may hide underflowed rounding errors.
inline constexpr double min_trusted_threshold = 0x1p-960;

inline bool fp_certified(double value, Instance inst, double beta) noexcept
{
    // Binary powering: any product tree of k factors carries at most k - 1
    // roundings, which the inflated delta accounts for.
    int k = filter_table[static_cast<std::size_t>(inst)].degree;
    double pw = 1.0;
    double b = beta;
    while (k > 0)
    {
        if (k & 1)
            pw *= b;
        k >>= 1;
        if (k)
            b *= b;
    }
    const double p = runtime_deltas()[static_cast<std::size_t>(inst)] * pw;
    if (!(p >= min_trusted_threshold) || !std::isfinite(p))
        return false;
    const double a = std::fabs(value);
    return a > p && a <= std::numeric_limits<double>::max();
}

template <typename T>
T pick(const Homogeneous<T>& h, int axis)
{
    return axis == 0 ? h.x : (axis == 1 ? h.y : h.z);
}

inline double pick(const LambdaFP& h, int axis)
{
    return axis == 0 ? h.x : (axis == 1 ? h.y : h.z);
}

// Canonically ordered arguments of one predicate call.
struct Args
{
    PredicateKind pred;
    int n = 0;
    int implicit = 0;
    ImplicitKind kind = ImplicitKind::None;
    std::array<const GenericPoint*, 4> pts{};
    std::array<int, 3> axes{0, 1, 2}; // source axes for the x, y, z slots
    bool projected = false;           // 2D predicate on 3D points
    std::array<int, 4> perm{};
    bool odd = false;
};

inline Instance instance_of(const Args& a)
{
    return instance_for(a.pred, a.implicit, a.kind);
}

inline Instance d_instance(ImplicitKind k)
{
    return k == ImplicitKind::LLI ? Instance::lli_d : Instance::lpi_d;
}

// Denominators appearing with odd multiplicity in D' (canonical indices).
inline int odd_denominators(PredicateKind p, int implicit) noexcept
{
    switch (p)
    {
    case PredicateKind::Orient2d: return implicit >= 2 ? implicit - 1 : 0; // d2 (, d3)
    case PredicateKind::Incircle: return 0;
    case PredicateKind::Orient3d: return implicit;
    case PredicateKind::CompareCoord: return implicit;
    }
    return 0;
}

inline int odd_denominator_start(PredicateKind p) noexcept
{
    return p == PredicateKind::Orient2d ? 1 : 0;
}

template <typename T>
Homogeneous<T> explicit_view(const GenericPoint& p, const std::array<int, 3>& axes, int slots)
{
    Homogeneous<T> h;
    h.x = T(p.coord(axes[0]));
    h.y = T(p.coord(axes[1]));
    if (slots == 3)
        h.z = T(p.coord(axes[2]));
    h.d = T(1.0);
    return h;
}

inline int slot_count(const Args& a) { return a.pred == PredicateKind::Orient3d ? 3 : (a.pred == PredicateKind::CompareCoord ? 1 : 2); }

template <typename T>
Homogeneous<T> implicit_view(const Homogeneous<T>& h, const std::array<int, 3>& axes, int slots)
{
    Homogeneous<T> r;
    r.x = pick(h, axes[0]);
    if (slots >= 2)
        r.y = pick(h, axes[1]);
    if (slots == 3)
        r.z = pick(h, axes[2]);
    r.d = h.d;
    return r;
}

template <typename T>
T evaluate_poly(const Args& a, const std::array<Homogeneous<T>, 4>& h)
{
    switch (a.pred)
    {
    case PredicateKind::Orient2d: return poly::orient2d<T>(a.implicit, h[0], h[1], h[2]);
    case PredicateKind::Incircle:
        return poly::incircle<T>(a.implicit, {&h[0], &h[1], &h[2], &h[3]});
    case PredicateKind::Orient3d:
        return poly::orient3d<T>(a.implicit, {&h[0], &h[1], &h[2], &h[3]});
    case PredicateKind::CompareCoord: return poly::compare<T>(a.implicit, h[0], h[1]);
    }
    return T{};
}

// b-factors contributed by the explicit arguments of a mixed instance:
// plain coordinates, plus differences to the last argument for incircle
// and orient3d rows.
inline double explicit_beta(const Args& a, const std::array<Homogeneous<double>, 4>& h, int slots)
{
    double b = 0.0;
    auto acc = [&b](double v) { b = std::max(b, std::fabs(v)); };
    const bool rows = a.pred == PredicateKind::Incircle || a.pred == PredicateKind::Orient3d;
    for (int i = a.implicit; i < a.n; ++i)
    {
        const auto& p = h[static_cast<std::size_t>(i)];
        acc(p.x);
        if (slots >= 2)
            acc(p.y);
        if (slots == 3)
            acc(p.z);
        if (rows && i < 3 && a.implicit < 4)
        {
            const auto& q = h[3];
            acc(p.x - q.x);
            if (slots >= 2)
                acc(p.y - q.y);
            if (slots == 3)
                acc(p.z - q.z);
        }
    }
    return b;
}

inline Sign apply_parity(const Args& a, Sign s, std::span<const Sign> dsigns)
{
    if (s == Sign::Zero)
        return s;
    const int start = odd_denominator_start(a.pred);
    const int count = odd_denominators(a.pred, a.implicit);
    for (int i = start; i < start + count && i < a.implicit; ++i)
        if (dsigns[static_cast<std::size_t>(i)] == Sign::Negative)
            s = -s;
    return s;
}

inline std::optional<PredicateResult> stage_fp(const Args& a)
{
    const int slots = slot_count(a);
    std::array<Homogeneous<double>, 4> h;
    std::array<Sign, 4> dsigns{};
    double beta = 0.0;
    for (int i = 0; i < a.implicit; ++i)
    {
        const GenericPoint& p = *a.pts[static_cast<std::size_t>(i)];
        LambdaFP computed;
        const LambdaFP* cached = p.fp_cache();
        if (!cached)
            computed = a.projected ? p.lambda_fp_projected(a.axes[0], a.axes[1]) : p.lambda_fp();
        const LambdaFP& l = cached ? *cached : computed;
        if (!fp_certified(l.d, d_instance(a.kind), l.beta))
            return std::nullopt;
        dsigns[static_cast<std::size_t>(i)] = sign_of(l.d);
        auto& hi = h[static_cast<std::size_t>(i)];
        hi.x = pick(l, a.axes[0]);
        hi.y = slots >= 2 ? pick(l, a.axes[1]) : 0.0;
        hi.z = slots == 3 ? pick(l, a.axes[2]) : 0.0;
        hi.d = l.d;
        beta = std::max(beta, l.beta);
    }
    for (int i = a.implicit; i < a.n; ++i)
        h[static_cast<std::size_t>(i)] = explicit_view<double>(*a.pts[static_cast<std::size_t>(i)], a.axes, slots);

    const double value = evaluate_poly<double>(a, h);
    // A rounded difference of two doubles always has the exact sign.
    if (a.pred == PredicateKind::CompareCoord && a.implicit == 0)
        return PredicateResult(apply_parity(a, sign_of(value), dsigns));
    if (a.implicit == 0)
    {
        // Standard direct predicates: b-factors are the coordinate differences
        // to the base point (p1 for orient2d, the last point otherwise).
        const auto& q = a.pred == PredicateKind::Orient2d ? h[0] : h[static_cast<std::size_t>(a.n - 1)];
        const int first = a.pred == PredicateKind::Orient2d ? 1 : 0;
        const int last = a.pred == PredicateKind::Orient2d ? a.n : a.n - 1;
        for (int i = first; i < last; ++i)
        {
            const auto& p = h[static_cast<std::size_t>(i)];
            beta = std::max({beta, std::fabs(p.x - q.x), std::fabs(p.y - q.y),
                             slots == 3 ? std::fabs(p.z - q.z) : 0.0});
        }
    }
    else
    {
        beta = std::max(beta, explicit_beta(a, h, slots));
    }
    if (!fp_certified(value, instance_of(a), beta))
        return std::nullopt;
    return PredicateResult(apply_parity(a, sign_of(value), dsigns));
}

inline UpInterval up(const Interval& x) { return UpInterval::from(x); }

inline std::optional<PredicateResult> stage_interval(const Args& a)
{
    const int slots = slot_count(a);
    std::array<LambdaIV, 4> computed;
    std::array<const LambdaIV*, 4> iv{};
    std::array<Sign, 4> dsigns{};
    for (int i = 0; i < a.implicit; ++i)
    {
        const auto k = static_cast<std::size_t>(i);
        const GenericPoint& p = *a.pts[k];
        iv[k] = p.interval_cache();
        if (!iv[k])
        {
            computed[k] = a.projected ? p.lambda_interval_projected(a.axes[0], a.axes[1]) : p.lambda_interval();
            iv[k] = &computed[k];
        }
        const auto s = iv[k]->d.sign();
        if (!s || *s == Sign::Zero)
            return std::nullopt;
        dsigns[k] = *s;
    }

    std::optional<Sign> s;
    {
        rounding::UpwardScope scope;
        std::array<Homogeneous<UpInterval>, 4> h;
        for (int i = 0; i < a.implicit; ++i)
        {
            const LambdaIV& src = *iv[static_cast<std::size_t>(i)];
            auto& dst = h[static_cast<std::size_t>(i)];
            dst.x = up(pick(src, a.axes[0]));
            if (slots >= 2)
                dst.y = up(pick(src, a.axes[1]));
            if (slots == 3)
                dst.z = up(pick(src, a.axes[2]));
            dst.d = up(src.d);
        }
        for (int i = a.implicit; i < a.n; ++i)
            h[static_cast<std::size_t>(i)] =
                explicit_view<UpInterval>(*a.pts[static_cast<std::size_t>(i)], a.axes, slots);
        s = evaluate_poly<UpInterval>(a, h).sign();
    }
    if (!s)
        return std::nullopt;
    return PredicateResult(apply_parity(a, *s, dsigns));
}

using ExactRational = boost::multiprecision::mpq_rational;

inline Sign sign_of(const ExactRational& v) { return static_cast<Sign>(v.sign()); }

inline Homogeneous<ExactRational> rational_lambdas(const GenericPoint& p)
{
    switch (p.type())
    {
    case GenericPoint::Type::LLI: return lli_lambda<ExactRational>(p.as_lli());
    case GenericPoint::Type::LPI: return lpi_lambda<ExactRational>(p.as_lpi());
    default: return {};
    }
}

template <typename T, typename LambdaOf>
PredicateResult exact_sign(const Args& a, LambdaOf&& lambda_of)
{
    const int slots = slot_count(a);
    std::array<Homogeneous<T>, 4> h;
    std::array<Sign, 4> dsigns{};
    int undefined = -1;
    for (int i = 0; i < a.implicit; ++i)
    {
        const Homogeneous<T> l = lambda_of(*a.pts[static_cast<std::size_t>(i)]);
        const Sign s = sign_of(l.d);
        dsigns[static_cast<std::size_t>(i)] = s;
        if (s == Sign::Zero)
        {
            const int orig = a.perm[static_cast<std::size_t>(i)];
            if (undefined < 0 || orig < undefined)
                undefined = orig;
        }
        h[static_cast<std::size_t>(i)] = implicit_view(l, a.axes, slots);
    }
    if (undefined >= 0)
        return PredicateResult::undefined(undefined);
    for (int i = a.implicit; i < a.n; ++i)
        h[static_cast<std::size_t>(i)] = explicit_view<T>(*a.pts[static_cast<std::size_t>(i)], a.axes, slots);
    return PredicateResult(apply_parity(a, sign_of(evaluate_poly<T>(a, h)), dsigns));
}

inline PredicateResult stage_exact(const Args& a)
{
    try
    {
        ExactnessProbe probe;
        const PredicateResult r =
            exact_sign<Expansion>(a, [](const GenericPoint& p) { return p.lambda_exact(); });
        if (!probe.tripped())
            return r;
    }
    catch (const ExpansionOverflow&)
    {
    }
    // Expansions lost bits to underflow or overflow, or grew past the
    // component cap; redo it in rationals.
    ++stage_stats()[a.pred].rational_fallbacks;
    return exact_sign<ExactRational>(a, rational_lambdas);
}

inline PredicateResult to_original(const Args& a, PredicateResult r)
{
    return a.odd ? -r : r;
}

inline PredicateResult run_staged(const Args& a)
{
    StageCounters& c = stage_stats()[a.pred];
    ++c.calls;
    const Stage first = first_stage();
    if (first <= Stage::FP)
        if (auto r = stage_fp(a))
        {
            ++c.fp_success;
            return to_original(a, *r);
        }
    if (first <= Stage::Interval)
        if (auto r = stage_interval(a))
        {
            ++c.interval_success;
            return to_original(a, *r);
        }
    ++c.exact_evaluations;
    const PredicateResult r = stage_exact(a);
    if (r.is_undefined())
        ++c.undefined_hits;
    return to_original(a, r);
}

inline std::optional<PredicateResult> run_single_stage(const Args& a, Stage s)
{
    std::optional<PredicateResult> r;
    switch (s)
    {
    case Stage::FP: r = stage_fp(a); break;
    case Stage::Interval: r = stage_interval(a); break;
    case Stage::Exact: r = stage_exact(a); break;
    }
    if (r)
        return to_original(a, *r);
    return std::nullopt;
}

inline ImplicitKind implicit_kind_of(const GenericPoint& p)
{
    switch (p.type())
    {
    case GenericPoint::Type::LLI: return ImplicitKind::LLI;
    case GenericPoint::Type::LPI: return ImplicitKind::LPI;
    default: return ImplicitKind::None;
    }
}

inline Args make_args(PredicateKind pred, std::span<const GenericPoint* const> pts, Projection proj)
{
    Args a;
    a.pred = pred;
    a.n = static_cast<int>(pts.size());
    const int dim = pts[0]->dimension();
    for (const auto* p : pts)
        if (p->dimension() != dim)
            throw std::invalid_argument("predicate arguments mix 2D and 3D points");
    if (pred == PredicateKind::Orient3d)
    {
        if (dim != 3)
            throw std::invalid_argument("orient3d needs 3D points");
        a.axes = {0, 1, 2};
    }
    else if (dim == 3)
    {
        if (proj.u == proj.v || proj.u < 0 || proj.u > 2 || proj.v < 0 || proj.v > 2)
            throw std::invalid_argument("invalid projection");
        a.axes = {proj.u, proj.v, 3 - proj.u - proj.v};
        a.projected = true;
    }
    else
    {
        if (proj.u > 1 || proj.v > 1 || proj.u == proj.v)
            throw std::invalid_argument("2D points only project onto their own plane");
        a.axes = {proj.u, proj.v, 2};
    }
    std::array<bool, 4> tags{};
    for (int i = 0; i < a.n; ++i)
        tags[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(i)]->is_implicit();
    const Signature sig = canonical_signature(std::span<const bool>(tags.data(), static_cast<std::size_t>(a.n)));
    a.implicit = sig.implicit_count;
    a.perm = sig.perm;
    a.odd = sig.odd;
    for (int i = 0; i < a.n; ++i)
        a.pts[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(sig.perm[static_cast<std::size_t>(i)])];
    if (a.implicit > 0)
        a.kind = implicit_kind_of(*a.pts[0]);
    return a;
}

} // namespace detail

/// Sign of the orientation of three (possibly implicit) 2D points; for 3D
/// points the given axis projection is used. Positive for a left turn.
inline PredicateResult orient2d(const GenericPoint& p1, const GenericPoint& p2,
                                const GenericPoint& p3, Projection proj = Projection::xy())
{
    const std::array<const GenericPoint*, 3> pts{&p1, &p2, &p3};
    return detail::run_staged(detail::make_args(PredicateKind::Orient2d, pts, proj));
}

/// Positive iff p4 lies strictly inside the circle through p1, p2, p3
/// (counterclockwise).
inline PredicateResult incircle(const GenericPoint& p1, const GenericPoint& p2,
                                const GenericPoint& p3, const GenericPoint& p4,
                                Projection proj = Projection::xy())
{
    const std::array<const GenericPoint*, 4> pts{&p1, &p2, &p3, &p4};
    return detail::run_staged(detail::make_args(PredicateKind::Incircle, pts, proj));
}

/// Sign of det[p1 - p4; p2 - p4; p3 - p4].
inline PredicateResult orient3d(const GenericPoint& p1, const GenericPoint& p2,
                                const GenericPoint& p3, const GenericPoint& p4)
{
    const std::array<const GenericPoint*, 4> pts{&p1, &p2, &p3, &p4};
    return detail::run_staged(detail::make_args(PredicateKind::Orient3d, pts, Projection::xy()));
}

/// Sign of a[axis] - b[axis].
/// Projection under which compare_coord evaluates: the compared axis
/// travels in the x slot.
inline Projection compare_projection(int dim, int axis) noexcept
{
    return dim == 3 ? Projection{axis, axis == 0 ? 1 : 0} : Projection{axis, 1 - axis};
}

inline PredicateResult compare_coord(const GenericPoint& a, const GenericPoint& b, int axis)
{
    if (a.is_explicit() && b.is_explicit())
    {
        if (a.dimension() != b.dimension())
            throw std::invalid_argument("predicate arguments mix 2D and 3D points");
        auto& c = stage_stats()[PredicateKind::CompareCoord];
        ++c.calls;
        ++c.fp_success;
        return PredicateResult(sign_of(a.coord(axis) - b.coord(axis)));
    }
    const std::array<const GenericPoint*, 2> pts{&a, &b};
    const int dim = a.dimension();
    if (axis < 0 || axis >= dim)
        throw std::invalid_argument("axis out of range");
    auto args = detail::make_args(PredicateKind::CompareCoord, pts, compare_projection(dim, axis));
    return detail::run_staged(args);
}

namespace detail
{

struct PlaneAxis
{
    Projection proj;
    Sign plane_sign;
};

// Drops the axis where the exact plane normal has the largest magnitude
// (ties keep z, then y, dropped first). The projection is cyclic so the
// projected orientation of (r, s, t) equals that normal component.
inline PlaneAxis choose_plane_projection(const Point3& r, const Point3& s, const Point3& t)
{
    auto cross = [](double a0, double a1, double b0, double b1, double c0, double c1) {
        const Expansion ux = Expansion(two_sum(b0, -a0));
        const Expansion uy = Expansion(two_sum(b1, -a1));
        const Expansion vx = Expansion(two_sum(c0, -a0));
        const Expansion vy = Expansion(two_sum(c1, -a1));
        return ux * vy - uy * vx;
    };
    const std::array<Expansion, 3> n = {
        cross(r.y, r.z, s.y, s.z, t.y, t.z), // x component: yz projection
        cross(r.z, r.x, s.z, s.x, t.z, t.x), // y component: zx projection
        cross(r.x, r.y, s.x, s.y, t.x, t.y), // z component: xy projection
    };
    auto absval = [](const Expansion& e) { return e.sign() == Sign::Negative ? -e : e; };
    int best = 2;
    for (int c : {1, 0})
        if ((absval(n[static_cast<std::size_t>(c)]) - absval(n[static_cast<std::size_t>(best)])).sign()
            == Sign::Positive)
            best = c;
    const Sign s_best = n[static_cast<std::size_t>(best)].sign();
    if (s_best == Sign::Zero)
        throw DegeneratePlane();
    const Projection proj = best == 0 ? Projection::yz() : (best == 1 ? Projection::zx() : Projection::xy());
    return {proj, s_best};
}

} // namespace detail

/// Orientation of p1, p2, p3 within the oriented plane through r, s, t.
inline PredicateResult orient2d3d(const GenericPoint& p1, const GenericPoint& p2,
                                  const GenericPoint& p3, const Point3& r, const Point3& s,
                                  const Point3& t)
{
    const auto plane = detail::choose_plane_projection(r, s, t);
    const PredicateResult o = orient2d(p1, p2, p3, plane.proj);
    if (o.is_undefined())
        return o;
    return PredicateResult(o.sign() * plane.plane_sign);
}

/// False when an implicit point's construction is degenerate (d = 0).
inline bool construction_defined(const GenericPoint& p)
{
    if (p.is_explicit())
        return true;
    const Instance inst = detail::d_instance(detail::implicit_kind_of(p));
    if (first_stage() <= Stage::FP)
    {
        const LambdaFP l = p.lambda_fp();
        if (detail::fp_certified(l.d, inst, l.beta))
            return true;
    }
    if (first_stage() <= Stage::Interval)
    {
        const auto s = p.lambda_interval().d.sign();
        if (s && *s != Sign::Zero)
            return true;
    }
    return p.lambda_exact().d.sign() != Sign::Zero;
}

/// Runs exactly one stage of the engine; nullopt when that stage's filter
/// cannot certify the sign. Used to audit filters against an oracle.
inline std::optional<PredicateResult> evaluate_stage(PredicateKind pred,
                                                     std::span<const GenericPoint* const> pts,
                                                     Stage stage, Projection proj = Projection::xy())
{
    return detail::run_single_stage(detail::make_args(pred, pts, proj), stage);
}

} // namespace indirect

#endif
