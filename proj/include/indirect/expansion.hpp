#ifndef INDIRECT_EXPANSION_HPP
#define INDIRECT_EXPANSION_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cfenv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include <boost/container/small_vector.hpp>

#include "indirect/sign.hpp"

namespace indirect
{

/// Unevaluated sum hi + lo produced by an error-free transformation.
struct TwoTerm
{
    double hi;
    double lo;
};

/// Knuth's branch-free two-sum: hi = fl(a + b), hi + lo = a + b exactly.
inline TwoTerm two_sum(double a, double b) noexcept
{
    const double x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    const double br = b - bv;
    const double ar = a - av;
    return {x, ar + br};
}

/// Dekker's fast two-sum. Requires |a| >= |b| or a == 0.
inline TwoTerm fast_two_sum(double a, double b) noexcept
{
    const double x = a + b;
    const double bv = x - a;
    return {x, b - bv};
}

namespace detail
{

// 2^27 + 1
inline constexpr double splitter = 134217729.0;

inline TwoTerm split(double a) noexcept
{
    const double c = splitter * a;
    const double abig = c - a;
    const double ahi = c - abig;
    return {ahi, a - ahi};
}

} // namespace detail

/// Two-product by Dekker/Veltkamp splitting. Valid while |a|,|b| stay far
/// from the overflow threshold and the error term does not underflow.
inline TwoTerm two_product_dekker(double a, double b) noexcept
{
    const double x = a * b;
    const auto [ahi, alo] = detail::split(a);
    const auto [bhi, blo] = detail::split(b);
    const double err1 = x - (ahi * bhi);
    const double err2 = err1 - (alo * bhi);
    const double err3 = err2 - (ahi * blo);
    return {x, (alo * blo) - err3};
}

/// Two-product through a single-rounding fused multiply-add.
inline TwoTerm two_product_fma(double a, double b) noexcept
{
    const double x = a * b;
    return {x, std::fma(a, b, -x)};
}

inline TwoTerm two_product(double a, double b) noexcept
{
#if defined(__FMA__) || defined(INDIRECT_FORCE_FMA)
    return two_product_fma(a, b);
#else
    return two_product_dekker(a, b);
#endif
}

/// Raised when an expansion grows past the configured component cap.
class ExpansionOverflow : public std::length_error
{
public:
    explicit ExpansionOverflow(std::size_t n)
        : std::length_error("expansion grew to " + std::to_string(n)
                            + " components, above the configured cap")
    {}
};

/// Watches for the floating-point events that break error-free
/// transformations: a product or sum that underflowed inexactly, overflowed,
/// or produced NaN. On exit the caller's flags are restored, plus whatever
/// was raised inside, so probes nest.
class ExactnessProbe
{
public:
    static constexpr int watched = FE_UNDERFLOW | FE_OVERFLOW | FE_INVALID;

    ExactnessProbe()
    {
        std::fegetexceptflag(&saved_, watched);
        std::feclearexcept(watched);
    }
    ~ExactnessProbe()
    {
        const int raised = std::fetestexcept(watched);
        std::fesetexceptflag(&saved_, watched);
        if (raised)
            std::feraiseexcept(raised);
    }
    ExactnessProbe(const ExactnessProbe&) = delete;
    ExactnessProbe& operator=(const ExactnessProbe&) = delete;

    bool tripped() const noexcept { return std::fetestexcept(watched) != 0; }

private:
    std::fexcept_t saved_{};
};

/// A floating-point expansion: a sequence of doubles of nondecreasing
/// magnitude whose exact sum is the represented real. Zero is the empty
/// sequence; no stored component is ever zero.
class Expansion
{
public:
    using storage_type = boost::container::small_vector<double, 8>;

    static constexpr std::size_t default_component_cap = 1024;

    static std::size_t component_cap() noexcept
    {
        return cap_.load(std::memory_order_relaxed);
    }
    static void set_component_cap(std::size_t cap) noexcept
    {
        cap_.store(cap, std::memory_order_relaxed);
    }

    Expansion() = default;

    explicit Expansion(double a)
    {
        if (a != 0.0)
            c_.push_back(a);
    }

    explicit Expansion(TwoTerm t)
    {
        if (t.lo != 0.0)
            c_.push_back(t.lo);
        if (t.hi != 0.0)
            c_.push_back(t.hi);
    }

    /// Adopts components verbatim after dropping zeros. The caller
    /// guarantees ordering and nonoverlap.
    static Expansion from_components(std::span<const double> comps)
    {
        Expansion e;
        for (double v : comps)
            if (v != 0.0)
                e.c_.push_back(v);
        return e;
    }

    std::span<const double> components() const noexcept
    {
        return {c_.data(), c_.size()};
    }
    std::size_t size() const noexcept { return c_.size(); }
    bool is_zero() const noexcept { return c_.empty(); }

    Sign sign() const noexcept
    {
        if (c_.empty())
            return Sign::Zero;
        return c_.back() > 0.0 ? Sign::Positive : Sign::Negative;
    }

    /// Approximate value; the largest component dominates.
    double estimate() const noexcept
    {
        double s = 0.0;
        for (double v : c_)
            s += v;
        return s;
    }

    Expansion operator-() const
    {
        Expansion r;
        r.c_.reserve(c_.size());
        for (double v : c_)
            r.c_.push_back(-v);
        return r;
    }

    friend Expansion operator+(const Expansion& e, const Expansion& f)
    {
        return sum(e, f);
    }
    friend Expansion operator-(const Expansion& e, const Expansion& f)
    {
        return sum(e, -f);
    }
    friend Expansion operator*(const Expansion& e, const Expansion& f)
    {
        return product(e, f);
    }

    static Expansion sum(const Expansion& e, const Expansion& f);
    static Expansion scale(const Expansion& e, double b);
    static Expansion product(const Expansion& e, const Expansion& f);

    /// Renormalizes in place (Shewchuk's compress); value is unchanged.
    void compress();

private:
    // Fast expansion sum and scale-expansion. Their output is nonoverlapping
    // in Shewchuk's bit-string sense only; normalize() tightens it.
    static Expansion sum_raw(const Expansion& e, const Expansion& f);
    static Expansion scale_raw(const Expansion& e, double b);
    void normalize();

    void check_cap() const
    {
        if (c_.size() > component_cap())
            throw ExpansionOverflow(c_.size());
    }

    storage_type c_;
    static inline std::atomic<std::size_t> cap_{default_component_cap};
};

namespace detail
{

// a is "larger" than b in the merge order of fast expansion sum.
inline bool mag_greater(double f, double e) noexcept
{
    return (f > e) == (f > -e);
}

} // namespace detail

inline Expansion Expansion::sum_raw(const Expansion& e, const Expansion& f)
{
    if (e.is_zero())
        return f;
    if (f.is_zero())
        return e;

    const auto& ec = e.c_;
    const auto& fc = f.c_;
    const std::size_t elen = ec.size();
    const std::size_t flen = fc.size();

    Expansion h;
    h.c_.reserve(elen + flen);

    std::size_t ei = 0;
    std::size_t fi = 0;
    double enow = ec[0];
    double fnow = fc[0];
    double q;
    if (detail::mag_greater(fnow, enow))
    {
        q = enow;
        ++ei;
    }
    else
    {
        q = fnow;
        ++fi;
    }

    if (ei < elen && fi < flen)
    {
        enow = ec[ei];
        fnow = fc[fi];
        TwoTerm t;
        if (detail::mag_greater(fnow, enow))
        {
            t = fast_two_sum(enow, q);
            ++ei;
        }
        else
        {
            t = fast_two_sum(fnow, q);
            ++fi;
        }
        q = t.hi;
        if (t.lo != 0.0)
            h.c_.push_back(t.lo);
        while (ei < elen && fi < flen)
        {
            enow = ec[ei];
            fnow = fc[fi];
            if (detail::mag_greater(fnow, enow))
            {
                t = two_sum(q, enow);
                ++ei;
            }
            else
            {
                t = two_sum(q, fnow);
                ++fi;
            }
            q = t.hi;
            if (t.lo != 0.0)
                h.c_.push_back(t.lo);
        }
    }
    for (; ei < elen; ++ei)
    {
        const TwoTerm t = two_sum(q, ec[ei]);
        q = t.hi;
        if (t.lo != 0.0)
            h.c_.push_back(t.lo);
    }
    for (; fi < flen; ++fi)
    {
        const TwoTerm t = two_sum(q, fc[fi]);
        q = t.hi;
        if (t.lo != 0.0)
            h.c_.push_back(t.lo);
    }
    if (q != 0.0)
        h.c_.push_back(q);
    h.check_cap();
    return h;
}

inline Expansion Expansion::scale_raw(const Expansion& e, double b)
{
    Expansion h;
    if (e.is_zero() || b == 0.0)
        return h;
    const auto& ec = e.c_;
    h.c_.reserve(2 * ec.size());

    TwoTerm p = two_product(ec[0], b);
    double q = p.hi;
    if (p.lo != 0.0)
        h.c_.push_back(p.lo);
    for (std::size_t i = 1; i < ec.size(); ++i)
    {
        p = two_product(ec[i], b);
        const TwoTerm s = two_sum(q, p.lo);
        if (s.lo != 0.0)
            h.c_.push_back(s.lo);
        const TwoTerm t = fast_two_sum(p.hi, s.hi);
        if (t.lo != 0.0)
            h.c_.push_back(t.lo);
        q = t.hi;
    }
    if (q != 0.0)
        h.c_.push_back(q);
    h.check_cap();
    return h;
}

inline Expansion Expansion::product(const Expansion& e, const Expansion& f)
{
    if (e.is_zero() || f.is_zero())
        return {};
    const Expansion& longer = e.size() >= f.size() ? e : f;
    const Expansion& shorter = e.size() >= f.size() ? f : e;
    if (shorter.size() == 1)
        return scale(longer, shorter.c_[0]);

    // Pairwise (tree) accumulation of the partial products keeps the
    // merge cost near n log n instead of quadratic in the term count.
    boost::container::small_vector<Expansion, 8> parts;
    parts.reserve(shorter.size());
    for (double b : shorter.c_)
        parts.push_back(scale_raw(longer, b));
    while (parts.size() > 1)
    {
        std::size_t out = 0;
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2)
            parts[out++] = sum_raw(parts[i], parts[i + 1]);
        if (parts.size() % 2 == 1)
            parts[out++] = std::move(parts.back());
        parts.resize(out);
    }
    Expansion r = std::move(parts.front());
    r.normalize();
    return r;
}

inline Expansion Expansion::sum(const Expansion& e, const Expansion& f)
{
    if (e.is_zero())
        return f;
    if (f.is_zero())
        return e;
    Expansion h = sum_raw(e, f);
    h.normalize();
    return h;
}

inline Expansion Expansion::scale(const Expansion& e, double b)
{
    Expansion h = scale_raw(e, b);
    h.normalize();
    return h;
}

inline void Expansion::compress()
{
    const std::size_t n = c_.size();
    if (n < 2)
        return;
    storage_type g(n);
    std::size_t bottom = n - 1;
    double q = c_[n - 1];
    for (std::size_t k = n - 1; k-- > 0;)
    {
        const TwoTerm t = fast_two_sum(q, c_[k]);
        if (t.lo != 0.0)
        {
            g[bottom--] = t.hi;
            q = t.lo;
        }
        else
        {
            q = t.hi;
        }
    }
    storage_type h;
    h.reserve(n);
    for (std::size_t k = bottom + 1; k < n; ++k)
    {
        const TwoTerm t = fast_two_sum(g[k], q);
        if (t.lo != 0.0)
            h.push_back(t.lo);
        q = t.hi;
    }
    if (q != 0.0)
        h.push_back(q);
    c_ = std::move(h);
}

inline Expansion expansion_sum(const Expansion& e, const Expansion& f)
{
    return e + f;
}
inline Expansion expansion_diff(const Expansion& e, const Expansion& f)
{
    return e - f;
}
inline Expansion expansion_scale(const Expansion& e, double b)
{
    return Expansion::scale(e, b);
}
inline Expansion expansion_product(const Expansion& e, const Expansion& f)
{
    return e * f;
}
inline Sign expansion_sign(const Expansion& e) noexcept { return e.sign(); }

/// ulp of a finite double (2^-1074 for subnormals).
inline double ulp(double x) noexcept
{
    const std::uint64_t e = (std::bit_cast<std::uint64_t>(x) >> 52) & 0x7ff;
    if (e > 52)
        return std::bit_cast<double>((e - 52) << 52);
    return std::bit_cast<double>(std::uint64_t{1} << (e == 0 ? 0 : e - 1));
}

inline Sign sign_of(const Expansion& e) noexcept { return e.sign(); }

/// Structural check: nondecreasing magnitudes, no zeros, and every
/// component smaller in magnitude than the ulp of the next larger one.
inline bool is_nonoverlapping(std::span<const double> comps) noexcept
{
    for (std::size_t i = 0; i < comps.size(); ++i)
        if (comps[i] == 0.0 || !std::isfinite(comps[i]))
            return false;
    for (std::size_t i = 0; i + 1 < comps.size(); ++i)
        if (!(std::fabs(comps[i]) < ulp(comps[i + 1])))
            return false;
    return true;
}

inline void Expansion::normalize()
{
    // One pass almost always suffices; a second handles a component that
    // lands exactly on the ulp of its neighbour.
    while (!is_nonoverlapping(components()))
    {
        for (double v : c_)
            if (!std::isfinite(v))
                return;
        compress();
    }
}

} // namespace indirect

#endif
