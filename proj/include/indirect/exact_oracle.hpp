#ifndef INDIRECT_EXACT_ORACLE_HPP
#define INDIRECT_EXACT_ORACLE_HPP

// Reference predicates. Implicit points are solved parametrically in
// rationals, independent of the homogeneous formulas; the classical
// determinants are then evaluated in integers after clearing denominators.

#include <array>
#include <optional>
#include <stdexcept>

#include <boost/multiprecision/gmp.hpp>

#include "indirect/generic_point.hpp"
#include "indirect/predicates.hpp"

namespace indirect::oracle
{

using Rational = boost::multiprecision::mpq_rational;

struct RationalPoint
{
    std::array<Rational, 3> c;
    int dim = 2;
};

inline Sign sign_of(const Rational& r)
{
    const int s = r.sign();
    return s > 0 ? Sign::Positive : (s < 0 ? Sign::Negative : Sign::Zero);
}

namespace detail
{

inline std::array<Rational, 3> r3(const Point3& p) { return {Rational(p.x), Rational(p.y), Rational(p.z)}; }

inline std::array<Rational, 3> sub(const std::array<Rational, 3>& a, const std::array<Rational, 3>& b)
{
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline std::array<Rational, 3> cross(const std::array<Rational, 3>& a, const std::array<Rational, 3>& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Rational dot(const std::array<Rational, 3>& a, const std::array<Rational, 3>& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Rational cross2(const Rational& ax, const Rational& ay, const Rational& bx, const Rational& by)
{
    return ax * by - ay * bx;
}

} // namespace detail

/// Exact coordinates of p; nullopt when the construction is undefined.
inline std::optional<RationalPoint> solve(const GenericPoint& p)
{
    using namespace detail;
    RationalPoint out;
    switch (p.type())
    {
    case GenericPoint::Type::Explicit2D:
        out.c = {Rational(p.coord(0)), Rational(p.coord(1)), Rational(0)};
        out.dim = 2;
        return out;
    case GenericPoint::Type::Explicit3D:
        out.c = {Rational(p.coord(0)), Rational(p.coord(1)), Rational(p.coord(2))};
        out.dim = 3;
        return out;
    case GenericPoint::Type::LLI:
    {
        const LLIDef& d = p.as_lli();
        const Rational a1x(d.a1.x), a1y(d.a1.y), a2x(d.a2.x), a2y(d.a2.y);
        const Rational b1x(d.b1.x), b1y(d.b1.y), b2x(d.b2.x), b2y(d.b2.y);
        const Rational den = cross2(a2x - a1x, a2y - a1y, b2x - b1x, b2y - b1y);
        if (den == 0)
            return std::nullopt;
        const Rational t = cross2(b1x - a1x, b1y - a1y, b2x - b1x, b2y - b1y) / den;
        out.c = {a1x + t * (a2x - a1x), a1y + t * (a2y - a1y), Rational(0)};
        out.dim = 2;
        return out;
    }
    case GenericPoint::Type::LPI:
    {
        const LPIDef& d = p.as_lpi();
        const auto q1 = r3(d.q1), q2 = r3(d.q2), r = r3(d.r), s = r3(d.s), t = r3(d.t);
        const auto n = cross(sub(s, r), sub(t, r));
        const auto dir = sub(q2, q1);
        const Rational den = dot(n, dir);
        if (den == 0)
            return std::nullopt;
        const Rational u = dot(n, sub(r, q1)) / den;
        out.c = {q1[0] + u * dir[0], q1[1] + u * dir[1], q1[2] + u * dir[2]};
        out.dim = 3;
        return out;
    }
    }
    return std::nullopt;
}

using Integer = boost::multiprecision::mpz_int;

/// The same point with denominators cleared: coordinates c[k] / d, d > 0.
struct IntegerPoint
{
    std::array<Integer, 3> c;
    Integer d;
    int dim = 2;
};

inline IntegerPoint to_integer(const RationalPoint& p)
{
    IntegerPoint out;
    out.dim = p.dim;
    out.d = 1;
    for (int k = 0; k < p.dim; ++k)
        out.d = lcm(out.d, Integer(denominator(p.c[static_cast<std::size_t>(k)])));
    for (int k = 0; k < p.dim; ++k)
    {
        const auto& v = p.c[static_cast<std::size_t>(k)];
        out.c[static_cast<std::size_t>(k)] = Integer(numerator(v)) * (out.d / Integer(denominator(v)));
    }
    return out;
}

/// Solved form of p, or nullopt when the construction is undefined.
inline std::optional<IntegerPoint> solve_integer(const GenericPoint& p)
{
    auto r = solve(p);
    if (!r)
        return std::nullopt;
    return to_integer(*r);
}

namespace detail
{

inline Sign sign_of(const Integer& v)
{
    const int s = v.sign();
    return s > 0 ? Sign::Positive : (s < 0 ? Sign::Negative : Sign::Zero);
}

// (a - b) along axis k, times a.d * b.d.
inline Integer diff(const IntegerPoint& a, const IntegerPoint& b, int k)
{
    return a.c[static_cast<std::size_t>(k)] * b.d - b.c[static_cast<std::size_t>(k)] * a.d;
}

inline Integer det3(const std::array<std::array<Integer, 3>, 3>& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <std::size_t N>
void check_dims(const std::array<const GenericPoint*, N>& pts)
{
    for (const auto* p : pts)
        if (p->dimension() != pts[0]->dimension())
            throw std::invalid_argument("predicate arguments mix 2D and 3D points");
}

template <std::size_t N>
std::optional<PredicateResult> solve_all(const std::array<const GenericPoint*, N>& pts,
                                         std::array<IntegerPoint, N>& out)
{
    for (std::size_t i = 0; i < N; ++i)
    {
        auto s = solve_integer(*pts[i]);
        if (!s)
            return PredicateResult::undefined(static_cast<int>(i));
        out[i] = std::move(*s);
    }
    return std::nullopt;
}

} // namespace detail

// Predicates on solved points. Every row of a determinant is scaled by a
// positive product of denominators, which leaves the sign unchanged.

inline Sign orient2d(const IntegerPoint& a, const IntegerPoint& b, const IntegerPoint& c,
                     Projection proj = Projection::xy())
{
    using detail::diff;
    return detail::sign_of(diff(b, a, proj.u) * diff(c, a, proj.v) - diff(b, a, proj.v) * diff(c, a, proj.u));
}

inline Sign incircle(const IntegerPoint& a, const IntegerPoint& b, const IntegerPoint& c,
                     const IntegerPoint& d, Projection proj = Projection::xy())
{
    std::array<std::array<Integer, 3>, 3> m;
    const IntegerPoint* rows[3] = {&a, &b, &c};
    for (std::size_t k = 0; k < 3; ++k)
    {
        const IntegerPoint& p = *rows[k];
        const Integer u = detail::diff(p, d, proj.u);
        const Integer v = detail::diff(p, d, proj.v);
        const Integer s = p.d * d.d;
        m[k][0] = u * s;
        m[k][1] = v * s;
        m[k][2] = u * u + v * v;
    }
    return detail::sign_of(detail::det3(m));
}

inline Sign orient3d(const IntegerPoint& a, const IntegerPoint& b, const IntegerPoint& c,
                     const IntegerPoint& d)
{
    std::array<std::array<Integer, 3>, 3> m;
    const IntegerPoint* rows[3] = {&a, &b, &c};
    for (std::size_t k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
            m[k][static_cast<std::size_t>(j)] = detail::diff(*rows[k], d, j);
    return detail::sign_of(detail::det3(m));
}

inline Sign compare_coord(const IntegerPoint& a, const IntegerPoint& b, int axis)
{
    return detail::sign_of(detail::diff(a, b, axis));
}

inline PredicateResult orient2d(const GenericPoint& a, const GenericPoint& b, const GenericPoint& c,
                                Projection proj = Projection::xy())
{
    const std::array<const GenericPoint*, 3> pts{&a, &b, &c};
    detail::check_dims(pts);
    std::array<IntegerPoint, 3> r;
    if (auto u = detail::solve_all(pts, r))
        return *u;
    return PredicateResult(orient2d(r[0], r[1], r[2], proj));
}

inline PredicateResult incircle(const GenericPoint& a, const GenericPoint& b, const GenericPoint& c,
                                const GenericPoint& d, Projection proj = Projection::xy())
{
    const std::array<const GenericPoint*, 4> pts{&a, &b, &c, &d};
    detail::check_dims(pts);
    std::array<IntegerPoint, 4> r;
    if (auto u = detail::solve_all(pts, r))
        return *u;
    return PredicateResult(incircle(r[0], r[1], r[2], r[3], proj));
}

inline PredicateResult orient3d(const GenericPoint& a, const GenericPoint& b, const GenericPoint& c,
                                const GenericPoint& d)
{
    const std::array<const GenericPoint*, 4> pts{&a, &b, &c, &d};
    detail::check_dims(pts);
    if (a.dimension() != 3)
        throw std::invalid_argument("orient3d needs 3D points");
    std::array<IntegerPoint, 4> r;
    if (auto u = detail::solve_all(pts, r))
        return *u;
    return PredicateResult(orient3d(r[0], r[1], r[2], r[3]));
}

inline PredicateResult compare_coord(const GenericPoint& a, const GenericPoint& b, int axis)
{
    const std::array<const GenericPoint*, 2> pts{&a, &b};
    detail::check_dims(pts);
    std::array<IntegerPoint, 2> r;
    if (auto u = detail::solve_all(pts, r))
        return *u;
    return PredicateResult(compare_coord(r[0], r[1], axis));
}

/// Same plane-projection rule as the engine: drop the axis of the largest
/// normal component, preferring z, then y.
inline PredicateResult orient2d3d(const GenericPoint& p1, const GenericPoint& p2, const GenericPoint& p3,
                                  const Point3& r, const Point3& s, const Point3& t)
{
    using namespace detail;
    const auto n = cross(sub(r3(s), r3(r)), sub(r3(t), r3(r)));
    int best = 2;
    for (int c : {1, 0})
        if (abs(n[static_cast<std::size_t>(c)]) > abs(n[static_cast<std::size_t>(best)]))
            best = c;
    if (n[static_cast<std::size_t>(best)] == 0)
        throw DegeneratePlane();
    const Projection proj = best == 0 ? Projection::yz() : (best == 1 ? Projection::zx() : Projection::xy());
    const PredicateResult o = oracle::orient2d(p1, p2, p3, proj);
    if (o.is_undefined())
        return o;
    return PredicateResult(o.sign() * sign_of(n[static_cast<std::size_t>(best)]));
}

} // namespace indirect::oracle

#endif
