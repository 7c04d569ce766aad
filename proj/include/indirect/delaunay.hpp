#ifndef INDIRECT_DELAUNAY_HPP
#define INDIRECT_DELAUNAY_HPP

// Incremental Bowyer-Watson Delaunay triangulation over generic points.
// The convex hull is closed with ghost triangles sharing one infinite
// vertex. 3D points are triangulated by their XY projection.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "indirect/generic_point.hpp"
#include "indirect/predicates.hpp"

namespace indirect
{

class DegenerateInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct Triangle
{
    static constexpr int ghost = -1;

    // Counterclockwise; a ghost triangle stores the infinite vertex last and
    // its finite edge v[0] -> v[1] has the hull interior on its right.
    std::array<int, 3> v{};
    // n[i] is the triangle across the edge opposite v[i].
    std::array<int, 3> n{-1, -1, -1};
    bool alive = true;

    bool is_ghost() const noexcept { return v[2] == ghost; }
    int index_of(int vertex) const noexcept
    {
        return v[0] == vertex ? 0 : (v[1] == vertex ? 1 : (v[2] == vertex ? 2 : -1));
    }
};

struct LocateResult
{
    enum class Kind
    {
        Inside,
        OnEdge,
        OnVertex,
        OutsideHull,
    };
    Kind kind = Kind::Inside;
    int triangle = -1;
    int index = -1; // edge (opposite vertex slot) or vertex slot
};

class Triangulation
{
public:
    // Vertices are kept in a deque so cached lambdas stay in place.
    std::deque<GenericPoint> vertices;
    std::vector<Triangle> triangles;

    // Input bookkeeping filled by triangulate().
    std::vector<std::size_t> rejected;                        // undefined constructions
    std::vector<std::pair<std::size_t, int>> merged;          // input index -> existing vertex
    std::vector<int> vertex_of_input;                         // -1 when rejected

    std::size_t finite_triangle_count() const
    {
        std::size_t c = 0;
        for (const auto& t : triangles)
            c += t.alive && !t.is_ghost();
        return c;
    }

    std::vector<std::array<int, 3>> finite_triangles() const
    {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : triangles)
            if (t.alive && !t.is_ghost())
                out.push_back(t.v);
        return out;
    }

    /// Rebuilds neighbor links and the ghost layer from finite CCW triangles.
    static Triangulation from_triangles(std::vector<GenericPoint> points,
                                        const std::vector<std::array<int, 3>>& tris);

    /// Flips the edge opposite slot i of finite triangle t (no checks).
    void flip(int t, int i);

    int last_triangle = -1;
    std::vector<int> free_slots;

    // Insertion scratch space.
    std::vector<std::uint64_t> marks;
    std::uint64_t stamp = 0;
    std::vector<int> scratch_cavity;
    std::vector<int> scratch_stack;
    std::vector<std::pair<int, int>> scratch_start;

    int new_triangle(const std::array<int, 3>& v)
    {
        int id;
        if (!free_slots.empty())
        {
            id = free_slots.back();
            free_slots.pop_back();
            triangles[static_cast<std::size_t>(id)] = Triangle{v, {-1, -1, -1}, true};
        }
        else
        {
            id = static_cast<int>(triangles.size());
            triangles.push_back(Triangle{v, {-1, -1, -1}, true});
        }
        return id;
    }

    void kill(int t)
    {
        triangles[static_cast<std::size_t>(t)].alive = false;
        free_slots.push_back(t);
    }

    Triangle& tri(int t) { return triangles[static_cast<std::size_t>(t)]; }
    const Triangle& tri(int t) const { return triangles[static_cast<std::size_t>(t)]; }
    const GenericPoint& vertex(int v) const { return vertices[static_cast<std::size_t>(v)]; }
};

namespace detail
{

// Sign of orient2d on finite vertices, rejecting Undefined results.
inline Sign orient_sign(const GenericPoint& a, const GenericPoint& b, const GenericPoint& c)
{
    const PredicateResult r = orient2d(a, b, c);
    if (r.is_undefined())
        throw DegenerateInput("undefined implicit point reached the triangulator");
    return r.sign();
}

inline Sign incircle_sign(const GenericPoint& a, const GenericPoint& b, const GenericPoint& c,
                          const GenericPoint& d)
{
    const PredicateResult r = incircle(a, b, c, d);
    if (r.is_undefined())
        throw DegenerateInput("undefined implicit point reached the triangulator");
    return r.sign();
}

// p strictly between a and b, given that the three are collinear.
inline bool strictly_between(const GenericPoint& a, const GenericPoint& b, const GenericPoint& p)
{
    for (int axis : {0, 1})
    {
        const Sign ab = compare_coord(a, b, axis).sign();
        if (ab == Sign::Zero)
            continue;
        const Sign pa = compare_coord(p, a, axis).sign();
        const Sign pb = compare_coord(p, b, axis).sign();
        return pa == -ab && pb == ab;
    }
    return false;
}

inline bool in_conflict(const Triangulation& t, const Triangle& tr, const GenericPoint& p)
{
    if (tr.is_ghost())
    {
        const auto& a = t.vertex(tr.v[0]);
        const auto& b = t.vertex(tr.v[1]);
        const Sign o = orient_sign(a, b, p);
        return o == Sign::Positive || (o == Sign::Zero && strictly_between(a, b, p));
    }
    return incircle_sign(t.vertex(tr.v[0]), t.vertex(tr.v[1]), t.vertex(tr.v[2]), p) == Sign::Positive;
}

inline void link(Triangulation& t, int a, int ia, int b, int ib)
{
    t.tri(a).n[static_cast<std::size_t>(ia)] = b;
    t.tri(b).n[static_cast<std::size_t>(ib)] = a;
}

// Slot in triangle `t` whose opposite edge is (u, v) in either direction.
inline int edge_slot(const Triangle& t, int u, int v)
{
    for (int i = 0; i < 3; ++i)
    {
        const int a = t.v[static_cast<std::size_t>((i + 1) % 3)];
        const int b = t.v[static_cast<std::size_t>((i + 2) % 3)];
        if ((a == u && b == v) || (a == v && b == u))
            return i;
    }
    return -1;
}

// Approximate coordinates, used only to order insertions.
inline std::array<double, 2> approx_xy(const GenericPoint& p)
{
    if (p.is_explicit())
        return {p.coord(0), p.coord(1)};
    const LambdaFP l = p.lambda_fp();
    return {l.x / l.d, l.y / l.d};
}

inline std::uint64_t hilbert_key(std::uint32_t x, std::uint32_t y, int bits)
{
    const std::uint32_t n = 1u << bits;
    std::uint64_t d = 0;
    for (std::uint32_t s = n / 2; s > 0; s /= 2)
    {
        const std::uint32_t rx = (x & s) ? 1u : 0u;
        const std::uint32_t ry = (y & s) ? 1u : 0u;
        d += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
        if (ry == 0)
        {
            if (rx == 1)
            {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

} // namespace detail

/// Seeded biased randomized insertion order: rounds of doubling size,
/// each sorted along a Hilbert curve.
inline std::vector<std::size_t> spatial_shuffle(std::span<const GenericPoint> pts, std::uint64_t seed)
{
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::array<double, 2>> xy(pts.size());
    double lo[2] = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    double hi[2] = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        xy[i] = detail::approx_xy(pts[i]);
        for (int a = 0; a < 2; ++a)
            if (std::isfinite(xy[i][static_cast<std::size_t>(a)]))
            {
                lo[a] = std::min(lo[a], xy[i][static_cast<std::size_t>(a)]);
                hi[a] = std::max(hi[a], xy[i][static_cast<std::size_t>(a)]);
            }
    }
    constexpr int bits = 16;
    std::vector<std::uint64_t> key(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        std::uint32_t g[2];
        for (int a = 0; a < 2; ++a)
        {
            const double v = xy[i][static_cast<std::size_t>(a)];
            const double span = hi[a] - lo[a];
            double f = span > 0 && std::isfinite(v) ? (v - lo[a]) / span : 0.0;
            f = std::clamp(f, 0.0, 1.0);
            g[a] = static_cast<std::uint32_t>(f * ((1u << bits) - 1));
        }
        key[i] = detail::hilbert_key(g[0], g[1], bits);
    }

    std::size_t end = order.size();
    while (end > 0)
    {
        const std::size_t begin = end <= 64 ? 0 : end / 2;
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
        end = begin;
    }
    return order;
}

/// Locates p by a randomized visibility walk.
inline LocateResult locate(const Triangulation& t, const GenericPoint& p, int start = -1)
{
    int cur = start >= 0 ? start : t.last_triangle;
    if (cur < 0 || !t.tri(cur).alive)
    {
        cur = -1;
        for (std::size_t i = 0; i < t.triangles.size(); ++i)
            if (t.triangles[i].alive && !t.triangles[i].is_ghost())
            {
                cur = static_cast<int>(i);
                break;
            }
        if (cur < 0)
            throw DegenerateInput("empty triangulation");
    }
    if (t.tri(cur).is_ghost())
        cur = t.tri(cur).n[2];

    std::uint32_t state = 0x9e3779b9u;
    for (;;)
    {
        const Triangle& tr = t.tri(cur);
        state = state * 1664525u + 1013904223u;
        const int first = static_cast<int>((state >> 16) % 3);
        std::array<Sign, 3> o{};
        int next = -1;
        for (int k = 0; k < 3; ++k)
        {
            const int i = (first + k) % 3;
            o[static_cast<std::size_t>(i)] =
                detail::orient_sign(t.vertex(tr.v[static_cast<std::size_t>((i + 1) % 3)]),
                                    t.vertex(tr.v[static_cast<std::size_t>((i + 2) % 3)]), p);
            if (o[static_cast<std::size_t>(i)] == Sign::Negative)
            {
                next = tr.n[static_cast<std::size_t>(i)];
                break;
            }
        }
        if (next >= 0)
        {
            if (t.tri(next).is_ghost())
                return {LocateResult::Kind::OutsideHull, next, 2};
            cur = next;
            continue;
        }
        int zeros = 0, zero_slot = -1;
        for (int i = 0; i < 3; ++i)
            if (o[static_cast<std::size_t>(i)] == Sign::Zero)
            {
                ++zeros;
                zero_slot = i;
            }
        if (zeros == 0)
            return {LocateResult::Kind::Inside, cur, -1};
        if (zeros == 1)
            return {LocateResult::Kind::OnEdge, cur, zero_slot};
        for (int i = 0; i < 3; ++i)
            if (o[static_cast<std::size_t>(i)] != Sign::Zero)
                return {LocateResult::Kind::OnVertex, cur, i};
        return {LocateResult::Kind::OnVertex, cur, 0};
    }
}

struct InsertResult
{
    int vertex = -1;
    bool merged = false;
};

/// Inserts p; a point coinciding with an existing vertex is merged.
inline InsertResult insert(Triangulation& t, const GenericPoint& p)
{
    const LocateResult loc = locate(t, p);
    if (loc.kind == LocateResult::Kind::OnVertex)
        return {t.tri(loc.triangle).v[static_cast<std::size_t>(loc.index)], true};

    t.vertices.push_back(p);
    const int vid = static_cast<int>(t.vertices.size() - 1);
    const GenericPoint& q = t.vertices.back();

    // Grow the conflict region from the located triangle(s).
    std::vector<int>& cavity = t.scratch_cavity;
    std::vector<int>& stack = t.scratch_stack;
    cavity.clear();
    stack.clear();
    // Per-triangle visit marks: stamp + 0 = tested outside, stamp + 1 = in conflict.
    t.stamp += 2;
    t.marks.resize(t.triangles.size(), 0);
    const std::uint64_t stamp = t.stamp;
    auto mark = [&t](int tri) -> std::uint64_t& { return t.marks[static_cast<std::size_t>(tri)]; };
    auto seed = [&](int tri) {
        mark(tri) = stamp + 1;
        cavity.push_back(tri);
        stack.push_back(tri);
    };
    seed(loc.triangle);
    if (loc.kind == LocateResult::Kind::OnEdge)
        seed(t.tri(loc.triangle).n[static_cast<std::size_t>(loc.index)]);
    while (!stack.empty())
    {
        const int cur = stack.back();
        stack.pop_back();
        for (int i = 0; i < 3; ++i)
        {
            const int nb = t.tri(cur).n[static_cast<std::size_t>(i)];
            if (mark(nb) >= stamp)
                continue;
            const bool c = detail::in_conflict(t, t.tri(nb), q);
            mark(nb) = c ? stamp + 1 : stamp;
            if (c)
            {
                cavity.push_back(nb);
                stack.push_back(nb);
            }
        }
    }

    // Boundary edges (a, b) as seen from inside the cavity, with the outer
    // neighbor. New triangle (a, b, p), rotated so a ghost vertex sits last.
    struct Boundary
    {
        int a, b, outer;
    };
    std::vector<Boundary> boundary;
    for (int c : cavity)
    {
        const Triangle& tr = t.tri(c);
        for (int i = 0; i < 3; ++i)
        {
            const int nb = tr.n[static_cast<std::size_t>(i)];
            if (mark(nb) == stamp + 1)
                continue;
            boundary.push_back({tr.v[static_cast<std::size_t>((i + 1) % 3)],
                                tr.v[static_cast<std::size_t>((i + 2) % 3)], nb});
        }
    }
    for (int c : cavity)
        t.kill(c);

    // The cavity boundary is a simple cycle; index new triangles by their
    // first boundary vertex.
    std::vector<std::pair<int, int>>& starting_at = t.scratch_start;
    starting_at.clear();
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary)
    {
        std::array<int, 3> v{e.a, e.b, vid};
        // Rotate so a ghost vertex is last: (G, b, p) -> (b, p, G); (a, G, p) -> (p, a, G).
        if (v[0] == Triangle::ghost)
            v = {e.b, vid, Triangle::ghost};
        else if (v[1] == Triangle::ghost)
            v = {vid, e.a, Triangle::ghost};
        const int nt = t.new_triangle(v);
        created.push_back(nt);
        const int slot_out = detail::edge_slot(t.tri(nt), e.a, e.b);
        detail::link(t, nt, slot_out, e.outer, detail::edge_slot(t.tri(e.outer), e.a, e.b));
        starting_at.emplace_back(e.a, nt);
    }
    for (std::size_t k = 0; k < boundary.size(); ++k)
    {
        const auto& e = boundary[k];
        const int nt = created[k];
        // Edge (b, p) is shared with the new triangle starting at b.
        int other = -1;
        for (const auto& [v, tri] : starting_at)
            if (v == e.b)
            {
                other = tri;
                break;
            }
        detail::link(t, nt, detail::edge_slot(t.tri(nt), e.b, vid), other,
                     detail::edge_slot(t.tri(other), e.b, vid));
    }
    for (int nt : created)
        if (!t.tri(nt).is_ghost())
        {
            t.last_triangle = nt;
            break;
        }
    return {vid, false};
}

struct TriangulateOptions
{
    std::uint64_t seed = 0x5eed;
};

/// Delaunay triangulation of the points (XY projection for 3D points).
inline Triangulation triangulate(std::span<const GenericPoint> points, const TriangulateOptions& opt = {})
{
    if (points.size() < 3)
        throw DegenerateInput("triangulation needs at least 3 points");
    const int dim = points[0].dimension();
    for (const auto& p : points)
        if (p.dimension() != dim)
            throw std::invalid_argument("points mix 2D and 3D");

    Triangulation t;
    t.vertex_of_input.assign(points.size(), -1);
    std::vector<std::size_t> usable;
    usable.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        if (construction_defined(points[i]))
            usable.push_back(i);
        else
            t.rejected.push_back(i);
    }

    std::vector<GenericPoint> pts;
    pts.reserve(usable.size());
    for (auto i : usable)
        pts.push_back(points[i]);
    const std::vector<std::size_t> order = spatial_shuffle(pts, opt.seed);

    // Seed triangle: first three non-collinear points in insertion order.
    const std::size_t m = order.size();
    std::size_t i0 = 0, i1 = m, i2 = m;
    auto P = [&](std::size_t k) -> const GenericPoint& { return pts[order[k]]; };
    for (std::size_t k = 1; k < m; ++k)
        if (compare_coord(P(k), P(0), 0).sign() != Sign::Zero
            || compare_coord(P(k), P(0), 1).sign() != Sign::Zero)
        {
            i1 = k;
            break;
        }
    if (i1 == m)
        throw DegenerateInput("all points coincide");
    Sign o = Sign::Zero;
    for (std::size_t k = i1 + 1; k < m; ++k)
    {
        o = detail::orient_sign(P(i0), P(i1), P(k));
        if (o != Sign::Zero)
        {
            i2 = k;
            break;
        }
    }
    if (i2 == m)
        throw DegenerateInput("all points are collinear");

    auto add_vertex = [&](std::size_t k) {
        t.vertices.push_back(P(k));
        const int v = static_cast<int>(t.vertices.size() - 1);
        t.vertex_of_input[usable[order[k]]] = v;
        return v;
    };
    const int a = add_vertex(i0);
    int b = add_vertex(i1);
    int c = add_vertex(i2);
    if (o == Sign::Negative)
        std::swap(b, c);
    const int f = t.new_triangle({a, b, c});
    const int g0 = t.new_triangle({c, b, Triangle::ghost}); // across edge opposite a
    const int g1 = t.new_triangle({a, c, Triangle::ghost}); // opposite b
    const int g2 = t.new_triangle({b, a, Triangle::ghost}); // opposite c
    detail::link(t, f, 0, g0, 2);
    detail::link(t, f, 1, g1, 2);
    detail::link(t, f, 2, g2, 2);
    // Ghost-ghost adjacency around the infinite vertex.
    detail::link(t, g0, 0, g2, 1); // share (b, G)
    detail::link(t, g0, 1, g1, 0); // share (c, G)
    detail::link(t, g1, 1, g2, 0); // share (a, G)
    t.last_triangle = f;

    for (std::size_t k = 0; k < m; ++k)
    {
        if (k == i0 || k == i1 || k == i2)
            continue;
        const std::size_t input = usable[order[k]];
        const InsertResult r = insert(t, P(k));
        t.vertex_of_input[input] = r.vertex;
        if (r.merged)
            t.merged.emplace_back(input, r.vertex);
    }
    return t;
}

inline Triangulation triangulate(const std::vector<GenericPoint>& points, const TriangulateOptions& opt = {})
{
    return triangulate(std::span<const GenericPoint>(points), opt);
}

struct VerifyReport
{
    bool ok = true;
    std::vector<std::string> violations;

    void fail(std::string s)
    {
        ok = false;
        if (violations.size() < 100)
            violations.push_back(std::move(s));
    }
};

/// Exhaustive structural, orientation and empty-circle check with exact
/// predicates.
inline VerifyReport verify_delaunay(const Triangulation& t)
{
    ScopedFirstStage exact(Stage::Exact);
    VerifyReport rep;
    const int nv = static_cast<int>(t.vertices.size());
    std::vector<char> used(static_cast<std::size_t>(nv), 0);
    std::size_t finite = 0, ghosts = 0;
    for (std::size_t id = 0; id < t.triangles.size(); ++id)
    {
        const Triangle& tr = t.triangles[id];
        if (!tr.alive)
            continue;
        const std::string name = "triangle " + std::to_string(id);
        tr.is_ghost() ? ++ghosts : ++finite;
        for (int i = 0; i < 3; ++i)
        {
            const int v = tr.v[static_cast<std::size_t>(i)];
            if (v == Triangle::ghost ? i != 2 : (v < 0 || v >= nv))
            {
                rep.fail(name + ": bad vertex index");
                continue;
            }
            if (v != Triangle::ghost)
                used[static_cast<std::size_t>(v)] = 1;
            const int nb = tr.n[static_cast<std::size_t>(i)];
            if (nb < 0 || static_cast<std::size_t>(nb) >= t.triangles.size() || !t.tri(nb).alive)
            {
                rep.fail(name + ": dangling neighbor");
                continue;
            }
            const int u = tr.v[static_cast<std::size_t>((i + 1) % 3)];
            const int w = tr.v[static_cast<std::size_t>((i + 2) % 3)];
            const Triangle& o = t.tri(nb);
            const int j = detail::edge_slot(o, u, w);
            if (j < 0 || o.n[static_cast<std::size_t>(j)] != static_cast<int>(id)
                || o.v[static_cast<std::size_t>((j + 1) % 3)] != w || o.v[static_cast<std::size_t>((j + 2) % 3)] != u)
            {
                rep.fail(name + ": inconsistent neighbor link");
                continue;
            }
            if (!tr.is_ghost() && !o.is_ghost() && static_cast<int>(id) < nb)
            {
                const int opp = o.v[static_cast<std::size_t>(j)];
                if (detail::incircle_sign(t.vertex(tr.v[0]), t.vertex(tr.v[1]), t.vertex(tr.v[2]), t.vertex(opp))
                    == Sign::Positive)
                    rep.fail(name + ": vertex " + std::to_string(opp) + " inside circumcircle");
            }
        }
        if (!tr.is_ghost())
        {
            if (detail::orient_sign(t.vertex(tr.v[0]), t.vertex(tr.v[1]), t.vertex(tr.v[2])) != Sign::Positive)
                rep.fail(name + ": not positively oriented");
        }
        else
        {
            // Hull convexity at v[1]: the next hull edge must not turn left.
            const Triangle& nx = t.tri(tr.n[0]);
            if (nx.alive && nx.is_ghost() && nx.v[0] == tr.v[1])
            {
                const int w = nx.v[1];
                if (detail::orient_sign(t.vertex(tr.v[0]), t.vertex(tr.v[1]), t.vertex(w)) == Sign::Positive)
                    rep.fail(name + ": hull not convex");
            }
        }
    }
    for (int v = 0; v < nv; ++v)
        if (!used[static_cast<std::size_t>(v)])
            rep.fail("vertex " + std::to_string(v) + " not in any triangle");
    if (ghosts < 3 || finite + 2 + ghosts != 2 * static_cast<std::size_t>(nv))
        rep.fail("Euler characteristic mismatch");
    return rep;
}

inline Triangulation Triangulation::from_triangles(std::vector<GenericPoint> points,
                                                   const std::vector<std::array<int, 3>>& tris)
{
    Triangulation t;
    for (auto& p : points)
        t.vertices.push_back(std::move(p));
    std::unordered_map<std::uint64_t, std::pair<int, int>> edges; // directed (u,v) -> (tri, slot)
    auto key = [](int u, int v) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
    };
    for (const auto& v : tris)
        t.new_triangle(v);
    const int finite = static_cast<int>(t.triangles.size());
    for (int id = 0; id < finite; ++id)
        for (int i = 0; i < 3; ++i)
        {
            const auto& v = t.tri(id).v;
            edges[key(v[static_cast<std::size_t>((i + 1) % 3)], v[static_cast<std::size_t>((i + 2) % 3)])] = {id, i};
        }
    std::unordered_map<int, int> ghost_from; // hull vertex u -> ghost (u, w, G)
    for (int id = 0; id < finite; ++id)
        for (int i = 0; i < 3; ++i)
        {
            const auto v = t.tri(id).v;
            const int u = v[static_cast<std::size_t>((i + 1) % 3)];
            const int w = v[static_cast<std::size_t>((i + 2) % 3)];
            auto it = edges.find(key(w, u));
            if (it != edges.end())
            {
                t.tri(id).n[static_cast<std::size_t>(i)] = it->second.first;
                continue;
            }
            const int g = t.new_triangle({w, u, Triangle::ghost});
            detail::link(t, id, i, g, 2);
            ghost_from[w] = g;
        }
    for (const auto& [w, g] : ghost_from)
    {
        const int u = t.tri(g).v[1];
        auto it = ghost_from.find(u);
        if (it != ghost_from.end())
            detail::link(t, g, 0, it->second, 1);
    }
    t.last_triangle = tris.empty() ? -1 : 0;
    return t;
}

inline void Triangulation::flip(int a, int i)
{
    Triangle& ta = tri(a);
    const int b = ta.n[static_cast<std::size_t>(i)];
    Triangle& tb = tri(b);
    const int p = ta.v[static_cast<std::size_t>(i)];
    const int u = ta.v[static_cast<std::size_t>((i + 1) % 3)];
    const int w = ta.v[static_cast<std::size_t>((i + 2) % 3)];
    const int j = detail::edge_slot(tb, u, w);
    const int q = tb.v[static_cast<std::size_t>(j)];
    const int n_pu = ta.n[static_cast<std::size_t>((i + 2) % 3)]; // across (p, u)
    const int n_wp = ta.n[static_cast<std::size_t>((i + 1) % 3)]; // across (w, p)
    const int n_uq = tb.n[static_cast<std::size_t>(detail::edge_slot(tb, u, q))];
    const int n_qw = tb.n[static_cast<std::size_t>(detail::edge_slot(tb, q, w))];
    ta.v = {p, u, q};
    tb.v = {p, q, w};
    auto relink = [this](int self, int x, int y, int other) {
        const int s = detail::edge_slot(tri(self), x, y);
        tri(self).n[static_cast<std::size_t>(s)] = other;
        const int r = detail::edge_slot(tri(other), x, y);
        if (r >= 0)
            tri(other).n[static_cast<std::size_t>(r)] = self;
    };
    relink(a, p, u, n_pu);
    relink(a, u, q, n_uq);
    relink(b, q, w, n_qw);
    relink(b, w, p, n_wp);
    relink(a, p, q, b);
}

} // namespace indirect

#endif
