#ifndef INDIRECT_EXPERIMENTS_HPP
#define INDIRECT_EXPERIMENTS_HPP

// Point-set generators and the timed triangulation runner used by the
// bench tool and the trend checks.

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "indirect/alloc_counter.hpp"
#include "indirect/delaunay.hpp"
#include "indirect/exact_oracle.hpp"
#include "indirect/generic_point.hpp"
#include "indirect/predicates.hpp"
#include "indirect/stats.hpp"

namespace indirect::bench
{

enum class Experiment
{
    Random2D,      // 1.1
    RandomLLI,     // 1.2
    GridLLI,       // 1.3
    Random3D,      // 2.1
    RandomLPI,     // 2.2
    GridLPI,       // 2.3
};

inline constexpr std::array<std::string_view, 6> experiment_names{"1.1", "1.2", "1.3", "2.1", "2.2", "2.3"};
inline constexpr std::array<std::string_view, 4> cache_names{"none", "fp", "interval", "exact"};

inline std::string_view name_of(Experiment e) { return experiment_names[static_cast<std::size_t>(e)]; }
inline std::string_view name_of(CacheLevel c) { return cache_names[static_cast<std::size_t>(c)]; }

inline Experiment parse_experiment(std::string_view s)
{
    for (std::size_t i = 0; i < experiment_names.size(); ++i)
        if (experiment_names[i] == s)
            return static_cast<Experiment>(i);
    throw std::invalid_argument("unknown experiment: " + std::string(s));
}

inline CacheLevel parse_cache(std::string_view s)
{
    for (std::size_t i = 0; i < cache_names.size(); ++i)
        if (cache_names[i] == s)
            return static_cast<CacheLevel>(i);
    throw std::invalid_argument("unknown cache level: " + std::string(s));
}

inline Stage parse_stage(std::string_view s)
{
    if (s == "fp")
        return Stage::FP;
    if (s == "interval")
        return Stage::Interval;
    if (s == "exact")
        return Stage::Exact;
    throw std::invalid_argument("unknown stage: " + std::string(s));
}

struct ExperimentConfig
{
    Experiment experiment = Experiment::Random2D;
    std::size_t n_points = 1000;
    int implicit_pct = 0;
    CacheLevel cache = CacheLevel::Interval;
    std::uint64_t seed = 1;
    std::optional<Stage> force_stage;
    bool verify = true;

    bool has_implicit_points() const
    {
        return experiment != Experiment::Random2D && experiment != Experiment::Random3D;
    }

    void validate() const
    {
        if (n_points < 3)
            throw std::invalid_argument("n_points must be at least 3");
        if (implicit_pct < 0 || implicit_pct > 100)
            throw std::invalid_argument("implicit_pct must be within 0..100");
    }

    int effective_implicit_pct() const { return has_implicit_points() ? implicit_pct : 0; }

    std::size_t implicit_count() const
    {
        return (n_points * static_cast<std::size_t>(effective_implicit_pct()) + 50) / 100;
    }
};

namespace detail
{

using Rng = std::mt19937_64;

inline double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline bool in_unit_box(const oracle::RationalPoint& p, int dim)
{
    for (int a = 0; a < dim; ++a)
        if (p.c[static_cast<std::size_t>(a)] < 0 || p.c[static_cast<std::size_t>(a)] > 1)
            return false;
    return true;
}

inline std::array<double, 3> random_direction(Rng& rng, int dim)
{
    std::normal_distribution<double> g;
    for (;;)
    {
        std::array<double, 3> v{g(rng), g(rng), dim == 3 ? g(rng) : 0.0};
        const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (len > 1e-3)
            return {v[0] / len, v[1] / len, v[2] / len};
    }
}

// Two lines through a random target, endpoints rounded to binary64.
inline GenericPoint random_lli(Rng& rng)
{
    std::uniform_real_distribution<double> len(0.25, 0.5);
    for (;;)
    {
        const Point2 t{unit(rng), unit(rng)};
        const auto u = random_direction(rng, 2);
        const auto v = random_direction(rng, 2);
        if (std::fabs(u[0] * v[1] - u[1] * v[0]) < 0.05)
            continue;
        const double a = len(rng), b = len(rng), c = len(rng), d = len(rng);
        const LLIDef def{{t.x - a * u[0], t.y - a * u[1]}, {t.x + b * u[0], t.y + b * u[1]},
                         {t.x - c * v[0], t.y - c * v[1]}, {t.x + d * v[0], t.y + d * v[1]}};
        const GenericPoint p(def);
        const auto exact = oracle::solve(p);
        if (exact && in_unit_box(*exact, 2))
            return p;
    }
}

// A line through a random target and a plane through a triangle around it.
inline GenericPoint random_lpi(Rng& rng)
{
    std::uniform_real_distribution<double> len(0.25, 0.5);
    for (;;)
    {
        const Point3 t{unit(rng), unit(rng), unit(rng)};
        const auto u = random_direction(rng, 3);
        const auto a = random_direction(rng, 3);
        const auto b = random_direction(rng, 3);
        const std::array<double, 3> n{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                                      a[0] * b[1] - a[1] * b[0]};
        const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        if (nn < 0.2 || std::fabs(n[0] * u[0] + n[1] * u[1] + n[2] * u[2]) < 0.05 * nn)
            continue;
        const double s1 = len(rng), s2 = len(rng), ra = len(rng), rb = len(rng);
        auto at = [&](const std::array<double, 3>& d, double k) {
            return Point3{t.x + k * d[0], t.y + k * d[1], t.z + k * d[2]};
        };
        const LPIDef def{at(u, -s1), at(u, s2), at(a, ra), at(b, rb),
                         Point3{t.x - ra * a[0] - rb * b[0], t.y - ra * a[1] - rb * b[1],
                                t.z - ra * a[2] - rb * b[2]}};
        const GenericPoint p(def);
        const auto exact = oracle::solve(p);
        if (exact && in_unit_box(*exact, 3))
            return p;
    }
}

struct Grid
{
    int k = 0;           // step is 2^-k
    std::uint32_t side = 2; // nodes per row, 2^k + 1
};

inline Grid grid_for(std::size_t n)
{
    Grid g;
    while (static_cast<std::size_t>(g.side) * g.side < n)
    {
        ++g.k;
        g.side = (1u << g.k) + 1;
    }
    return g;
}

// n distinct grid nodes in random order.
inline std::vector<std::pair<double, double>> grid_nodes(std::size_t n, Rng& rng)
{
    const Grid g = grid_for(n);
    const std::uint64_t total = static_cast<std::uint64_t>(g.side) * g.side;
    std::vector<std::uint64_t> ids(total);
    for (std::uint64_t i = 0; i < total; ++i)
        ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(n);
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (auto id : ids)
        out.emplace_back(std::ldexp(static_cast<double>(id % g.side), -g.k),
                         std::ldexp(static_cast<double>(id / g.side), -g.k));
    return out;
}

inline int small_int(Rng& rng) { return std::uniform_int_distribution<int>(-8, 8)(rng); }

// Lines through the node with small dyadic direction vectors: every
// defining coordinate is exact, so the intersection is the node itself.
inline GenericPoint grid_lli(double x, double y, Rng& rng)
{
    for (;;)
    {
        const int ux = small_int(rng), uy = small_int(rng), vx = small_int(rng), vy = small_int(rng);
        if (ux * vy - uy * vx == 0)
            continue;
        const double h = 0x1p-5;
        const double a = 1 + std::uniform_int_distribution<int>(0, 7)(rng);
        const double b = 1 + std::uniform_int_distribution<int>(0, 7)(rng);
        return GenericPoint::lli({x - a * h * ux, y - a * h * uy}, {x + b * h * ux, y + b * h * uy},
                                 {x - b * h * vx, y - b * h * vy}, {x + a * h * vx, y + a * h * vy});
    }
}

// Line and plane through P = (x, y, z); the plane triangle has centroid P.
inline GenericPoint grid_lpi(double x, double y, double z, Rng& rng)
{
    const double h = 0x1p-5;
    for (;;)
    {
        const std::array<int, 3> v{small_int(rng), small_int(rng), small_int(rng)};
        const std::array<int, 3> A{small_int(rng), small_int(rng), small_int(rng)};
        const std::array<int, 3> B{small_int(rng), small_int(rng), small_int(rng)};
        const std::array<long, 3> n{static_cast<long>(A[1]) * B[2] - static_cast<long>(A[2]) * B[1],
                                    static_cast<long>(A[2]) * B[0] - static_cast<long>(A[0]) * B[2],
                                    static_cast<long>(A[0]) * B[1] - static_cast<long>(A[1]) * B[0]};
        if (n[0] * v[0] + n[1] * v[1] + n[2] * v[2] == 0)
            continue;
        auto off = [&](const std::array<int, 3>& d, double k) {
            return Point3{x + k * h * d[0], y + k * h * d[1], z + k * h * d[2]};
        };
        const Point3 r = off(A, 1), s = off(B, 1);
        const Point3 t{x - h * (A[0] + B[0]), y - h * (A[1] + B[1]), z - h * (A[2] + B[2])};
        return GenericPoint::lpi(off(v, -1), off(v, 1), r, s, t);
    }
}

} // namespace detail

/// Deterministic point set for the configuration.
inline std::vector<GenericPoint> generate(const ExperimentConfig& cfg)
{
    cfg.validate();
    detail::Rng rng(cfg.seed);
    const std::size_t n = cfg.n_points;
    const std::size_t implicit = cfg.implicit_count();
    std::vector<GenericPoint> pts;
    pts.reserve(n);
    switch (cfg.experiment)
    {
    case Experiment::Random2D:
    case Experiment::RandomLLI:
        for (std::size_t i = 0; i < n; ++i)
        {
            if (i < implicit)
                pts.push_back(detail::random_lli(rng));
            else
            {
                const double x = detail::unit(rng);
                pts.push_back(GenericPoint::explicit2d(x, detail::unit(rng)));
            }
        }
        break;
    case Experiment::Random3D:
    case Experiment::RandomLPI:
        for (std::size_t i = 0; i < n; ++i)
        {
            if (i < implicit)
                pts.push_back(detail::random_lpi(rng));
            else
            {
                const double x = detail::unit(rng);
                const double y = detail::unit(rng);
                pts.push_back(GenericPoint::explicit3d(x, y, detail::unit(rng)));
            }
        }
        break;
    case Experiment::GridLLI:
    {
        const auto nodes = detail::grid_nodes(n, rng);
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto [x, y] = nodes[i];
            pts.push_back(i < implicit ? detail::grid_lli(x, y, rng) : GenericPoint::explicit2d(x, y));
        }
        break;
    }
    case Experiment::GridLPI:
    {
        const auto nodes = detail::grid_nodes(n, rng);
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto [x, y] = nodes[i];
            const double z = std::ldexp(static_cast<double>(rng() >> 44), -20);
            pts.push_back(i < implicit ? detail::grid_lpi(x, y, z, rng) : GenericPoint::explicit3d(x, y, z));
        }
        break;
    }
    }
    std::shuffle(pts.begin(), pts.end(), rng);
    return pts;
}

struct RunReport
{
    ExperimentConfig config;
    double elapsed_s = 0.0;
    std::size_t peak_bytes = 0;
    StageStats stats;
    std::size_t triangles = 0;
    std::size_t vertices = 0;
    std::size_t rejected = 0;
    std::size_t merged = 0;
    std::optional<bool> verified; // empty when verification was skipped
    std::string error;
    std::vector<std::array<int, 3>> triangle_list; // kept only on request

    std::uint64_t fp_hits() const { return stats.total().fp_success; }
    std::uint64_t interval_hits() const { return stats.total().interval_success; }
    std::uint64_t exact_hits() const { return stats.total().exact_evaluations; }
    std::uint64_t undefined_hits() const { return stats.total().undefined_hits; }
};

struct RunOptions
{
    bool keep_triangles = false;
};

/// Triangulates (timed) and optionally verifies a generated point set.
inline RunReport run(const std::vector<GenericPoint>& pts, const ExperimentConfig& cfg, const RunOptions& opt = {})
{
    RunReport rep;
    rep.config = cfg;
    try
    {
        ScopedCacheLevel cache(cfg.cache);
        std::optional<ScopedFirstStage> stage;
        if (cfg.force_stage)
            stage.emplace(*cfg.force_stage);
        reset_stage_stats();
        std::optional<Triangulation> tri;
        const std::size_t base = alloc_counters().reset_peak();
        const auto t0 = std::chrono::steady_clock::now();
        tri.emplace(triangulate(pts, TriangulateOptions{cfg.seed}));
        const auto t1 = std::chrono::steady_clock::now();
        const std::size_t peak = alloc_counters().peak.load();
        rep.peak_bytes = peak > base ? peak - base : 0;
        rep.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
        rep.stats = stage_stats();
        rep.triangles = tri->finite_triangle_count();
        rep.vertices = tri->vertices.size();
        rep.rejected = tri->rejected.size();
        rep.merged = tri->merged.size();
        if (opt.keep_triangles)
            rep.triangle_list = tri->finite_triangles();
        stage.reset();
        if (cfg.verify)
            rep.verified = verify_delaunay(*tri).ok;
    }
    catch (const std::exception& e)
    {
        rep.error = e.what();
        rep.verified = false;
    }
    return rep;
}

inline RunReport run(const ExperimentConfig& cfg, const RunOptions& opt = {})
{
    const auto pts = generate(cfg);
    return run(pts, cfg, opt);
}

inline constexpr std::string_view csv_header =
    "experiment,n_points,implicit_pct,cache,seed,elapsed_s,peak_bytes,orient2d_calls,incircle_calls,"
    "orient3d_calls,fp_hits,interval_hits,exact_hits,undefined_hits,triangles,verified";

inline std::string csv_row(const RunReport& r)
{
    std::ostringstream os;
    const auto& c = r.config;
    os << name_of(c.experiment) << ',' << c.n_points << ',' << c.effective_implicit_pct() << ','
       << name_of(c.cache) << ',' << c.seed << ',' << r.elapsed_s << ',' << r.peak_bytes << ','
       << r.stats[PredicateKind::Orient2d].calls << ',' << r.stats[PredicateKind::Incircle].calls << ','
       << r.stats[PredicateKind::Orient3d].calls << ',' << r.fp_hits() << ',' << r.interval_hits() << ','
       << r.exact_hits() << ',' << r.undefined_hits() << ',' << r.triangles << ','
       << (r.verified ? (*r.verified ? "true" : "false") : "skipped");
    return os.str();
}

// ---------------------------------------------------------------------------
// Point-set dump: one point per line, shortest round-trip decimals.

namespace detail
{
inline void put(std::ostream& os, double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    os << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
}
inline void put(std::ostream& os, const Point2& p)
{
    put(os, p.x);
    put(os, p.y);
}
inline void put(std::ostream& os, const Point3& p)
{
    put(os, p.x);
    put(os, p.y);
    put(os, p.z);
}
} // namespace detail

inline void write_points(std::ostream& os, const std::vector<GenericPoint>& pts)
{
    for (const auto& p : pts)
    {
        switch (p.type())
        {
        case GenericPoint::Type::Explicit2D: os << "E2"; detail::put(os, p.as_point2()); break;
        case GenericPoint::Type::Explicit3D: os << "E3"; detail::put(os, p.as_point3()); break;
        case GenericPoint::Type::LLI:
        {
            const auto& d = p.as_lli();
            os << "LLI";
            for (const auto& q : {d.a1, d.a2, d.b1, d.b2})
                detail::put(os, q);
            break;
        }
        case GenericPoint::Type::LPI:
        {
            const auto& d = p.as_lpi();
            os << "LPI";
            for (const auto& q : {d.q1, d.q2, d.r, d.s, d.t})
                detail::put(os, q);
            break;
        }
        }
        os << '\n';
    }
}

inline std::vector<GenericPoint> read_points(std::istream& is)
{
    std::vector<GenericPoint> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag))
            continue;
        std::vector<double> v;
        std::string tok;
        while (ls >> tok)
        {
            double x = 0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
                throw std::runtime_error("bad number on line " + std::to_string(lineno));
            v.push_back(x);
        }
        auto need = [&](std::size_t k) {
            if (v.size() != k)
                throw std::runtime_error("wrong field count on line " + std::to_string(lineno));
        };
        if (tag == "E2")
        {
            need(2);
            out.push_back(GenericPoint::explicit2d(v[0], v[1]));
        }
        else if (tag == "E3")
        {
            need(3);
            out.push_back(GenericPoint::explicit3d(v[0], v[1], v[2]));
        }
        else if (tag == "LLI")
        {
            need(8);
            out.push_back(GenericPoint::lli({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}));
        }
        else if (tag == "LPI")
        {
            need(15);
            auto P = [&](std::size_t i) { return Point3{v[i], v[i + 1], v[i + 2]}; };
            out.push_back(GenericPoint::lpi(P(0), P(3), P(6), P(9), P(12)));
        }
        else
            throw std::runtime_error("unknown point tag on line " + std::to_string(lineno));
    }
    return out;
}

} // namespace indirect::bench

#endif
