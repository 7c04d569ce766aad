#include <cmath>
#include <thread>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <gtest/gtest.h>

#include "indirect/exact_oracle.hpp"
#include "indirect/generic_point.hpp"
#include "indirect/stats.hpp"
#include "test_support.hpp"

using namespace indirect;
using testing_support::Coords;
using testing_support::Sampler;
using Rational = boost::multiprecision::mpq_rational;

namespace
{

Rational value_of(const Expansion& e)
{
    Rational r = 0;
    for (double c : e.components())
        r += Rational(c);
    return r;
}

bool encloses(const Interval& iv, const Rational& v)
{
    return Rational(iv.lo) <= v && v <= Rational(iv.hi);
}

} // namespace

TEST(Lambda, LliExample)
{
    const LLIDef d{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const auto h = lli_lambda<double>(d);
    EXPECT_EQ(h.x, -1.0);
    EXPECT_EQ(h.y, -1.0);
    EXPECT_EQ(h.d, -2.0);
    EXPECT_EQ(h.x / h.d, 0.5);
    EXPECT_EQ(h.y / h.d, 0.5);
    const auto s = oracle::solve(GenericPoint(d));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->c[0], Rational(1, 2));
    EXPECT_EQ(s->c[1], Rational(1, 2));

    EXPECT_EQ(lli_lambda<double>({{0, 0}, {1, 0}, {0, 1}, {1, 1}}).d, 0.0);
    EXPECT_EQ(lli_lambda<double>({{2, 3}, {2, 3}, {0, 1}, {1, 1}}).d, 0.0);
}

TEST(Lambda, LpiExample)
{
    const LPIDef d{{0, 0, -1}, {0, 0, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    const auto h = lpi_lambda<double>(d);
    EXPECT_EQ(h.d, -2.0);
    EXPECT_EQ(h.x, 0.0);
    EXPECT_EQ(h.y, 0.0);
    EXPECT_EQ(h.z, 0.0);
    const auto s = oracle::solve(GenericPoint(d));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->c[0], 0);
    EXPECT_EQ(s->c[1], 0);
    EXPECT_EQ(s->c[2], 0);

    EXPECT_EQ(lpi_lambda<double>({{0, 0, 1}, {1, 0, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0}}).d, 0.0);
    EXPECT_EQ(lpi_lambda<double>({{0, 0, -1}, {0, 0, 1}, {0, 0, 0}, {1, 1, 0}, {2, 2, 0}}).d, 0.0);
}

TEST(Lambda, ExplicitPoints)
{
    const auto v = GenericPoint::explicit2d(3, 4).lambda_fp();
    EXPECT_EQ(v.x, 3.0);
    EXPECT_EQ(v.y, 4.0);
    EXPECT_EQ(v.d, 1.0);
    EXPECT_EQ(v.beta, 4.0);
    const auto w = GenericPoint::explicit3d(-5, 1, 2).lambda_fp();
    EXPECT_EQ(w.z, 2.0);
    EXPECT_EQ(w.beta, 5.0);
}

TEST(Lambda, LliFpAndBeta)
{
    const GenericPoint p = GenericPoint::lli({0, 0}, {1, 1}, {0, 1}, {1, 0});
    const auto v = p.lambda_fp();
    EXPECT_EQ(v.x, -1.0);
    EXPECT_EQ(v.y, -1.0);
    EXPECT_EQ(v.d, -2.0);
    EXPECT_EQ(v.beta, 1.0);
    // b-factors include the differences, which can exceed every coordinate
    const GenericPoint q = GenericPoint::lli({-3, 0}, {3, 1}, {0, 1}, {1, 0});
    EXPECT_EQ(q.lambda_fp().beta, 6.0);
}

TEST(Lambda, ModelsAgainstRationalPolynomials)
{
    for (Coords mode : {Coords::Uniform, Coords::WideRange, Coords::SmallInt})
    {
        Sampler s(11, mode);
        for (int i = 0; i < 100000 / 3; ++i)
        {
            const LLIDef l{s.p2(), s.p2(), s.p2(), s.p2()};
            const LPIDef q{s.p3(), s.p3(), s.p3(), s.p3(), s.p3()};
            const auto rl = lli_lambda<Rational>(l);
            const auto rq = lpi_lambda<Rational>(q);
            const GenericPoint pl(l), pq(q);

            const auto el = pl.lambda_exact();
            ASSERT_EQ(value_of(el.x), rl.x);
            ASSERT_EQ(value_of(el.y), rl.y);
            ASSERT_EQ(value_of(el.d), rl.d);
            const auto eq = pq.lambda_exact();
            ASSERT_EQ(value_of(eq.x), rq.x);
            ASSERT_EQ(value_of(eq.y), rq.y);
            ASSERT_EQ(value_of(eq.z), rq.z);
            ASSERT_EQ(value_of(eq.d), rq.d);

            const auto il = pl.lambda_interval();
            ASSERT_TRUE(encloses(il.x, rl.x) && encloses(il.y, rl.y) && encloses(il.d, rl.d));
            const auto iq = pq.lambda_interval();
            ASSERT_TRUE(encloses(iq.x, rq.x) && encloses(iq.y, rq.y) && encloses(iq.z, rq.z)
                        && encloses(iq.d, rq.d));
        }
    }
}

TEST(Lambda, FpIsNaiveEvaluation)
{
    Sampler s(12);
    for (int i = 0; i < 10000; ++i)
    {
        const Point2 a1 = s.p2(), a2 = s.p2(), b1 = s.p2(), b2 = s.p2();
        const double ca = a1.x * a2.y - a2.x * a1.y;
        const double cb = b1.x * b2.y - b2.x * b1.y;
        const double lx = ca * (b1.x - b2.x) - cb * (a1.x - a2.x);
        const double ly = ca * (b1.y - b2.y) - cb * (a1.y - a2.y);
        const double d = (a1.x - a2.x) * (b1.y - b2.y) - (a1.y - a2.y) * (b1.x - b2.x);
        const auto v = GenericPoint::lli(a1, a2, b1, b2).lambda_fp();
        ASSERT_EQ(v.x, lx);
        ASSERT_EQ(v.y, ly);
        ASSERT_EQ(v.d, d);

        const Point3 q1 = s.p3(), q2 = s.p3(), r = s.p3(), ss = s.p3(), t = s.p3();
        auto det = [](double ax, double ay, double az, double bx, double by, double bz, double cx, double cy,
                      double cz) {
            return ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx);
        };
        const double dd = det(q1.x - q2.x, q1.y - q2.y, q1.z - q2.z, ss.x - r.x, ss.y - r.y, ss.z - r.z,
                              t.x - r.x, t.y - r.y, t.z - r.z);
        const double n = det(q1.x - r.x, q1.y - r.y, q1.z - r.z, ss.x - r.x, ss.y - r.y, ss.z - r.z,
                             t.x - r.x, t.y - r.y, t.z - r.z);
        const auto w = GenericPoint::lpi(q1, q2, r, ss, t).lambda_fp();
        ASSERT_EQ(w.d, dd);
        ASSERT_EQ(w.x, dd * q1.x + n * q2.x - n * q1.x);
        ASSERT_EQ(w.y, dd * q1.y + n * q2.y - n * q1.y);
        ASSERT_EQ(w.z, dd * q1.z + n * q2.z - n * q1.z);
    }
}

TEST(Lambda, AgreesWithDirectIntersection)
{
    // Well-conditioned: lines crossing at a large angle near the origin.
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i)
    {
        const double px = u(rng), py = u(rng);
        const double ang = u(rng) * 3.14159;
        const double da[2] = {std::cos(ang), std::sin(ang)};
        const double db[2] = {-std::sin(ang) + 0.3 * u(rng), std::cos(ang) + 0.3 * u(rng)};
        const Point2 a1{px - da[0], py - da[1]}, a2{px + da[0], py + da[1]};
        const Point2 b1{px - db[0], py - db[1]}, b2{px + db[0], py + db[1]};
        const auto v = GenericPoint::lli(a1, a2, b1, b2).lambda_fp();
        // direct solve a1 + t (a2 - a1)
        const double ex = a2.x - a1.x, ey = a2.y - a1.y, fx = b2.x - b1.x, fy = b2.y - b1.y;
        const double t = ((b1.x - a1.x) * fy - (b1.y - a1.y) * fx) / (ex * fy - ey * fx);
        const double x = a1.x + t * ex, y = a1.y + t * ey;
        const double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
        ASSERT_NEAR(v.x / v.d, x, 1e-9 * scale);
        ASSERT_NEAR(v.y / v.d, y, 1e-9 * scale);
    }
}

TEST(Cache, HitSkipsRecomputation)
{
    ScopedCacheLevel level(CacheLevel::Interval);
    const GenericPoint p = GenericPoint::lli({0, 0}, {1, 1}, {0, 1}, {1, 0});
    reset_stage_stats();
    EXPECT_FALSE(p.has_fp_cache());
    const auto a = p.lambda_fp();
    EXPECT_TRUE(p.has_fp_cache());
    const auto b = p.lambda_fp();
    EXPECT_EQ(stage_stats().lambda_fp_evaluations, 1u);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.d, b.d);
    EXPECT_EQ(a.beta, b.beta);

    (void)p.lambda_interval();
    (void)p.lambda_interval();
    EXPECT_EQ(stage_stats().lambda_interval_evaluations, 1u);
    EXPECT_TRUE(p.has_interval_cache());

    (void)p.lambda_exact();
    (void)p.lambda_exact();
    EXPECT_EQ(stage_stats().lambda_exact_evaluations, 2u);
    EXPECT_FALSE(p.has_exact_cache());
}

TEST(Cache, LevelsControlStorage)
{
    struct Want
    {
        CacheLevel level;
        bool fp, iv, ex;
    };
    for (const Want w : {Want{CacheLevel::None, false, false, false}, Want{CacheLevel::FP, true, false, false},
                         Want{CacheLevel::Interval, true, true, false}, Want{CacheLevel::Exact, true, true, true}})
    {
        ScopedCacheLevel level(w.level);
        const GenericPoint p = GenericPoint::lpi({0, 0, -1}, {0, 0, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0});
        (void)p.lambda_fp();
        (void)p.lambda_interval();
        (void)p.lambda_exact();
        EXPECT_EQ(p.has_fp_cache(), w.fp);
        EXPECT_EQ(p.has_interval_cache(), w.iv);
        EXPECT_EQ(p.has_exact_cache(), w.ex);
    }
    // explicit points never allocate caches
    ScopedCacheLevel level(CacheLevel::Exact);
    const GenericPoint e = GenericPoint::explicit2d(1, 2);
    (void)e.lambda_fp();
    (void)e.lambda_interval();
    EXPECT_FALSE(e.has_fp_cache());
    EXPECT_FALSE(e.has_interval_cache());
}

TEST(Cache, CopiesDoNotShareCaches)
{
    ScopedCacheLevel level(CacheLevel::Interval);
    GenericPoint p = GenericPoint::lli({0, 0}, {1, 1}, {0, 1}, {1, 0});
    (void)p.lambda_fp();
    const GenericPoint q = p;
    EXPECT_TRUE(p.has_fp_cache());
    EXPECT_FALSE(q.has_fp_cache());
    EXPECT_EQ(q.lambda_fp().d, p.lambda_fp().d);

    GenericPoint r = GenericPoint::explicit2d(0, 0);
    r = p;
    EXPECT_EQ(r.type(), GenericPoint::Type::LLI);
    EXPECT_FALSE(r.has_fp_cache());
    p = GenericPoint::lli({0, 0}, {2, 0}, {1, -1}, {1, 1});
    EXPECT_FALSE(p.has_fp_cache());
    const auto v = p.lambda_fp();
    EXPECT_EQ(v.x / v.d, 1.0);
    EXPECT_EQ(v.y / v.d, 0.0);

    std::vector<GenericPoint> pts;
    for (int i = 0; i < 100; ++i)
    {
        pts.push_back(GenericPoint::lli({0, 0}, {1, 1}, {0, 1}, {1, 0}));
        (void)pts.back().lambda_interval();
    }
    for (const auto& x : pts)
        EXPECT_EQ(x.lambda_fp().d, -2.0);
}

TEST(Cache, ConcurrentFirstUseIsBenign)
{
    ScopedCacheLevel level(CacheLevel::Exact);
    Sampler s(14);
    std::vector<GenericPoint> pts;
    for (int i = 0; i < 2000; ++i)
        pts.push_back(s.lpi());
    std::vector<std::vector<double>> seen(4);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (const auto& p : pts)
            {
                const auto f = p.lambda_fp();
                const auto iv = p.lambda_interval();
                const auto ex = p.lambda_exact();
                seen[static_cast<std::size_t>(t)].push_back(f.x);
                seen[static_cast<std::size_t>(t)].push_back(iv.d.lo);
                seen[static_cast<std::size_t>(t)].push_back(ex.d.estimate());
            }
        });
    for (auto& th : threads)
        th.join();
    for (int t = 1; t < 4; ++t)
        EXPECT_EQ(seen[static_cast<std::size_t>(t)], seen[0]);
}
