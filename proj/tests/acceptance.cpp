// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "indirect/counting_new.hpp"
#include "indirect/delaunay.hpp"
#include "indirect/exact_oracle.hpp"
#include "indirect/experiments.hpp"
#include "indirect/filter_table.hpp"
#include "indirect/predicates.hpp"
#include "property_support.hpp"
#include "test_support.hpp"

using namespace indirect;
namespace ps = property_support;

namespace
{

// ---------------------------------------------------------------------------
// Tolerances and sizes.

constexpr long random_cases = 1000000;   // per predicate and signature
constexpr long adversarial_cases = 10000; // per predicate and signature
constexpr double iee_anchor = 1.048458195263004e-13;
constexpr double eee_anchor = 8.88e-16;
constexpr double max_overhead_ratio = 4.0;
constexpr double monotone_band = 0.10;
constexpr double min_cache_speedup = 1.3;
constexpr double call_count_factor = 3.0;
constexpr long expected_orient2d_calls = 4395;
constexpr long expected_incircle_calls = 7502;
constexpr int timing_repeats = 3;
constexpr long expansion_cases = 100000;
constexpr long enclosure_cases = 1000000;
constexpr long symmetry_cases = 20000; // per predicate and signature

struct Outcome
{
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename... Args>
std::string fmt(const char* f, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------
// Point pools. Each entry carries its exact solution so the oracle only
// evaluates determinants per case.

struct PoolPoint
{
    GenericPoint p;
    std::optional<oracle::IntegerPoint> exact;
};

enum class PointKind
{
    E2,
    E3,
    LLI,
    LPI
};

enum class Source
{
    Uniform,
    Wide,
    Adversarial
};

constexpr std::size_t pool_size = 4096;

class Pools
{
public:
    explicit Pools(std::uint64_t seed) : rng_(seed)
    {
        for (PointKind k : {PointKind::E2, PointKind::E3, PointKind::LLI, PointKind::LPI})
            for (Source s : {Source::Uniform, Source::Wide, Source::Adversarial})
            {
                auto& pool = pools_[{k, s}];
                pool.reserve(pool_size);
                for (std::size_t i = 0; i < pool_size; ++i)
                {
                    GenericPoint p = make(k, s);
                    auto ex = oracle::solve_integer(p);
                    pool.push_back({std::move(p), std::move(ex)});
                }
            }
    }

    const PoolPoint& pick(PointKind k, Source s, std::mt19937_64& rng) const
    {
        const auto& pool = pools_.at({k, s});
        return pool[rng() % pool.size()];
    }

private:
    // Nodes of a coarse dyadic grid: collinear, cocircular and coplanar
    // subsets are everywhere.
    double node() { return 0.25 * static_cast<double>(rng_() % 5); }

    GenericPoint make(PointKind k, Source s)
    {
        if (s != Source::Adversarial)
        {
            testing_support::Sampler smp(rng_(), s == Source::Uniform ? testing_support::Coords::Uniform
                                                                      : testing_support::Coords::WideRange);
            switch (k)
            {
            case PointKind::E2: return smp.explicit2d();
            case PointKind::E3: return smp.explicit3d();
            case PointKind::LLI: return smp.lli();
            case PointKind::LPI: return smp.lpi();
            }
        }
        const unsigned roll = static_cast<unsigned>(rng_() % 10);
        switch (k)
        {
        case PointKind::E2: return GenericPoint::explicit2d(node(), node());
        case PointKind::E3: return GenericPoint::explicit3d(node(), node(), node());
        case PointKind::LLI:
        {
            if (roll == 0)
            {
                // parallel or degenerate
                const Point2 a{node(), node()}, d{node() - 0.5, node() - 0.5};
                const Point2 b{node(), node()};
                return GenericPoint::lli(a, {a.x + d.x, a.y + d.y}, b, {b.x + d.x, b.y + d.y});
            }
            if (roll == 1)
            {
                testing_support::Sampler smp(rng_(), testing_support::Coords::SmallInt);
                return smp.lli();
            }
            return bench::detail::grid_lli(node(), node(), rng_);
        }
        case PointKind::LPI:
        {
            if (roll == 0)
            {
                const Point3 r{node(), node(), node()}, sp{node(), node(), node()}, t{node(), node(), node()};
                const Point3 q{node(), node(), node()};
                // line parallel to the plane, or a degenerate plane
                if (rng_() % 2)
                    return GenericPoint::lpi(q, {q.x + sp.x - r.x, q.y + sp.y - r.y, q.z + sp.z - r.z}, r, sp, t);
                return GenericPoint::lpi(q, t, r, sp, {2 * sp.x - r.x, 2 * sp.y - r.y, 2 * sp.z - r.z});
            }
            if (roll == 1)
            {
                testing_support::Sampler smp(rng_(), testing_support::Coords::SmallInt);
                return smp.lpi();
            }
            return bench::detail::grid_lpi(node(), node(), node(), rng_);
        }
        }
        return GenericPoint::explicit2d(0, 0);
    }

    std::mt19937_64 rng_;
    std::map<std::pair<PointKind, Source>, std::vector<PoolPoint>> pools_;
};

// ---------------------------------------------------------------------------
// Predicate cases.

int arity(PredicateKind k)
{
    return k == PredicateKind::Orient2d ? 3 : (k == PredicateKind::CompareCoord ? 2 : 4);
}

const char* name_of_pred(PredicateKind k)
{
    switch (k)
    {
    case PredicateKind::Orient2d: return "orient2d";
    case PredicateKind::Incircle: return "incircle";
    case PredicateKind::Orient3d: return "orient3d";
    case PredicateKind::CompareCoord: return "compare_coord";
    }
    return "?";
}

struct Case
{
    PredicateKind pred;
    std::array<const PoolPoint*, 4> pts{};
    int n = 0;
    Projection proj = Projection::xy();
    int axis = 0;
};

Case make_case(const Pools& pools, PredicateKind pred, int implicit, Source src, std::mt19937_64& rng)
{
    Case c;
    c.pred = pred;
    c.n = arity(pred);
    const bool three_d = pred == PredicateKind::Orient3d || rng() % 2 == 1;
    std::array<bool, 4> tag{};
    for (int i = 0; i < implicit; ++i)
        tag[static_cast<std::size_t>(i)] = true;
    std::shuffle(tag.begin(), tag.begin() + c.n, rng);
    for (int i = 0; i < c.n; ++i)
    {
        const bool imp = tag[static_cast<std::size_t>(i)];
        const PointKind k = three_d ? (imp ? PointKind::LPI : PointKind::E3) : (imp ? PointKind::LLI : PointKind::E2);
        c.pts[static_cast<std::size_t>(i)] = &pools.pick(k, src, rng);
    }
    static const std::array<Projection, 3> projections{Projection::xy(), Projection::yz(), Projection::zx()};
    if (three_d)
        c.proj = projections[rng() % 3];
    c.axis = static_cast<int>(rng() % (three_d ? 3 : 2));
    if (pred == PredicateKind::CompareCoord)
        c.proj = compare_projection(three_d ? 3 : 2, c.axis);
    return c;
}

PredicateResult reference(const Case& c)
{
    for (int i = 0; i < c.n; ++i)
        if (!c.pts[static_cast<std::size_t>(i)]->exact)
            return PredicateResult::undefined(i);
    auto e = [&](int i) -> const oracle::IntegerPoint& { return *c.pts[static_cast<std::size_t>(i)]->exact; };
    switch (c.pred)
    {
    case PredicateKind::Orient2d: return oracle::orient2d(e(0), e(1), e(2), c.proj);
    case PredicateKind::Incircle: return oracle::incircle(e(0), e(1), e(2), e(3), c.proj);
    case PredicateKind::Orient3d: return oracle::orient3d(e(0), e(1), e(2), e(3));
    case PredicateKind::CompareCoord: return oracle::compare_coord(e(0), e(1), c.axis);
    }
    return {};
}

PredicateResult engine(PredicateKind pred, const std::array<const GenericPoint*, 4>& p, Projection proj, int axis)
{
    switch (pred)
    {
    case PredicateKind::Orient2d: return orient2d(*p[0], *p[1], *p[2], proj);
    case PredicateKind::Incircle: return incircle(*p[0], *p[1], *p[2], *p[3], proj);
    case PredicateKind::Orient3d: return orient3d(*p[0], *p[1], *p[2], *p[3]);
    case PredicateKind::CompareCoord: return compare_coord(*p[0], *p[1], axis);
    }
    return {};
}

std::array<const GenericPoint*, 4> points_of(const Case& c)
{
    std::array<const GenericPoint*, 4> p{};
    for (int i = 0; i < c.n; ++i)
        p[static_cast<std::size_t>(i)] = &c.pts[static_cast<std::size_t>(i)]->p;
    return p;
}

struct SignatureSpec
{
    PredicateKind pred;
    int implicit;
};

std::vector<SignatureSpec> all_signatures()
{
    std::vector<SignatureSpec> out;
    for (PredicateKind p :
         {PredicateKind::Orient2d, PredicateKind::Incircle, PredicateKind::Orient3d, PredicateKind::CompareCoord})
        for (int m = 0; m <= arity(p); ++m)
            out.push_back({p, m});
    return out;
}

std::string signature_name(const SignatureSpec& s)
{
    std::string t = name_of_pred(s.pred);
    t += ' ';
    for (int i = 0; i < arity(s.pred); ++i)
        t += i < s.implicit ? 'I' : 'E';
    return t;
}

// Staged results against the oracle, with per-stage certification checks
// collected in the same pass.
struct EquivalenceTotals
{
    long cases = 0;
    long mismatches = 0;
    long undefined = 0;
    long certified[2] = {0, 0};
    long stage_violations[2] = {0, 0};
    std::string first_problem;
    double seconds = 0.0;
};

const EquivalenceTotals& equivalence_run()
{
    static std::optional<EquivalenceTotals> cached;
    if (cached)
        return *cached;
    EquivalenceTotals t;
    const auto t0 = std::chrono::steady_clock::now();
    const Pools pools(2024);
    std::mt19937_64 rng(99);
    for (const SignatureSpec& sig : all_signatures())
    {
        long sig_mismatch = 0;
        for (long i = 0; i < random_cases + adversarial_cases; ++i)
        {
            const Source src = i >= random_cases ? Source::Adversarial : (i % 4 == 3 ? Source::Wide : Source::Uniform);
            const Case c = make_case(pools, sig.pred, sig.implicit, src, rng);
            const auto pts = points_of(c);
            const PredicateResult want = reference(c);
            const PredicateResult got = engine(c.pred, pts, c.proj, c.axis);
            ++t.cases;
            t.undefined += want.is_undefined();
            if (!(got == want))
            {
                ++t.mismatches;
                ++sig_mismatch;
                if (t.first_problem.empty())
                {
                    std::ostringstream os;
                    os << signature_name(sig) << " case " << i << ": engine " << got << ", oracle " << want;
                    t.first_problem = os.str();
                }
            }
            const std::span<const GenericPoint* const> span(pts.data(), static_cast<std::size_t>(c.n));
            for (int st = 0; st < 2; ++st)
            {
                const auto r = evaluate_stage(c.pred, span, static_cast<Stage>(st), c.proj);
                if (!r)
                    continue;
                ++t.certified[st];
                if (!(*r == want))
                {
                    ++t.stage_violations[st];
                    if (t.first_problem.empty())
                    {
                        std::ostringstream os;
                        os << signature_name(sig) << " case " << i << ": stage " << st << " certified " << *r
                           << ", oracle " << want;
                        t.first_problem = os.str();
                    }
                }
            }
        }
        std::printf("    %-18s %ld cases, %ld mismatches\n", signature_name(sig).c_str(),
                    random_cases + adversarial_cases, sig_mismatch);
        std::fflush(stdout);
    }
    t.seconds = seconds_since(t0);
    cached = t;
    return *cached;
}

Outcome oracle_equivalence()
{
    const auto& t = equivalence_run();
    Outcome o;
    o.pass = t.mismatches == 0 && t.cases == static_cast<long>(all_signatures().size()) * (random_cases + adversarial_cases);
    o.detail = fmt("%zu signatures x (%ld random + %ld adversarial), %ld cases (%ld undefined), %ld mismatches, %.0f s",
                   all_signatures().size(), random_cases, adversarial_cases, t.cases, t.undefined, t.mismatches,
                   t.seconds);
    if (!t.first_problem.empty())
        o.detail += "; first: " + t.first_problem;
    return o;
}

Outcome stage_soundness()
{
    const auto& t = equivalence_run();
    Outcome o;
    o.pass = t.stage_violations[0] == 0 && t.stage_violations[1] == 0 && t.certified[0] > 0 && t.certified[1] > 0;
    o.detail = fmt("fp certified %ld (%ld wrong), interval certified %ld (%ld wrong) over %ld cases", t.certified[0],
                   t.stage_violations[0], t.certified[1], t.stage_violations[1], t.cases);
    return o;
}

// ---------------------------------------------------------------------------

Outcome worked_examples()
{
    std::vector<std::string> bad;
    const GenericPoint lli = GenericPoint::lli({0, 0}, {1, 1}, {0, 1}, {1, 0});
    const auto l = lli.lambda_fp();
    if (!(l.x == -1 && l.y == -1 && l.d == -2 && l.x / l.d == 0.5 && l.y / l.d == 0.5))
        bad.push_back("LLI lambdas");
    const auto ls = oracle::solve(lli);
    if (!ls || ls->c[0] != oracle::Rational(1, 2) || ls->c[1] != oracle::Rational(1, 2))
        bad.push_back("LLI oracle");

    const GenericPoint lpi = GenericPoint::lpi({0, 0, -1}, {0, 0, 1}, {0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const auto q = lpi.lambda_fp();
    if (!(q.d == -2 && q.x == 0 && q.y == 0 && q.z == 0))
        bad.push_back("LPI lambdas");
    const auto qs = oracle::solve(lpi);
    if (!qs || qs->c[0] != 0 || qs->c[1] != 0 || qs->c[2] != 0)
        bad.push_back("LPI oracle");

    const GenericPoint p2 = GenericPoint::explicit2d(0, 0), p3 = GenericPoint::explicit2d(1, 0);
    Homogeneous<double> h1{l.x, l.y, 0, l.d}, h2{0, 0, 0, 1}, h3{1, 0, 0, 1};
    const double lambda = poly::orient2d(1, h1, h2, h3);
    if (lambda != 2.0 || l.d * l.d != 4.0)
        bad.push_back("IEE polynomial");
    for (Stage st : {Stage::FP, Stage::Interval, Stage::Exact})
    {
        const std::array<const GenericPoint*, 3> pts{&lli, &p2, &p3};
        const auto r = evaluate_stage(PredicateKind::Orient2d, pts, st);
        if (r && *r != PredicateResult(Sign::Positive))
            bad.push_back("IEE stage");
    }
    if (orient2d(lli, p2, p3) != PredicateResult(Sign::Positive)
        || oracle::orient2d(lli, p2, p3) != PredicateResult(Sign::Positive))
        bad.push_back("IEE sign");

    Outcome o;
    o.pass = bad.empty();
    o.detail = bad.empty() ? "LLI -> (0.5, 0.5), LPI -> (0, 0, 0), IEE value 2 over 4 -> Positive"
                           : "failed: " + bad.front();
    return o;
}

Outcome filter_anchors()
{
    const double iee = filter_spec(Instance::orient2d_IEE_lli).delta;
    const double eee = filter_spec(Instance::orient2d_EEE).delta;
    const auto iee_d = filter_kit::derive_filter(filter_kit::parse_formula(formulas::program(Instance::orient2d_IEE_lli)), "value");
    const auto eee_d = filter_kit::derive_filter(filter_kit::parse_formula(formulas::program(Instance::orient2d_EEE)), "value");
    Outcome o;
    o.pass = iee >= 0.25 * iee_anchor && iee <= 4 * iee_anchor && eee >= 0.5 * eee_anchor && eee <= 2 * eee_anchor
             && iee_d.delta == iee && eee_d.delta == eee;
    o.detail = fmt("orient2d IEE over LLI %.6g (%.3gx reference), orient2d EEE %.6g (%.3gx reference)", iee,
                   iee / iee_anchor, eee, eee / eee_anchor);
    return o;
}

// ---------------------------------------------------------------------------

bench::ExperimentConfig config(bench::Experiment e, std::size_t n, int pct, CacheLevel cache)
{
    bench::ExperimentConfig c;
    c.experiment = e;
    c.n_points = n;
    c.implicit_pct = pct;
    c.cache = cache;
    c.seed = 7;
    return c;
}

constexpr std::array<CacheLevel, 4> cache_levels{CacheLevel::None, CacheLevel::FP, CacheLevel::Interval,
                                                 CacheLevel::Exact};
constexpr std::array<int, 5> pct_levels{0, 10, 25, 50, 100};

Outcome delaunay_sweep()
{
    const auto t0 = std::chrono::steady_clock::now();
    long runs = 0, failed = 0, differing = 0;
    std::string first;
    for (std::size_t ei = 0; ei < bench::experiment_names.size(); ++ei)
    {
        const auto e = static_cast<bench::Experiment>(ei);
        for (std::size_t n : {1000u, 10000u, 100000u})
        {
            double slowest = 0.0;
            for (int pct : pct_levels)
            {
                bench::ExperimentConfig base = config(e, n, pct, CacheLevel::None);
                // 1.1 and 2.1 have no implicit points; every pct is the same input
                if (!base.has_implicit_points() && pct != 0)
                    continue;
                const auto pts = bench::generate(base);
                std::optional<std::vector<std::array<int, 3>>> reference_tris;
                for (CacheLevel cache : cache_levels)
                {
                    auto cfg = base;
                    cfg.cache = cache;
                    const auto rep = bench::run(pts, cfg, {.keep_triangles = true});
                    ++runs;
                    slowest = std::max(slowest, rep.elapsed_s);
                    if (!rep.error.empty() || !rep.verified.value_or(false))
                    {
                        ++failed;
                        if (first.empty())
                            first = fmt("%s n=%zu pct=%d cache=%s: %s", std::string(bench::name_of(e)).c_str(), n,
                                        pct, std::string(bench::name_of(cache)).c_str(),
                                        rep.error.empty() ? "verification failed" : rep.error.c_str());
                    }
                    if (!reference_tris)
                        reference_tris = rep.triangle_list;
                    else if (*reference_tris != rep.triangle_list)
                        ++differing;
                }
            }
            std::printf("    %s n=%-6zu done (slowest triangulation %.2f s)\n", std::string(bench::name_of(e)).c_str(),
                        n, slowest);
            std::fflush(stdout);
        }
    }
    Outcome o;
    o.pass = failed == 0 && differing == 0;
    o.detail = fmt("%ld runs (6 experiments x 3 sizes x pct x 4 caches), %ld failed verification, "
                   "%ld differ across caches, %.0f s",
                   runs, failed, differing, seconds_since(t0));
    if (!first.empty())
        o.detail += "; first: " + first;
    return o;
}

double median_elapsed(const std::vector<GenericPoint>& pts, const bench::ExperimentConfig& cfg,
                      std::vector<std::array<int, 3>>* tris = nullptr)
{
    std::vector<double> t;
    for (int r = 0; r < timing_repeats; ++r)
    {
        auto c = cfg;
        c.verify = false;
        const auto rep = bench::run(pts, c, {.keep_triangles = tris != nullptr && r == 0});
        if (tris && r == 0)
            *tris = rep.triangle_list;
        t.push_back(rep.elapsed_s);
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

Outcome overhead_trend()
{
    bool pass = true;
    std::string detail;
    for (bench::Experiment e : {bench::Experiment::RandomLLI, bench::Experiment::RandomLPI})
    {
        std::vector<double> ratio;
        double base = 0.0;
        (void)median_elapsed(bench::generate(config(e, 100000, 0, CacheLevel::Interval)),
                             config(e, 100000, 0, CacheLevel::Interval)); // warm-up
        for (int pct : pct_levels)
        {
            const auto cfg = config(e, 100000, pct, CacheLevel::Interval);
            const double t = median_elapsed(bench::generate(cfg), cfg);
            if (pct == 0)
                base = t;
            ratio.push_back(t / base);
        }
        bool monotone = true;
        for (std::size_t i = 1; i < ratio.size(); ++i)
            monotone = monotone && ratio[i] >= ratio[i - 1] * (1.0 - monotone_band);
        const bool ok = ratio.back() <= max_overhead_ratio && monotone;
        pass = pass && ok;
        detail += fmt("%s base %.2f s ratios", std::string(bench::name_of(e)).c_str(), base);
        for (double r : ratio)
            detail += fmt(" %.2f", r);
        detail += monotone ? "; " : " (not monotone); ";
    }
    return {pass, detail.substr(0, detail.size() - 2)};
}

Outcome cache_ablation()
{
    const auto none_cfg = config(bench::Experiment::RandomLLI, 100000, 100, CacheLevel::None);
    const auto iv_cfg = config(bench::Experiment::RandomLLI, 100000, 100, CacheLevel::Interval);
    const auto pts = bench::generate(none_cfg);
    std::vector<std::array<int, 3>> tri_none, tri_iv;
    (void)median_elapsed(pts, iv_cfg); // warm-up
    const double t_none = median_elapsed(pts, none_cfg, &tri_none);
    const double t_iv = median_elapsed(pts, iv_cfg, &tri_iv);
    const double speedup = t_none / t_iv;

    // Every cache level on every experiment gives the same triangulation.
    long differing = 0, compared = 0;
    for (std::size_t ei = 0; ei < bench::experiment_names.size(); ++ei)
        for (int pct : {0, 50, 100})
        {
            const auto base = config(static_cast<bench::Experiment>(ei), 10000, pct, CacheLevel::None);
            const auto p = bench::generate(base);
            std::optional<std::vector<std::array<int, 3>>> ref;
            for (CacheLevel c : cache_levels)
            {
                auto cfg = base;
                cfg.cache = c;
                cfg.verify = false;
                const auto rep = bench::run(p, cfg, {.keep_triangles = true});
                if (!ref)
                    ref = rep.triangle_list;
                else
                {
                    ++compared;
                    differing += *ref != rep.triangle_list;
                }
            }
        }
    differing += tri_none != tri_iv;
    Outcome o;
    o.pass = speedup >= min_cache_speedup && differing == 0;
    o.detail = fmt("1.2 n=100000 100%% implicit: none %.2f s, interval %.2f s, speedup %.2fx; "
                   "%ld cross-cache comparisons, %ld differ",
                   t_none, t_iv, speedup, compared + 1, differing);
    return o;
}

Outcome call_counts()
{
    const auto rep = bench::run(config(bench::Experiment::Random2D, 1000, 0, CacheLevel::Interval));
    const auto o2 = static_cast<long>(rep.stats[PredicateKind::Orient2d].calls);
    const auto ic = static_cast<long>(rep.stats[PredicateKind::Incircle].calls);
    auto within = [](long got, long want) {
        return got >= want / call_count_factor && got <= want * call_count_factor;
    };
    Outcome o;
    o.pass = within(o2, expected_orient2d_calls) && within(ic, expected_incircle_calls) && rep.verified.value_or(false);
    o.detail = fmt("1.1 n=1000: orient2d %ld (%.2fx of %ld), incircle %ld (%.2fx of %ld)", o2,
                   static_cast<double>(o2) / expected_orient2d_calls, expected_orient2d_calls, ic,
                   static_cast<double>(ic) / expected_incircle_calls, expected_incircle_calls);
    return o;
}

// ---------------------------------------------------------------------------

long expansion_violations()
{
    ps::RandomExpansions g(31);
    long bad = 0;
    auto check = [&](const Expansion& r, const ps::Rational& want) {
        bad += ps::value_of(r) != want || r.sign() != ps::sign_of(want) || !is_nonoverlapping(r.components());
    };
    for (long i = 0; i < expansion_cases; ++i)
    {
        const Expansion e = g.next(), f = g.next();
        const double b = g.scalar();
        const ps::Rational re = ps::value_of(e), rf = ps::value_of(f);
        check(expansion_sum(e, f), re + rf);
        check(expansion_diff(e, f), re - rf);
        check(expansion_scale(e, b), re * ps::Rational(b));
        check(expansion_product(e, f), re * rf);
    }
    return bad;
}

long enclosure_violations()
{
    ps::TreeGen gen(32);
    long bad = 0;
    for (long i = 0; i < enclosure_cases; ++i)
    {
        const auto nodes = gen.tree();
        const auto exact = ps::eval<ps::Rational>(nodes, 0, [](const ps::Node& n) { return ps::Rational(n.point); });
        const auto iv = ps::eval<Interval>(nodes, 0, [](const ps::Node& n) { return Interval(n.lo, n.hi); });
        UpInterval up;
        {
            rounding::UpwardScope scope;
            up = ps::eval<UpInterval>(nodes, 0,
                                      [](const ps::Node& n) { return UpInterval::from(Interval(n.lo, n.hi)); });
        }
        bad += !ps::encloses(iv.lo, iv.hi, exact) || !ps::encloses(up.lo(), up.hi, exact)
               || !ps::sign_consistent(iv.sign(), exact) || !ps::sign_consistent(up.sign(), exact);
    }
    return bad;
}

GenericPoint scaled(const GenericPoint& p, double f)
{
    auto s2 = [f](Point2 q) { return Point2{q.x * f, q.y * f}; };
    auto s3 = [f](Point3 q) { return Point3{q.x * f, q.y * f, q.z * f}; };
    switch (p.type())
    {
    case GenericPoint::Type::Explicit2D: return GenericPoint(s2(p.as_point2()));
    case GenericPoint::Type::Explicit3D: return GenericPoint(s3(p.as_point3()));
    case GenericPoint::Type::LLI:
    {
        const auto& d = p.as_lli();
        return GenericPoint::lli(s2(d.a1), s2(d.a2), s2(d.b1), s2(d.b2));
    }
    case GenericPoint::Type::LPI:
    {
        const auto& d = p.as_lpi();
        return GenericPoint::lpi(s3(d.q1), s3(d.q2), s3(d.r), s3(d.s), s3(d.t));
    }
    }
    return p;
}

struct SymmetryTotals
{
    long cases = 0;
    long antisymmetry = 0;
    long scaling = 0;
    long stage_skip = 0;
};

SymmetryTotals symmetry_checks()
{
    SymmetryTotals t;
    const Pools pools(4048);
    std::mt19937_64 rng(33);
    for (const SignatureSpec& sig : all_signatures())
        for (long i = 0; i < symmetry_cases; ++i)
        {
            const Source src = i % 2 ? Source::Adversarial : (i % 4 == 0 ? Source::Uniform : Source::Wide);
            const Case c = make_case(pools, sig.pred, sig.implicit, src, rng);
            auto pts = points_of(c);
            const PredicateResult base = engine(c.pred, pts, c.proj, c.axis);
            ++t.cases;

            // swapping two arguments flips the sign
            const int a = static_cast<int>(rng() % static_cast<unsigned>(c.n));
            const int b = (a + 1 + static_cast<int>(rng() % static_cast<unsigned>(c.n - 1))) % c.n;
            auto swapped = pts;
            std::swap(swapped[static_cast<std::size_t>(a)], swapped[static_cast<std::size_t>(b)]);
            const PredicateResult sw = engine(c.pred, swapped, c.proj, c.axis);
            if (base.is_undefined() ? !sw.is_undefined() : !(sw == -base))
                ++t.antisymmetry;

            // scaling every coordinate by a power of two keeps the sign
            const double f = std::ldexp(1.0, static_cast<int>(rng() % 81) - 40);
            std::array<GenericPoint, 4> sc{GenericPoint::explicit2d(0, 0), GenericPoint::explicit2d(0, 0),
                                           GenericPoint::explicit2d(0, 0), GenericPoint::explicit2d(0, 0)};
            std::array<const GenericPoint*, 4> scp{};
            for (int k = 0; k < c.n; ++k)
            {
                sc[static_cast<std::size_t>(k)] = scaled(*pts[static_cast<std::size_t>(k)], f);
                scp[static_cast<std::size_t>(k)] = &sc[static_cast<std::size_t>(k)];
            }
            if (!(engine(c.pred, scp, c.proj, c.axis) == base))
                ++t.scaling;

            // starting at a later stage never changes the answer
            for (Stage st : {Stage::Interval, Stage::Exact})
            {
                ScopedFirstStage skip(st);
                if (!(engine(c.pred, pts, c.proj, c.axis) == base))
                    ++t.stage_skip;
            }
        }
    return t;
}

Outcome property_suites()
{
    const auto t0 = std::chrono::steady_clock::now();
    const long ex = expansion_violations();
    const long en = enclosure_violations();
    const SymmetryTotals s = symmetry_checks();
    Outcome o;
    o.pass = ex == 0 && en == 0 && s.antisymmetry == 0 && s.scaling == 0 && s.stage_skip == 0;
    o.detail = fmt("expansion exactness %ld/%ld wrong, interval enclosure %ld/%ld wrong, over %ld predicate cases: "
                   "antisymmetry %ld, power-of-two scaling %ld, stage skip %ld wrong, %.0f s",
                   ex, expansion_cases, en, enclosure_cases, s.cases, s.antisymmetry, s.scaling, s.stage_skip,
                   seconds_since(t0));
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance run"};
    std::vector<std::string> only;
    app.add_option("--only", only, "run only the named criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle_equivalence", oracle_equivalence},
        {"stage_soundness", stage_soundness},
        {"worked_examples", worked_examples},
        {"filter_anchors", filter_anchors},
        {"delaunay_sweep", delaunay_sweep},
        {"overhead_trend", overhead_trend},
        {"cache_ablation", cache_ablation},
        {"call_counts", call_counts},
        {"property_suites", property_suites},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria)
    {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end())
            continue;
        Outcome o;
        try
        {
            o = fn();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %-19s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
