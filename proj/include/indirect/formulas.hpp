#ifndef INDIRECT_FORMULAS_HPP
#define INDIRECT_FORMULAS_HPP

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace indirect
{

enum class PredicateKind
{
    Orient2d,
    Incircle,
    Orient3d,
    CompareCoord,
};

/// How implicit arguments of an instance are constructed. Explicit-only
/// instances use None.
enum class ImplicitKind
{
    None,
    LLI,
    LPI,
};

/// Canonical predicate instances (implicit arguments first), plus the two
/// denominator filters. Each has its own derived filter constant.
enum class Instance : int
{
    lli_d,
    lpi_d,
    orient2d_EEE,
    orient2d_IEE_lli,
    orient2d_IIE_lli,
    orient2d_III_lli,
    orient2d_IEE_lpi,
    orient2d_IIE_lpi,
    orient2d_III_lpi,
    incircle_EEEE,
    incircle_IEEE_lli,
    incircle_IIEE_lli,
    incircle_IIIE_lli,
    incircle_IIII_lli,
    incircle_IEEE_lpi,
    incircle_IIEE_lpi,
    incircle_IIIE_lpi,
    incircle_IIII_lpi,
    orient3d_EEEE,
    orient3d_IEEE,
    orient3d_IIEE,
    orient3d_IIIE,
    orient3d_IIII,
    compare_IE_lli,
    compare_II_lli,
    compare_IE_lpi,
    compare_II_lpi,
};

inline constexpr std::size_t instance_count = 27;

inline constexpr std::array<std::string_view, instance_count> instance_names = {
    "lli_d",
    "lpi_d",
    "orient2d_EEE",
    "orient2d_IEE_lli",
    "orient2d_IIE_lli",
    "orient2d_III_lli",
    "orient2d_IEE_lpi",
    "orient2d_IIE_lpi",
    "orient2d_III_lpi",
    "incircle_EEEE",
    "incircle_IEEE_lli",
    "incircle_IIEE_lli",
    "incircle_IIIE_lli",
    "incircle_IIII_lli",
    "incircle_IEEE_lpi",
    "incircle_IIEE_lpi",
    "incircle_IIIE_lpi",
    "incircle_IIII_lpi",
    "orient3d_EEEE",
    "orient3d_IEEE",
    "orient3d_IIEE",
    "orient3d_IIIE",
    "orient3d_IIII",
    "compare_IE_lli",
    "compare_II_lli",
    "compare_IE_lpi",
    "compare_II_lpi",
};

inline constexpr std::string_view name_of(Instance i)
{
    return instance_names[static_cast<std::size_t>(i)];
}

/// Instance for a predicate with `implicit` leading implicit arguments.
inline constexpr Instance instance_for(PredicateKind p, int implicit, ImplicitKind kind)
{
    const bool lpi = kind == ImplicitKind::LPI;
    switch (p)
    {
    case PredicateKind::Orient2d:
        if (implicit == 0)
            return Instance::orient2d_EEE;
        return static_cast<Instance>(static_cast<int>(lpi ? Instance::orient2d_IEE_lpi
                                                          : Instance::orient2d_IEE_lli)
                                     + implicit - 1);
    case PredicateKind::Incircle:
        if (implicit == 0)
            return Instance::incircle_EEEE;
        return static_cast<Instance>(static_cast<int>(lpi ? Instance::incircle_IEEE_lpi
                                                          : Instance::incircle_IEEE_lli)
                                     + implicit - 1);
    case PredicateKind::Orient3d:
        return static_cast<Instance>(static_cast<int>(Instance::orient3d_EEEE) + implicit);
    case PredicateKind::CompareCoord:
        return static_cast<Instance>(static_cast<int>(lpi ? Instance::compare_IE_lpi
                                                          : Instance::compare_IE_lli)
                                     + implicit - 1);
    }
    return Instance::lli_d;
}

namespace formulas
{

// The C++ evaluation templates in lambda.hpp and predicates.hpp perform
// exactly the operations spelled out here, in the same association order.

/// Intersection of lines (a1, a2) and (b1, b2). Defines l<k>x, l<k>y, d<k>.
inline std::string lli_block(int k)
{
    const std::string p = "w" + std::to_string(k) + "_";
    const std::string K = std::to_string(k);
    auto v = [&](const char* s) { return p + s; };
    std::string t;
    t += v("ca") + " = " + v("a1x") + "*" + v("a2y") + " - " + v("a2x") + "*" + v("a1y") + "\n";
    t += v("cb") + " = " + v("b1x") + "*" + v("b2y") + " - " + v("b2x") + "*" + v("b1y") + "\n";
    t += "l" + K + "x = " + v("ca") + "*(" + v("b1x") + " - " + v("b2x") + ") - " + v("cb") + "*("
         + v("a1x") + " - " + v("a2x") + ")\n";
    t += "l" + K + "y = " + v("ca") + "*(" + v("b1y") + " - " + v("b2y") + ") - " + v("cb") + "*("
         + v("a1y") + " - " + v("a2y") + ")\n";
    t += "d" + K + " = (" + v("a1x") + " - " + v("a2x") + ")*(" + v("b1y") + " - " + v("b2y")
         + ") - (" + v("a1y") + " - " + v("a2y") + ")*(" + v("b1x") + " - " + v("b2x") + ")\n";
    return t;
}

/// Intersection of line (q1, q2) with plane (r, s, t). Defines l<k>x,
/// l<k>y, optionally l<k>z, and d<k>.
inline std::string lpi_block(int k, bool with_z)
{
    const std::string p = "w" + std::to_string(k) + "_";
    const std::string K = std::to_string(k);
    auto v = [&](const std::string& s) { return p + s; };
    std::string t;
    for (const char* c : {"x", "y", "z"})
    {
        const std::string C = c;
        t += v("a" + C) + " = " + v("q1" + C) + " - " + v("q2" + C) + "\n";
        t += v("b" + C) + " = " + v("s" + C) + " - " + v("r" + C) + "\n";
        t += v("c" + C) + " = " + v("t" + C) + " - " + v("r" + C) + "\n";
        t += v("e" + C) + " = " + v("q1" + C) + " - " + v("r" + C) + "\n";
    }
    const std::string c1 = "(" + v("by") + "*" + v("cz") + " - " + v("bz") + "*" + v("cy") + ")";
    const std::string c2 = "(" + v("bx") + "*" + v("cz") + " - " + v("bz") + "*" + v("cx") + ")";
    const std::string c3 = "(" + v("bx") + "*" + v("cy") + " - " + v("by") + "*" + v("cx") + ")";
    t += "d" + K + " = " + v("ax") + "*" + c1 + " - " + v("ay") + "*" + c2 + " + " + v("az") + "*"
         + c3 + "\n";
    t += v("n") + " = " + v("ex") + "*" + c1 + " - " + v("ey") + "*" + c2 + " + " + v("ez") + "*"
         + c3 + "\n";
    for (char c : std::string_view(with_z ? "xyz" : "xy"))
    {
        const std::string C(1, c);
        t += "l" + K + C + " = d" + K + "*" + v("q1" + C) + " + " + v("n") + "*" + v("q2" + C)
             + " - " + v("n") + "*" + v("q1" + C) + "\n";
    }
    return t;
}

inline std::string implicit_block(ImplicitKind kind, int k, bool with_z)
{
    return kind == ImplicitKind::LLI ? lli_block(k) : lpi_block(k, with_z);
}

inline std::string det3(const std::string& a, const std::string& b, const std::string& c,
                        const char* x, const char* y, const char* z)
{
    auto e = [](const std::string& r, const char* s) { return r + s; };
    return e(a, x) + "*(" + e(b, y) + "*" + e(c, z) + " - " + e(b, z) + "*" + e(c, y) + ") - "
           + e(a, y) + "*(" + e(b, x) + "*" + e(c, z) + " - " + e(b, z) + "*" + e(c, x) + ") + "
           + e(a, z) + "*(" + e(b, x) + "*" + e(c, y) + " - " + e(b, y) + "*" + e(c, x) + ")";
}

inline std::string orient2d_body(int implicit)
{
    switch (implicit)
    {
    case 0: return "value = (p2x - p1x)*(p3y - p1y) - (p2y - p1y)*(p3x - p1x)\n";
    case 1: return "value = (d1*p2x - l1x)*(d1*p3y - l1y) - (d1*p2y - l1y)*(d1*p3x - l1x)\n";
    case 2: return "value = (d1*l2x - d2*l1x)*(d1*p3y - l1y) - (d1*l2y - d2*l1y)*(d1*p3x - l1x)\n";
    case 3: return "value = (d1*l2x - d2*l1x)*(d1*l3y - d3*l1y) - (d1*l2y - d2*l1y)*(d1*l3x - d3*l1x)\n";
    }
    throw std::invalid_argument("orient2d arity");
}

inline std::string incircle_body(int implicit)
{
    std::string t;
    for (int i = 1; i <= 3; ++i)
    {
        const std::string I = std::to_string(i);
        const std::string m = "m" + I;
        if (i > implicit)
        {
            t += m + "1 = p" + I + "x - p4x\n";
            t += m + "2 = p" + I + "y - p4y\n";
            t += m + "3 = " + m + "1*" + m + "1 + " + m + "2*" + m + "2\n";
        }
        else if (implicit < 4)
        {
            const std::string d = "d" + I;
            const std::string lx = "l" + I + "x";
            const std::string ly = "l" + I + "y";
            t += m + "1 = " + d + "*" + lx + " - " + d + "*" + d + "*p4x\n";
            t += m + "2 = " + d + "*" + ly + " - " + d + "*" + d + "*p4y\n";
            t += "t" + I + " = " + d + "*(" + lx + "*p4x + " + ly + "*p4y)\n";
            t += m + "3 = " + lx + "*" + lx + " + " + ly + "*" + ly + " + " + d + "*" + d
                 + "*(p4x*p4x + p4y*p4y) - (t" + I + " + t" + I + ")\n";
        }
        else
        {
            const std::string d = "d" + I;
            const std::string lx = "l" + I + "x";
            const std::string ly = "l" + I + "y";
            t += m + "1 = " + d + "*d4*d4*" + lx + " - " + d + "*" + d + "*d4*l4x\n";
            t += m + "2 = " + d + "*d4*d4*" + ly + " - " + d + "*" + d + "*d4*l4y\n";
            t += "t" + I + " = " + d + "*d4*(" + lx + "*l4x + " + ly + "*l4y)\n";
            t += m + "3 = d4*d4*(" + lx + "*" + lx + " + " + ly + "*" + ly + ") + " + d + "*" + d
                 + "*(l4x*l4x + l4y*l4y) - (t" + I + " + t" + I + ")\n";
        }
    }
    t += "value = " + det3("m1", "m2", "m3", "1", "2", "3") + "\n";
    return t;
}

inline std::string orient3d_body(int implicit)
{
    std::string t;
    for (int i = 1; i <= 3; ++i)
    {
        const std::string I = std::to_string(i);
        for (const char* c : {"x", "y", "z"})
        {
            const std::string C = c;
            const std::string r = "r" + I + C;
            if (i > implicit)
                t += r + " = p" + I + C + " - p4" + C + "\n";
            else if (implicit < 4)
                t += r + " = l" + I + C + " - d" + I + "*p4" + C + "\n";
            else
                t += r + " = d4*l" + I + C + " - d" + I + "*l4" + C + "\n";
        }
    }
    t += "value = " + det3("r1", "r2", "r3", "x", "y", "z") + "\n";
    return t;
}

inline std::string compare_body(int implicit)
{
    if (implicit == 1)
        return "value = l1x - d1*p2x\n";
    return "value = d2*l1x - d1*l2x\n";
}

/// Complete formula program for an instance; its output root is "value"
/// (or "d1" for the denominator filters).
inline std::string program(Instance inst)
{
    auto with_blocks = [](ImplicitKind kind, int implicit, bool with_z, const std::string& body) {
        std::string t;
        for (int k = 1; k <= implicit; ++k)
            t += implicit_block(kind, k, with_z);
        return t + body;
    };
    using I = Instance;
    const int idx = static_cast<int>(inst);
    switch (inst)
    {
    case I::lli_d: return lli_block(1);
    case I::lpi_d: return lpi_block(1, false);
    case I::orient2d_EEE: return orient2d_body(0);
    case I::orient2d_IEE_lli:
    case I::orient2d_IIE_lli:
    case I::orient2d_III_lli: {
        const int n = idx - static_cast<int>(I::orient2d_IEE_lli) + 1;
        return with_blocks(ImplicitKind::LLI, n, false, orient2d_body(n));
    }
    case I::orient2d_IEE_lpi:
    case I::orient2d_IIE_lpi:
    case I::orient2d_III_lpi: {
        const int n = idx - static_cast<int>(I::orient2d_IEE_lpi) + 1;
        return with_blocks(ImplicitKind::LPI, n, false, orient2d_body(n));
    }
    case I::incircle_EEEE: return incircle_body(0);
    case I::incircle_IEEE_lli:
    case I::incircle_IIEE_lli:
    case I::incircle_IIIE_lli:
    case I::incircle_IIII_lli: {
        const int n = idx - static_cast<int>(I::incircle_IEEE_lli) + 1;
        return with_blocks(ImplicitKind::LLI, n, false, incircle_body(n));
    }
    case I::incircle_IEEE_lpi:
    case I::incircle_IIEE_lpi:
    case I::incircle_IIIE_lpi:
    case I::incircle_IIII_lpi: {
        const int n = idx - static_cast<int>(I::incircle_IEEE_lpi) + 1;
        return with_blocks(ImplicitKind::LPI, n, false, incircle_body(n));
    }
    case I::orient3d_EEEE:
    case I::orient3d_IEEE:
    case I::orient3d_IIEE:
    case I::orient3d_IIIE:
    case I::orient3d_IIII: {
        const int n = idx - static_cast<int>(I::orient3d_EEEE);
        return with_blocks(ImplicitKind::LPI, n, true, orient3d_body(n));
    }
    case I::compare_IE_lli:
    case I::compare_II_lli: {
        const int n = idx - static_cast<int>(I::compare_IE_lli) + 1;
        return with_blocks(ImplicitKind::LLI, n, false, compare_body(n));
    }
    case I::compare_IE_lpi:
    case I::compare_II_lpi: {
        const int n = idx - static_cast<int>(I::compare_IE_lpi) + 1;
        return with_blocks(ImplicitKind::LPI, n, false, compare_body(n));
    }
    }
    throw std::invalid_argument("unknown instance");
}

inline std::string_view root_of(Instance inst)
{
    return (inst == Instance::lli_d || inst == Instance::lpi_d) ? "d1" : "value";
}

} // namespace formulas
} // namespace indirect

#endif
