#ifndef INDIRECT_FILTER_TABLE_HPP
#define INDIRECT_FILTER_TABLE_HPP

// Generated by tools/gen_filter_table. Do not edit by hand; the
// filter_table test re-derives every entry and compares bit-exactly.

#include <array>

#include "indirect/filter_kit.hpp"
#include "indirect/formulas.hpp"

namespace indirect
{

inline constexpr std::array<filter_kit::FilterSpec, instance_count> filter_table = {{
    {0x1.0000000000001p-50, 2}, // lli_d (8.881784197001254e-16)
    {0x1.7000000000002p-48, 3}, // lpi_d (5.107025913275722e-15)
    {0x1.0000000000001p-50, 2}, // orient2d_EEE (8.881784197001254e-16)
    {0x1.f800000000005p-44, 6}, // orient2d_IEE_lli (1.119104808822158e-13)
    {0x1.c800000000008p-42, 8}, // orient2d_IIE_lli (4.050093593832575e-13)
    {0x1.8000000000007p-40, 10}, // orient2d_III_lli (1.364242052659394e-12)
    {0x1.ad00000000008p-39, 8}, // orient2d_IEE_lpi (3.048228336410833e-12)
    {0x1.4d4800000000ap-35, 11}, // orient2d_IIE_lpi (3.788969138440741e-11)
    {0x1.de68000000012p-32, 14}, // orient2d_III_lpi (4.351079496700559e-10)
    {0x1.0000000000002p-46, 4}, // incircle_EEEE (1.421085471520201e-14)
    {0x1.3200000000005p-41, 8}, // incircle_IEEE_lli (5.435651928564771e-13)
    {0x1.e18000000000ep-37, 12}, // incircle_IIEE_lli (1.368505309073955e-11)
    {0x1.34d000000000cp-32, 16}, // incircle_IIIE_lli (2.80863332591253e-10)
    {0x1.a80000000001bp-24, 28}, // incircle_IIII_lli (9.872019290924108e-08)
    {0x1.91a000000000bp-37, 10}, // incircle_IEEE_lpi (1.141486904998603e-11)
    {0x1.161f00000000cp-28, 16}, // incircle_IIEE_lpi (4.04719457947068e-09)
    {0x1.2109800000012p-20, 22}, // incircle_IIIE_lpi (1.076747139450166e-06)
    {0x1.d2f9083600036p-2, 40}, // incircle_IIII_lpi (0.4560281069716469)
    {0x1.7000000000002p-48, 3}, // orient3d_EEEE (5.107025913275722e-15)
    {0x1.3c80000000005p-42, 6}, // orient3d_IEEE (2.811084698350899e-13)
    {0x1.7340000000008p-37, 9}, // orient3d_IIEE (1.05515596260375e-11)
    {0x1.7ad800000000cp-32, 12}, // orient3d_IIIE (3.445563834247884e-10)
    {0x1.d22030000001bp-22, 21}, // orient3d_IIII (4.341134172136677e-07)
    {0x1.2000000000001p-48, 3}, // compare_IE_lli (3.996802888650564e-15)
    {0x1.6000000000003p-46, 5}, // compare_II_lli (1.953992523340276e-14)
    {0x1.0600000000002p-45, 4}, // compare_IE_lpi (2.908784324517911e-14)
    {0x1.0e00000000005p-41, 7}, // compare_II_lpi (4.796163466380681e-13)
}};

inline constexpr const filter_kit::FilterSpec& filter_spec(Instance i)
{
    return filter_table[static_cast<std::size_t>(i)];
}

} // namespace indirect

#endif
