// Prints include/indirect/filter_table.hpp: the derived filter constant for
// every canonical predicate instance.

#include <cstdio>

#include "indirect/filter_kit.hpp"
#include "indirect/formulas.hpp"

int main()
{
    using namespace indirect;
    std::printf("#ifndef INDIRECT_FILTER_TABLE_HPP\n#define INDIRECT_FILTER_TABLE_HPP\n\n");
    std::printf("// Generated by tools/gen_filter_table. Do not edit by hand; the\n");
    std::printf("// filter_table test re-derives every entry and compares bit-exactly.\n\n");
    std::printf("#include <array>\n\n#include \"indirect/filter_kit.hpp\"\n#include \"indirect/formulas.hpp\"\n\n");
    std::printf("namespace indirect\n{\n\n");
    std::printf("inline constexpr std::array<filter_kit::FilterSpec, instance_count> filter_table = {{\n");
    for (std::size_t i = 0; i < instance_count; ++i)
    {
        const auto inst = static_cast<Instance>(i);
        const auto dag = filter_kit::parse_formula(formulas::program(inst));
        const auto spec = filter_kit::derive_filter(dag, formulas::root_of(inst));
        std::printf("    {%a, %d}, // %s (%.16g)\n", spec.delta, spec.degree,
                    std::string(name_of(inst)).c_str(), spec.delta);
    }
    std::printf("}};\n\n");
    std::printf("inline constexpr const filter_kit::FilterSpec& filter_spec(Instance i)\n{\n");
    std::printf("    return filter_table[static_cast<std::size_t>(i)];\n}\n\n");
    std::printf("} // namespace indirect\n\n#endif\n");
}
