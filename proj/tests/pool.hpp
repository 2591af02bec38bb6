#pragma once

// The shared matrix pool: every generator class at dims 2..8 with several
// seeds and scales, plus the catalog.

#include <string>
#include <vector>

#include "oplens/generators.hpp"

namespace oplens::testing {

struct PoolMatrix {
    std::string label;
    GenClass cls;
    bool from_catalog = false;
    ComplexMatrix matrix;
};

inline std::vector<PoolMatrix> build_pool(int seeds_per_dim = 8, int max_dim = 8) {
    static constexpr double kScales[] = {1.0, 4.0, 0.25};
    std::vector<PoolMatrix> pool;
    for (GenClass cls : all_gen_classes()) {
        for (int dim = 2; dim <= max_dim; ++dim) {
            for (int s = 0; s < seeds_per_dim; ++s) {
                GenSpec spec;
                spec.cls = cls;
                spec.dim = dim;
                spec.seed = 1000ULL * static_cast<std::uint64_t>(cls) + 100ULL * static_cast<std::uint64_t>(dim) +
                            static_cast<std::uint64_t>(s);
                spec.scale = kScales[s % 3];
                pool.push_back({to_string(cls) + "/d" + std::to_string(dim) + "/s" + std::to_string(s), cls, false,
                                generate(spec)});
            }
        }
    }
    for (const auto& entry : catalog()) pool.push_back({entry.label, GenClass::generic, true, entry.matrix});
    return pool;
}

}  // namespace oplens::testing
