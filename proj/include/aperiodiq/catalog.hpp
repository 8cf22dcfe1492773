#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aperiodiq/substitution.hpp"

namespace aperiodiq {

struct NamedSeed {
    std::string name;
    PeriodicConfig config;
};

struct SubstitutionFile {
    Substitution sub;
    std::vector<NamedSeed> seeds;

    // named seed, or "const:<letter>"; throws InputError if unknown
    PeriodicConfig seed(const std::string& name) const;
};

// Domino table tiling on Z^2 with m = (2, 2).
// Letters: red = left half of a horizontal domino, yellow = top half of a vertical one,
// blue = right half, gray = bottom half. Seeds rb and gy are the period-2 checkerboards.
SubstitutionFile table_tiling();

// Two-letter rule on H3(2Z) with stretch 4.
SubstitutionFile heisenberg_example();

// a -> ab, b -> aa on Z with m = 2
SubstitutionFile period_doubling();

}  // namespace aperiodiq
