#pragma once

#include <cstdint>

namespace gaussline {

inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;
inline constexpr int kDefaultPartitions = 64;

// Limits shared by the enumeration and quadrature kernels.  The partition
// count fixes how work is split before the OpenMP loop, so results are
// bit-identical for a given value regardless of the thread count.
struct Limits {
    std::uint64_t budget = kDefaultBudget;
    std::uint64_t quadrature_leaves = std::uint64_t{1} << 30;
    int partitions = kDefaultPartitions;

    // Reads GAUSSLINE_BUDGET when set; malformed values are ignored.
    static Limits from_environment();
};

const char* version();

} // namespace gaussline
