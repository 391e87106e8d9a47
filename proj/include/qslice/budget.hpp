#pragma once

#include <cstdint>

namespace qslice {

// Iteration caps shared by the counting pipelines. All enumeration entry
// points check before any work starts.
struct Budget {
    std::uint64_t max_points = 1ull << 25;     // projective point enumeration
    std::uint64_t max_subspaces = 1ull << 22;  // Grassmannian enumeration
    std::uint64_t max_pairs = 1ull << 25;      // point-pair fast path
    int threads = 1;
};

}  // namespace qslice
