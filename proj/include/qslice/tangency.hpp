#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qslice/budget.hpp"
#include "qslice/stats.hpp"
#include "qslice/variety.hpp"

namespace qslice {

// Multiplicity pattern of a curve section along a line, or the distinguished
// contained outcome (the line lies inside the curve).
struct LinePattern {
    bool contained = false;
    std::vector<int> pattern;  // descending, sums to deg when !contained
};

LinePattern line_pattern(const HomogPoly& curve, const LinearSubspace& line);

struct TangencyReport {
    bool found = false;
    int level = 0;                 // witness line lives over F_{q^level}
    std::vector<int> pattern;      // {2, 1, ..., 1} when found
    std::vector<int> levels_searched;
    bool degenerate = false;       // every formal partial vanishes identically
    std::string advisory;          // populated for characteristic-2 runs
    std::vector<std::vector<Felem>> witness_line_rows;  // two spanning rows
    std::vector<std::vector<Felem>> slicing_rows;       // variety search only
    int trials_used = 0;
};

// Scans every line of P^2(F_{q^j}) for j = 1..n_max looking for the pattern
// {2, 1^(d-2)} with the double point smooth on the curve (formal Jacobian
// criterion). Deterministic: the first witness in enumeration order wins.
// found = false means "not found up to level n_max", never "does not exist".
TangencyReport curve_has_simple_tangency(const HomogPoly& curve, int n_max, const Budget& budget);

// For a hypersurface X of dimension m >= 2 (m = n-1): samples `trials` random
// codimension-(m-1) subspaces over the base field, restricts X to each plane
// slice and runs the curve search. First success is reported with both
// witnesses.
TangencyReport variety_has_simple_tangency(Variety& var, int trials, int n_max,
                                           std::uint64_t seed, const Budget& budget);

}  // namespace qslice
