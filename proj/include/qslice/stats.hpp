#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qslice/budget.hpp"
#include "qslice/variety.hpp"

namespace qslice {

// Limit of p_k^N for a degree-d variety with simple tangency: the truncated
// rencontres sum  sum_{s=k}^{d} (-1)^(k+s) C(s,k) / s!,  exact.
Rational closed_form_pk(int d, int k);

// Same shape with the sum truncated at d*e (degree-e slicing family).
Rational closed_form_conjecture(int d, int e, int k);

// p_0..p_d. Always sums to 1 with mean 1; p_d = 1/d!.
std::vector<Rational> limit_vector(int d);

// Histogram of |X ∩ V| over codimension-m subspaces at one extension level.
// counts maps k to the number of subspaces with exactly k rational
// intersection points; `contained` counts subspaces strictly inside X (every
// form restricts to zero and |X| exceeds the subspace's point count) which are
// excluded from counts. Mass identity: sum(counts) + contained = total.
struct IntersectionHistogram {
    int N = 1;
    std::string mode;  // "exact" or "mc"
    BigInt total;      // |J_m| for exact, sample count for mc
    std::map<std::uint64_t, BigInt> counts;
    BigInt contained = 0;
    std::uint64_t samples = 0;                     // mc only
    std::map<std::uint64_t, double> stderr_by_k;   // mc only

    void validate() const;  // throws InternalError on a broken mass identity
    Rational probability(std::uint64_t k) const;
    // p_0..p_d (missing counts are zero).
    std::vector<Rational> probabilities(int d) const;
};

// max_k |p_k^N - closed_form_pk(d, k)| over k = 0..d, exact.
Rational deviation_from_limit(const IntersectionHistogram& hist, int d);

// Exact distribution. Chooses between the generic subspace enumeration and,
// for hypersurfaces sliced by lines (n - m = 1, n <= 3), the point-pair fast
// path that never enumerates J_m.
IntersectionHistogram exact_distribution(Variety& var, int N, const Budget& budget);
IntersectionHistogram exact_distribution_generic(Variety& var, int N, const Budget& budget);
IntersectionHistogram exact_distribution_pairs(Variety& var, int N, const Budget& budget);

// Monte Carlo estimate: `samples` uniform subspaces, per-k binomial standard
// errors. Bit-identical for a fixed seed regardless of budget.threads.
IntersectionHistogram mc_distribution(Variety& var, int N, std::uint64_t samples,
                                      std::uint64_t seed, const Budget& budget);

struct ConvergenceRow {
    IntersectionHistogram hist;
    Rational deviation;
};

struct ConvergenceReport {
    int d = 0;
    std::vector<ConvergenceRow> rows;
    std::vector<Rational> limit;
};

// One row per requested level. A level is exact when forced by mc_above (N <=
// mc_above) or, with no override, when |J_m| stays under the subspace budget
// (default 2^22); otherwise Monte Carlo with `samples` draws.
ConvergenceReport convergence_report(Variety& var, const std::vector<int>& levels,
                                     std::optional<int> mc_above, std::uint64_t samples,
                                     std::uint64_t seed, const Budget& budget);

struct ConjectureProbe {
    int N = 1;
    int e = 2;
    std::uint64_t samples = 0;   // accepted (absolutely irreducible) samples
    std::uint64_t rejected = 0;  // draws discarded for having a linear factor
    std::map<std::uint64_t, std::uint64_t> counts;
    std::map<std::uint64_t, double> freq;
    std::map<std::uint64_t, double> stderr_by_k;
    std::vector<Rational> limit;  // closed_form_conjecture(d, e, k), k = 0..d*e
};

// Samples uniformly random irreducible conics (degree-2 forms without a linear
// factor over F_{q^N} or F_{q^{2N}}) and tallies |X ∩ Z(g)| against the
// conjecture's closed form. `samples` counts accepted conics.
ConjectureProbe conjecture_probe(Variety& var, int e, int N, std::uint64_t samples,
                                 std::uint64_t seed, const Budget& budget);

}  // namespace qslice
