#include "qslice/stats.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace qslice {

namespace {

BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt b = 1;
    for (int i = 0; i < k; ++i) {
        b *= (n - i);
        b /= (i + 1);
    }
    return b;
}

// sum_{s=k}^{upper} (-1)^(k+s) C(s,k) / s!
Rational rencontres_sum(int k, int upper) {
    Rational acc = 0;
    for (int s = k; s <= upper; ++s) {
        Rational term(binomial(s, k), factorial(s));
        if ((k + s) % 2 != 0) term = -term;
        acc += term;
    }
    return acc;
}

}  // namespace

Rational closed_form_pk(int d, int k) {
    if (d < 0) throw InputError("degree must be >= 0");
    if (k < 0 || k > d) throw InputError("closed form requires 0 <= k <= d");
    return rencontres_sum(k, d);
}

Rational closed_form_conjecture(int d, int e, int k) {
    if (d < 1 || e < 1) throw InputError("degrees must be >= 1");
    if (k < 0 || k > d * e) throw InputError("closed form requires 0 <= k <= d*e");
    return rencontres_sum(k, d * e);
}

std::vector<Rational> limit_vector(int d) {
    std::vector<Rational> v;
    for (int k = 0; k <= d; ++k) v.push_back(closed_form_pk(d, k));
    return v;
}

void IntersectionHistogram::validate() const {
    BigInt sum = contained;
    for (const auto& [k, c] : counts) {
        if (c < 0) throw InternalError("negative histogram count");
        sum += c;
    }
    if (sum != total)
        throw InternalError("histogram mass identity broken: counts+contained = " + sum.str() +
                            ", total = " + total.str());
}

Rational IntersectionHistogram::probability(std::uint64_t k) const {
    if (total == 0) throw InternalError("histogram with zero total");
    auto it = counts.find(k);
    if (it == counts.end()) return Rational(0);
    return Rational(it->second, total);
}

std::vector<Rational> IntersectionHistogram::probabilities(int d) const {
    std::vector<Rational> out;
    for (int k = 0; k <= d; ++k) out.push_back(probability(static_cast<std::uint64_t>(k)));
    return out;
}

Rational deviation_from_limit(const IntersectionHistogram& hist, int d) {
    Rational dev = 0;
    for (int k = 0; k <= d; ++k) {
        Rational diff = hist.probability(static_cast<std::uint64_t>(k)) - closed_form_pk(d, k);
        if (diff < 0) diff = -diff;
        if (diff > dev) dev = diff;
    }
    return dev;
}

// ---------------------------------------------------------------------------

namespace {

// Runs fn(b) for b in [0, nblocks); results must be written to per-block slots
// so the outcome is independent of the thread count.
void run_blocks(int threads, std::uint64_t nblocks, const std::function<void(std::uint64_t)>& fn) {
    int T = std::max(1, threads);
    if (T == 1 || nblocks <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::uint64_t b = static_cast<std::uint64_t>(t); b < nblocks; b += T) fn(b);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

bool forms_vanish_on_lifted(const std::vector<HomogPoly>& lifted, const LinearSubspace& V) {
    const int nv = V.cols();
    const int r = V.rows();
    std::vector<Felem> L(static_cast<std::size_t>(nv) * r);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < r; ++j)
            L[static_cast<std::size_t>(i) * r + j] = V.basis[static_cast<std::size_t>(j) * nv + i];
    for (const auto& f : lifted) {
        if (!substitute_linear(f, L, r).is_zero()) return false;
    }
    return true;
}

// Strict containment: all forms restrict to zero on V and X has strictly more
// rational points than V (so V = X stays a finite, countable intersection).
bool strictly_contained(const std::vector<HomogPoly>& lifted, const LinearSubspace& V,
                        std::uint64_t k, std::uint64_t v_points, std::uint64_t x_points) {
    if (k != v_points || x_points <= v_points) return false;
    return forms_vanish_on_lifted(lifted, V);
}

}  // namespace

IntersectionHistogram exact_distribution_generic(Variety& var, int N, const Budget& budget) {
    const auto& spec = var.spec();
    const FieldCtx& ext = var.field_at(N);
    const PointSet& X = var.points_over(N, budget.max_points);
    const auto& lifted = var.forms_over(N);

    SubspaceEnumerator enumr(ext, spec.n, spec.m);
    if (enumr.total() > budget.max_subspaces)
        throw BudgetError("exact distribution would enumerate " + enumr.total().str() +
                          " subspaces, over the budget of " + std::to_string(budget.max_subspaces));

    const int r = spec.n + 1 - spec.m;
    std::uint64_t v_points = 1, qp = 1;
    for (int i = 0; i < r; ++i) qp *= ext.size();
    v_points = (qp - 1) / (ext.size() - 1);

    const std::uint64_t total = enumr.total().convert_to<std::uint64_t>();
    const int T = std::max(1, budget.threads);
    const std::uint64_t chunk = (total + T - 1) / T;
    const std::uint64_t nchunks = chunk == 0 ? 0 : (total + chunk - 1) / chunk;

    struct Local {
        std::map<std::uint64_t, std::uint64_t> counts;
        std::uint64_t contained = 0;
    };
    std::vector<Local> locals(static_cast<std::size_t>(std::max<std::uint64_t>(nchunks, 1)));

    run_blocks(T, nchunks, [&](std::uint64_t c) {
        BigInt begin = BigInt(c) * chunk;
        BigInt end = std::min<std::uint64_t>(total, (c + 1) * chunk);
        Local& loc = locals[static_cast<std::size_t>(c)];
        enumr.for_range(begin, end, [&](const LinearSubspace& V) {
            std::uint64_t k = intersection_count(X, V);
            if (strictly_contained(lifted, V, k, v_points, X.count)) {
                ++loc.contained;
            } else {
                ++loc.counts[k];
            }
        });
    });

    IntersectionHistogram hist;
    hist.N = N;
    hist.mode = "exact";
    hist.total = enumr.total();
    for (const auto& loc : locals) {
        hist.contained += loc.contained;
        for (const auto& [k, c] : loc.counts) hist.counts[k] += c;
    }
    hist.validate();
    return hist;
}

// ---------------------------------------------------------------------------
// Hypersurface/line fast path: count unordered point pairs per line, recover
// the per-line point counts j from C(j,2), then reconstruct the j=1 and j=0
// buckets from the incidence total and |J_m| without enumerating lines.

namespace {

using LineKey = unsigned __int128;

struct LineCodec {
    const FieldCtx* F;
    int n;
    // canonical RREF of the 2 x (n+1) matrix spanned by two distinct
    // normalized points; rows written to R
    void rref2(std::span<const Felem> a_in, std::span<const Felem> b_in, Felem* R) const {
        const int cols = n + 1;
        Felem A[4], B[4];
        for (int i = 0; i < cols; ++i) {
            A[i] = a_in[i];
            B[i] = b_in[i];
        }
        auto leading = [&](const Felem* v) {
            for (int i = 0; i < cols; ++i)
                if (v[i] != 0) return i;
            return cols;
        };
        int la = leading(A), lb = leading(B);
        if (la == lb) {
            // both leads are 1; subtract to push B's lead right
            for (int i = 0; i < cols; ++i) B[i] = F->sub(B[i], A[i]);
            lb = leading(B);
            Felem inv = F->inverse(B[lb]);
            for (int i = lb; i < cols; ++i) B[i] = F->mul(B[i], inv);
        } else if (lb < la) {
            std::swap_ranges(A, A + cols, B);
            std::swap(la, lb);
        }
        Felem f = A[lb];
        if (f != 0) {
            for (int i = lb; i < cols; ++i) A[i] = F->sub(A[i], F->mul(f, B[i]));
        }
        for (int i = 0; i < cols; ++i) {
            R[i] = A[i];
            R[cols + i] = B[i];
        }
    }

    LineKey encode(const Felem* R) const {
        const int cols = n + 1;
        int la = 0, lb = 0;
        for (int i = 0; i < cols; ++i)
            if (R[i] != 0) {
                la = i;
                break;
            }
        for (int i = 0; i < cols; ++i)
            if (R[cols + i] != 0) {
                lb = i;
                break;
            }
        LineKey key = static_cast<LineKey>(la * (n + 2) + lb);
        for (int row = 0; row < 2; ++row) {
            int piv = row == 0 ? la : lb;
            for (int c = piv + 1; c < cols; ++c) {
                if (c == la || c == lb) continue;
                key = (key << 24) | static_cast<LineKey>(R[row * cols + c]);
            }
        }
        return key;
    }

    // inverse of encode
    void decode(LineKey key, Felem* R) const {
        const int cols = n + 1;
        // recover the pattern from the high bits; the free-entry count depends
        // on the pattern, so scan the (few) patterns for the matching tag
        for (int la = 0; la < cols; ++la) {
            for (int lb = la + 1; lb < cols; ++lb) {
                int nfree = 0;
                for (int row = 0; row < 2; ++row) {
                    int piv = row == 0 ? la : lb;
                    for (int c = piv + 1; c < cols; ++c)
                        if (c != la && c != lb) ++nfree;
                }
                LineKey tag = key >> (24 * nfree);
                if (tag == static_cast<LineKey>(la * (n + 2) + lb)) {
                    std::fill(R, R + 2 * cols, 0);
                    R[la] = 1;
                    R[cols + lb] = 1;
                    int shift = 24 * nfree;
                    for (int row = 0; row < 2; ++row) {
                        int piv = row == 0 ? la : lb;
                        for (int c = piv + 1; c < cols; ++c) {
                            if (c == la || c == lb) continue;
                            shift -= 24;
                            R[row * cols + c] =
                                static_cast<Felem>((key >> shift) & ((LineKey(1) << 24) - 1));
                        }
                    }
                    return;
                }
            }
        }
        throw InternalError("line key does not decode to a pivot pattern");
    }
};

std::uint64_t isqrt_u64(std::uint64_t x) {
    std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
    while (r > 0 && r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

}  // namespace

IntersectionHistogram exact_distribution_pairs(Variety& var, int N, const Budget& budget) {
    const auto& spec = var.spec();
    if (spec.n - spec.m != 1 || spec.n > 3)
        throw InputError("pair-counting fast path requires lines slicing a hypersurface, n <= 3");

    const FieldCtx& ext = var.field_at(N);
    const PointSet& X = var.points_over(N, budget.max_points);
    const auto& lifted = var.forms_over(N);
    const std::uint64_t Q = ext.size();
    const int cols = spec.n + 1;

    IntersectionHistogram hist;
    hist.N = N;
    hist.mode = "exact";
    hist.total = subspace_count(ext, spec.n, spec.m);

    const std::uint64_t npts = X.count;
    if (npts > 1) {
        const std::uint64_t pairs = npts * (npts - 1) / 2;
        if (pairs > budget.max_pairs)
            throw BudgetError("pair-counting fast path needs " + std::to_string(pairs) +
                              " point pairs, over the budget of " + std::to_string(budget.max_pairs));
    }

    LineCodec codec{&ext, spec.n};
    std::vector<LineKey> keys;
    if (npts > 1) keys.reserve(npts * (npts - 1) / 2);
    Felem R[8];
    for (std::size_t i = 0; i + 1 < npts; ++i) {
        auto a = X.point(i);
        for (std::size_t j = i + 1; j < npts; ++j) {
            codec.rref2(a, X.point(j), R);
            keys.push_back(codec.encode(R));
        }
    }
    std::sort(keys.begin(), keys.end());

    BigInt incidences = BigInt(npts) * ((boost::multiprecision::pow(BigInt(Q), spec.n) - 1) / (Q - 1));
    BigInt sum_multi = 0;     // total incidences on multi-point lines
    BigInt lines_multi = 0;   // number of lines with >= 2 points

    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        const std::uint64_t paircount = j - i;
        const std::uint64_t pts = (1 + isqrt_u64(8 * paircount + 1)) / 2;
        if (pts * (pts - 1) / 2 != paircount)
            throw InternalError("pair count " + std::to_string(paircount) +
                                " is not a triangular number; counting bug");
        lines_multi += 1;
        sum_multi += pts;
        bool is_contained = false;
        if (pts == Q + 1) {
            // every rational point of the line is on X; check the scheme side
            LinearSubspace V;
            V.F = &ext;
            V.n = spec.n;
            V.m = spec.m;
            codec.decode(keys[i], R);
            V.basis.assign(R, R + 2 * cols);
            is_contained = (X.count > Q + 1) && forms_vanish_on_lifted(lifted, V);
        }
        if (is_contained) {
            hist.contained += 1;
        } else {
            hist.counts[pts] += 1;
        }
        i = j;
    }

    BigInt ones = incidences - sum_multi;
    if (ones < 0) throw InternalError("negative single-point line count; counting bug");
    BigInt zeros = hist.total - lines_multi - ones;
    if (zeros < 0) throw InternalError("negative empty-line count; counting bug");
    if (ones > 0) hist.counts[1] += ones;
    if (zeros > 0) hist.counts[0] += zeros;
    hist.validate();
    return hist;
}

IntersectionHistogram exact_distribution(Variety& var, int N, const Budget& budget) {
    const auto& spec = var.spec();
    if (spec.n - spec.m == 1 && spec.n <= 3) return exact_distribution_pairs(var, N, budget);
    return exact_distribution_generic(var, N, budget);
}

// ---------------------------------------------------------------------------

IntersectionHistogram mc_distribution(Variety& var, int N, std::uint64_t samples,
                                      std::uint64_t seed, const Budget& budget) {
    if (samples == 0) throw InputError("mc requires samples >= 1");
    const auto& spec = var.spec();
    const FieldCtx& ext = var.field_at(N);
    const PointSet& X = var.points_over(N, budget.max_points);
    const auto& lifted = var.forms_over(N);

    const int r = spec.n + 1 - spec.m;
    std::uint64_t qp = 1;
    for (int i = 0; i < r; ++i) qp *= ext.size();
    const std::uint64_t v_points = (qp - 1) / (ext.size() - 1);

    constexpr std::uint64_t kBlock = 1024;
    const std::uint64_t nblocks = (samples + kBlock - 1) / kBlock;

    struct Local {
        std::map<std::uint64_t, std::uint64_t> counts;
        std::uint64_t contained = 0;
    };
    std::vector<Local> locals(static_cast<std::size_t>(nblocks));

    run_blocks(budget.threads, nblocks, [&](std::uint64_t b) {
        RngStream rng(seed, b);
        Local& loc = locals[static_cast<std::size_t>(b)];
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min(samples, lo + kBlock);
        for (std::uint64_t s = lo; s < hi; ++s) {
            LinearSubspace V = sample_uniform(ext, spec.n, spec.m, rng);
            std::uint64_t k = intersection_count(X, V);
            if (strictly_contained(lifted, V, k, v_points, X.count)) {
                ++loc.contained;
            } else {
                ++loc.counts[k];
            }
        }
    });

    IntersectionHistogram hist;
    hist.N = N;
    hist.mode = "mc";
    hist.total = samples;
    hist.samples = samples;
    for (const auto& loc : locals) {
        hist.contained += loc.contained;
        for (const auto& [k, c] : loc.counts) hist.counts[k] += c;
    }
    const double S = static_cast<double>(samples);
    for (const auto& [k, c] : hist.counts) {
        double phat = c.convert_to<double>() / S;
        hist.stderr_by_k[k] = std::sqrt(phat * (1.0 - phat) / S);
    }
    hist.validate();
    return hist;
}

ConvergenceReport convergence_report(Variety& var, const std::vector<int>& levels,
                                     std::optional<int> mc_above, std::uint64_t samples,
                                     std::uint64_t seed, const Budget& budget) {
    if (levels.empty()) throw InputError("convergence report requires at least one level");
    const auto& spec = var.spec();
    ConvergenceReport report;
    report.d = spec.d;
    report.limit = limit_vector(spec.d);
    for (int N : levels) {
        bool exact;
        if (mc_above.has_value()) {
            exact = N <= *mc_above;
        } else {
            exact = subspace_count(var.field_at(N), spec.n, spec.m) <= budget.max_subspaces;
        }
        ConvergenceRow row{exact ? exact_distribution(var, N, budget)
                                 : mc_distribution(var, N, samples, seed, budget),
                           Rational(0)};
        row.deviation = deviation_from_limit(row.hist, spec.d);
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------

ConjectureProbe conjecture_probe(Variety& var, int e, int N, std::uint64_t samples,
                                 std::uint64_t seed, const Budget& budget) {
    const auto& spec = var.spec();
    if (e != 2) throw InputError("conjecture probe supports e = 2 only");
    if (spec.n != 2) throw InputError("conjecture probe expects a plane curve");
    if (samples == 0) throw InputError("probe requires samples >= 1");

    const FieldCtx& ext = var.field_at(N);
    const PointSet& X = var.points_over(N, budget.max_points);
    const std::uint32_t Q = static_cast<std::uint32_t>(ext.size());

    static const std::uint16_t kMonomials[6][3] = {{2, 0, 0}, {1, 1, 0}, {1, 0, 1},
                                                   {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};

    constexpr std::uint64_t kBlock = 256;  // accepted conics per block
    const std::uint64_t nblocks = (samples + kBlock - 1) / kBlock;

    struct Local {
        std::map<std::uint64_t, std::uint64_t> counts;
        std::uint64_t rejected = 0;
    };
    std::vector<Local> locals(static_cast<std::size_t>(nblocks));

    run_blocks(budget.threads, nblocks, [&](std::uint64_t b) {
        RngStream rng(seed, b);
        Local& loc = locals[static_cast<std::size_t>(b)];
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t quota = std::min(samples, lo + kBlock) - lo;
        std::uint64_t accepted = 0, raw = 0;
        const std::uint64_t raw_cap = 1000 * quota + 1000;
        while (accepted < quota) {
            if (++raw > raw_cap)
                throw BudgetError("conic sampling rejection rate is pathological");
            Felem c[6];
            bool all_zero = true;
            for (auto& x : c) {
                x = rng.bounded(Q);
                if (x != 0) all_zero = false;
            }
            if (all_zero) continue;
            std::vector<HomogPoly::Term> terms;
            for (int i = 0; i < 6; ++i) {
                if (c[i] == 0) continue;
                terms.push_back(HomogPoly::Term{
                    {kMonomials[i][0], kMonomials[i][1], kMonomials[i][2]}, c[i]});
            }
            HomogPoly g = HomogPoly::from_terms(ext, 3, 2, std::move(terms));
            if (!linear_factor_search(g).absolutely_irreducible) {
                ++loc.rejected;
                continue;
            }
            std::uint64_t k = 0;
            for (std::size_t i = 0; i < X.count; ++i) {
                if (g.evaluate(X.point(i)) == 0) ++k;
            }
            ++loc.counts[k];
            ++accepted;
        }
    });

    ConjectureProbe probe;
    probe.N = N;
    probe.e = e;
    probe.samples = samples;
    for (const auto& loc : locals) {
        probe.rejected += loc.rejected;
        for (const auto& [k, c] : loc.counts) probe.counts[k] += c;
    }
    const double S = static_cast<double>(samples);
    for (const auto& [k, c] : probe.counts) {
        double f = static_cast<double>(c) / S;
        probe.freq[k] = f;
        probe.stderr_by_k[k] = std::sqrt(f * (1.0 - f) / S);
    }
    for (int k = 0; k <= spec.d * e; ++k)
        probe.limit.push_back(closed_form_conjecture(spec.d, e, k));
    return probe;
}

}  // namespace qslice
