#include "qslice/linsub.hpp"

#include <algorithm>

namespace qslice {

ProjPoint LinearSubspace::row_point(int i) const {
    auto r = row(i);
    return ProjPoint{std::vector<Felem>(r.begin(), r.end())};
}

BigInt gaussian_binomial(int a, int b, const BigInt& Q) {
    if (b < 0 || b > a) throw InputError("gaussian binomial requires 0 <= b <= a");
    if (Q < 2) throw InputError("gaussian binomial requires Q >= 2");
    BigInt num = 1, den = 1;
    for (int i = 0; i < b; ++i) {
        num *= boost::multiprecision::pow(Q, a - i) - 1;
        den *= boost::multiprecision::pow(Q, b - i) - 1;
    }
    if (num % den != 0) throw InternalError("gaussian binomial did not divide exactly");
    return num / den;
}

BigInt subspace_count(const FieldCtx& F, int n, int m) {
    if (n < 0 || m < 0 || m > n) throw InputError("subspace codimension must satisfy 0 <= m <= n");
    return gaussian_binomial(n + 1, n + 1 - m, BigInt(F.size()));
}

BigInt subspace_rational_points(const LinearSubspace& V) {
    BigInt Q(V.F->size());
    return (boost::multiprecision::pow(Q, V.rows()) - 1) / (Q - 1);
}

int rref_in_place(const FieldCtx& F, std::vector<Felem>& M, int rows, int cols) {
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int prow = -1;
        for (int r = rank; r < rows; ++r) {
            if (M[static_cast<std::size_t>(r) * cols + col] != 0) {
                prow = r;
                break;
            }
        }
        if (prow < 0) continue;
        for (int c = 0; c < cols; ++c)
            std::swap(M[static_cast<std::size_t>(rank) * cols + c],
                      M[static_cast<std::size_t>(prow) * cols + c]);
        Felem inv = F.inverse(M[static_cast<std::size_t>(rank) * cols + col]);
        for (int c = col; c < cols; ++c) {
            auto& x = M[static_cast<std::size_t>(rank) * cols + c];
            x = F.mul(x, inv);
        }
        for (int r = 0; r < rows; ++r) {
            if (r == rank) continue;
            Felem f = M[static_cast<std::size_t>(r) * cols + col];
            if (f == 0) continue;
            for (int c = col; c < cols; ++c) {
                auto& x = M[static_cast<std::size_t>(r) * cols + c];
                x = F.sub(x, F.mul(f, M[static_cast<std::size_t>(rank) * cols + c]));
            }
        }
        ++rank;
    }
    return rank;
}

SubspaceEnumerator::SubspaceEnumerator(const FieldCtx& F, int n, int m)
    : F_(&F), n_(n), m_(m), r_(n + 1 - m) {
    if (n < 0 || m < 0 || m > n) throw InputError("subspace codimension must satisfy 0 <= m <= n");

    // pivot-column combinations in colexicographic order
    std::vector<std::vector<int>> combos;
    std::vector<int> cur(r_);
    // colex: recurse on the largest element
    std::function<void(int, int)> gen = [&](int slot, int maxcol) {
        if (slot < 0) {
            combos.push_back(cur);
            return;
        }
        for (int c = slot; c <= maxcol; ++c) {
            cur[slot] = c;
            gen(slot - 1, c - 1);
        }
    };
    // slots filled from the top (largest index r_-1) downward; for colex order
    // the largest pivot varies slowest, so iterate it in the outermost loop.
    gen(r_ - 1, n);

    const BigInt Q(F.size());
    BigInt cum = 0;
    for (auto& pivots : combos) {
        Pattern pat;
        pat.pivots = pivots;
        std::vector<bool> is_pivot(n + 1, false);
        for (int c : pivots) is_pivot[c] = true;
        for (int row = 0; row < r_; ++row) {
            for (int col = pivots[row] + 1; col <= n; ++col) {
                if (!is_pivot[col]) pat.free.emplace_back(row, col);
            }
        }
        pat.count = boost::multiprecision::pow(Q, static_cast<unsigned>(pat.free.size()));
        pat.cum_begin = cum;
        cum += pat.count;
        patterns_.push_back(std::move(pat));
    }
    total_ = cum;
    BigInt expect = subspace_count(F, n, m);
    if (total_ != expect)
        throw InternalError("pivot-pattern enumeration count " + total_.str() +
                            " does not match the gaussian binomial " + expect.str());
}

LinearSubspace SubspaceEnumerator::make(const Pattern& pat, BigInt offset) const {
    LinearSubspace V;
    V.F = F_;
    V.n = n_;
    V.m = m_;
    V.basis.assign(static_cast<std::size_t>(r_) * (n_ + 1), 0);
    for (int row = 0; row < r_; ++row)
        V.basis[static_cast<std::size_t>(row) * (n_ + 1) + pat.pivots[row]] = 1;
    const BigInt Q(F_->size());
    for (std::size_t i = pat.free.size(); i-- > 0;) {
        BigInt digit = offset % Q;
        offset /= Q;
        auto [row, col] = pat.free[i];
        V.basis[static_cast<std::size_t>(row) * (n_ + 1) + col] =
            static_cast<Felem>(digit.convert_to<std::uint64_t>());
    }
    return V;
}

LinearSubspace SubspaceEnumerator::at(const BigInt& index) const {
    if (index < 0 || index >= total_) throw InputError("subspace index out of range");
    // few patterns; linear scan
    const Pattern* hit = &patterns_.back();
    for (const auto& pat : patterns_) {
        if (index < pat.cum_begin + pat.count) {
            hit = &pat;
            break;
        }
    }
    return make(*hit, index - hit->cum_begin);
}

void SubspaceEnumerator::for_range(const BigInt& begin, const BigInt& end,
                                   const std::function<void(const LinearSubspace&)>& fn) const {
    if (begin >= end) return;
    BigInt idx = begin;
    const std::uint64_t Q = F_->size();
    // locate the starting pattern, then advance odometer-style
    std::size_t pi = 0;
    while (pi + 1 < patterns_.size() && idx >= patterns_[pi].cum_begin + patterns_[pi].count) ++pi;
    LinearSubspace V = make(patterns_[pi], idx - patterns_[pi].cum_begin);
    while (idx < end) {
        fn(V);
        ++idx;
        if (idx == end) break;
        const Pattern& pat = patterns_[pi];
        if (idx == pat.cum_begin + pat.count) {
            ++pi;
            V = make(patterns_[pi], 0);
            continue;
        }
        // increment the free-entry odometer, last position fastest
        for (std::size_t i = pat.free.size(); i-- > 0;) {
            auto [row, col] = pat.free[i];
            auto& x = V.basis[static_cast<std::size_t>(row) * (n_ + 1) + col];
            if (x + 1 < Q) {
                ++x;
                break;
            }
            x = 0;
        }
    }
}

void enumerate_subspaces(const FieldCtx& F, int n, int m, std::uint64_t budget,
                         const std::function<void(const LinearSubspace&)>& fn) {
    SubspaceEnumerator e(F, n, m);
    if (e.total() > budget)
        throw BudgetError("J_" + std::to_string(m) + " has " + e.total().str() +
                          " subspaces, over the enumeration budget of " + std::to_string(budget));
    e.for_range(0, e.total(), fn);
}

bool contains(const LinearSubspace& V, std::span<const Felem> point) {
    const FieldCtx& F = *V.F;
    if (static_cast<int>(point.size()) != V.cols())
        throw InputError("point arity does not match the subspace's ambient space");
    std::vector<Felem> v(point.begin(), point.end());
    const int cols = V.cols();
    for (int row = 0; row < V.rows(); ++row) {
        // pivot = first nonzero column of the row (unit by construction)
        int piv = -1;
        auto rw = V.row(row);
        for (int c = 0; c < cols; ++c) {
            if (rw[c] != 0) {
                piv = c;
                break;
            }
        }
        if (piv < 0) continue;
        Felem coef = v[piv];
        if (coef == 0) continue;
        for (int c = piv; c < cols; ++c) v[c] = F.sub(v[c], F.mul(coef, rw[c]));
    }
    return std::all_of(v.begin(), v.end(), [](Felem x) { return x == 0; });
}

LinearSubspace full_space(const FieldCtx& F, int n) {
    LinearSubspace V;
    V.F = &F;
    V.n = n;
    V.m = 0;
    V.basis.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0);
    for (int i = 0; i <= n; ++i) V.basis[static_cast<std::size_t>(i) * (n + 1) + i] = 1;
    return V;
}

LinearSubspace sample_uniform(const FieldCtx& F, int n, int m, RngStream& rng) {
    if (n < 0 || m < 0 || m > n) throw InputError("subspace codimension must satisfy 0 <= m <= n");
    if (m == 0) return full_space(F, n);
    const int r = n + 1 - m;
    const int cols = n + 1;
    const std::uint32_t Q = static_cast<std::uint32_t>(F.size());
    std::vector<Felem> M(static_cast<std::size_t>(r) * cols);
    for (;;) {
        for (auto& x : M) x = rng.bounded(Q);
        std::vector<Felem> R = M;
        if (rref_in_place(F, R, r, cols) == r) {
            LinearSubspace V;
            V.F = &F;
            V.n = n;
            V.m = m;
            V.basis = std::move(R);
            return V;
        }
    }
}

void enumerate_nested_pairs(
    const FieldCtx& F, int n, int m, std::uint64_t budget,
    const std::function<void(const LinearSubspace&, const LinearSubspace&)>& fn) {
    if (n < 0 || m < 0 || m > n) throw InputError("subspace codimension must satisfy 0 <= m <= n");
    if (m == 0) return;  // no W of codimension -1
    const int rw = n + 2 - m;  // rows of W
    BigInt pairs = subspace_count(F, n, m - 1) * gaussian_binomial(rw, rw - 1, BigInt(F.size()));
    if (pairs > budget)
        throw BudgetError("nested-pair enumeration would yield " + pairs.str() +
                          " pairs, over the budget of " + std::to_string(budget));

    const int cols = n + 1;
    enumerate_subspaces(F, n, m - 1, budget, [&](const LinearSubspace& W) {
        // codim-1 subspaces of W's row space, as coefficient matrices
        enumerate_subspaces(F, rw - 1, 1, budget, [&](const LinearSubspace& C) {
            const int rv = rw - 1;
            LinearSubspace V;
            V.F = &F;
            V.n = n;
            V.m = m;
            V.basis.assign(static_cast<std::size_t>(rv) * cols, 0);
            for (int i = 0; i < rv; ++i) {
                for (int j = 0; j < rw; ++j) {
                    Felem cij = C.basis[static_cast<std::size_t>(i) * rw + j];
                    if (cij == 0) continue;
                    for (int c = 0; c < cols; ++c) {
                        auto& x = V.basis[static_cast<std::size_t>(i) * cols + c];
                        x = F.add(x, F.mul(cij, W.basis[static_cast<std::size_t>(j) * cols + c]));
                    }
                }
            }
            if (rref_in_place(F, V.basis, rv, cols) != rv)
                throw InternalError("nested-pair construction produced a rank-deficient subspace");
            fn(V, W);
        });
    });
}

std::vector<std::string> subspace_row_strings(const LinearSubspace& V) {
    std::vector<std::string> out;
    for (int i = 0; i < V.rows(); ++i) out.push_back(point_to_string(*V.F, V.row(i)));
    return out;
}

}  // namespace qslice
