#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qslice/gf.hpp"
#include "qslice/projspace.hpp"
#include "qslice/rng.hpp"

namespace qslice {

// Codimension-m projective linear subspace of P^n, stored as the unique
// reduced row-echelon basis of its underlying (n+1-m)-dimensional linear
// subspace. Rows are ordered by pivot column; equality is matrix equality.
struct LinearSubspace {
    const FieldCtx* F = nullptr;
    int n = 0;  // ambient projective dimension
    int m = 0;  // codimension
    std::vector<Felem> basis;  // r x (n+1) row-major, r = n+1-m

    int rows() const { return n + 1 - m; }
    int cols() const { return n + 1; }
    std::span<const Felem> row(int i) const {
        return std::span<const Felem>(basis).subspan(static_cast<std::size_t>(i) * cols(), cols());
    }
    ProjPoint row_point(int i) const;

    bool operator==(const LinearSubspace& o) const {
        return n == o.n && m == o.m && basis == o.basis;
    }
};

// Number of b-dimensional linear subspaces of F_Q^a (q-binomial), exact.
BigInt gaussian_binomial(int a, int b, const BigInt& Q);

// |J_m| = number of codimension-m projective subspaces of P^n(F).
BigInt subspace_count(const FieldCtx& F, int n, int m);

// Rational points of the subspace: (Q^r - 1)/(Q - 1).
BigInt subspace_rational_points(const LinearSubspace& V);

// Reduced row-echelon form in place; returns the rank. Zero rows sink to the
// bottom.
int rref_in_place(const FieldCtx& F, std::vector<Felem>& M, int rows, int cols);

// Random-access enumeration of J_m in the fixed order: pivot-column patterns
// in colexicographic order, then the free entries odometer-ordered (row-major
// position list, last position fastest).
class SubspaceEnumerator {
public:
    SubspaceEnumerator(const FieldCtx& F, int n, int m);

    const BigInt& total() const { return total_; }
    LinearSubspace at(const BigInt& index) const;

    // Calls fn for index in [begin, end), in order, reusing one subspace object.
    void for_range(const BigInt& begin, const BigInt& end,
                   const std::function<void(const LinearSubspace&)>& fn) const;

private:
    struct Pattern {
        std::vector<int> pivots;               // ascending
        std::vector<std::pair<int, int>> free;  // (row, col), row-major order
        BigInt count;                           // Q^{#free}
        BigInt cum_begin;
    };

    LinearSubspace make(const Pattern& pat, BigInt offset) const;

    const FieldCtx* F_;
    int n_, m_, r_;
    std::vector<Pattern> patterns_;
    BigInt total_;
};

// Enumerates every codimension-m subspace exactly once. BudgetError if |J_m|
// exceeds budget.
void enumerate_subspaces(const FieldCtx& F, int n, int m, std::uint64_t budget,
                         const std::function<void(const LinearSubspace&)>& fn);

bool contains(const LinearSubspace& V, std::span<const Felem> point);

LinearSubspace full_space(const FieldCtx& F, int n);

// Uniform over J_m: uniform random r x (n+1) matrices, rejecting rank-deficient
// ones, canonicalized to RREF. Every subspace has |GL_r| full-rank
// representatives, hence uniformity.
LinearSubspace sample_uniform(const FieldCtx& F, int n, int m, RngStream& rng);

// All incident pairs (V, W), V of codimension m contained in W of codimension
// m-1. Empty for m = 0.
void enumerate_nested_pairs(
    const FieldCtx& F, int n, int m, std::uint64_t budget,
    const std::function<void(const LinearSubspace&, const LinearSubspace&)>& fn);

std::vector<std::string> subspace_row_strings(const LinearSubspace& V);

}  // namespace qslice
