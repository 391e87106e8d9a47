#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qslice/gf.hpp"

namespace qslice {

using BigInt = boost::multiprecision::cpp_int;

// Point of P^n(F), always stored normalized: first nonzero coordinate is 1.
// Equality of classes is then plain coordinate equality.
struct ProjPoint {
    std::vector<Felem> c;

    bool operator==(const ProjPoint& o) const { return c == o.c; }
    bool operator!=(const ProjPoint& o) const { return c != o.c; }
};

ProjPoint normalize(const FieldCtx& F, std::vector<Felem> raw);
void normalize_in_place(const FieldCtx& F, std::span<Felem> v);  // throws on zero vector

// |P^n(F_Q)| = (Q^(n+1) - 1) / (Q - 1)
BigInt projective_point_count(std::uint64_t Q, int n);

// Enumerates P^n(F) exactly once in the fixed order: points whose leading 1
// sits at coordinate 0 first (remaining coordinates odometer-ordered, last
// coordinate fastest), then leading 1 at coordinate 1, and so on.
// `budget` caps the number of points yielded (BudgetError if exceeded).
void for_each_projective_point(const FieldCtx& F, int n, std::uint64_t budget,
                               const std::function<void(std::span<const Felem>)>& fn);

std::vector<ProjPoint> enumerate_points(const FieldCtx& F, int n, std::uint64_t budget);

// "(0:1:2)"; extension coordinates rendered as bracketed residue lists.
std::string point_to_string(const FieldCtx& F, std::span<const Felem> coords);

}  // namespace qslice
