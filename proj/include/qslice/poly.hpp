#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qslice/gf.hpp"
#include "qslice/projspace.hpp"

namespace qslice {

// Sparse homogeneous polynomial: exponent vector -> nonzero coefficient.
// The zero polynomial is an empty term list with a declared degree.
class HomogPoly {
public:
    struct Term {
        std::vector<std::uint16_t> exp;  // length nvars, entries sum to degree
        Felem coeff;                     // nonzero
    };

    HomogPoly() = default;
    HomogPoly(const FieldCtx& F, int nvars, int degree) : F_(&F), nvars_(nvars), degree_(degree) {}

    const FieldCtx& field() const { return *F_; }
    const FieldCtx* field_ptr() const { return F_; }
    int nvars() const { return nvars_; }
    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    // Terms must be canonical: sorted by exponent vector, nonzero coefficients.
    static HomogPoly from_terms(const FieldCtx& F, int nvars, int degree, std::vector<Term> terms);

    Felem evaluate(std::span<const Felem> coords) const;
    HomogPoly derivative(int var) const;

    bool operator==(const HomogPoly& o) const;

    std::string to_string() const;  // debug rendering, x0..xn syntax

private:
    const FieldCtx* F_ = nullptr;
    int nvars_ = 0;
    int degree_ = 0;
    std::vector<Term> terms_;
};

// Parses the expression grammar: variables x0..xn, integer literals, + - * ^,
// parentheses; implicit multiplication is a syntax error. The result must be
// homogeneous. Errors carry 1-based character positions.
HomogPoly parse_poly(const std::string& src, int n, const FieldCtx& F);

// Coefficient-wise embedding into an extension field.
HomogPoly embed_poly(const HomogPoly& f, const FieldCtx& dst);

// Substitution x = L * y with L an nvars x r matrix (row-major): the pullback
// of f along a linear parametrization, a homogeneous polynomial in r variables
// of the same degree (possibly zero).
HomogPoly substitute_linear(const HomogPoly& f, std::span<const Felem> L, int r);

// Binary form c_0 s^d + c_1 s^(d-1) t + ... + c_d t^d.
struct BinaryForm {
    const FieldCtx* F = nullptr;
    std::vector<Felem> c;  // length degree + 1

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const;
    Felem evaluate(Felem s, Felem t) const;
};

// g(s,t) = f(s*P0 + t*P1); identically zero iff the line through P0,P1 lies in Z(f).
BinaryForm restrict_to_line(const HomogPoly& f, const ProjPoint& P0, const ProjPoint& P1);

BinaryForm embed_form(const BinaryForm& g, const FieldCtx& dst);

// Exact division of g by the linear form u*s + v*t; nullopt when not divisible.
std::optional<BinaryForm> divide_linear(const BinaryForm& g, Felem u, Felem v);

struct FormRoot {
    Felem s, t;  // normalized projective root (s:t)
    int multiplicity;
};

// All projective roots of g over ext with multiplicities (repeated synthetic
// division), in P^1 enumeration order. Σ multiplicity <= deg g, with equality
// iff g splits over ext. ext must be an extension of g's field.
std::vector<FormRoot> root_multiplicities(const BinaryForm& g, const FieldCtx& ext);

// Multiset of root multiplicities over the algebraic closure, computed in one
// extension of relative degree lcm(1..d) (every root of a degree-d binary form
// lives in a relative extension of degree <= d). Sorted descending; sums to d.
std::vector<int> splitting_pattern(const BinaryForm& g, int max_ext_degree = 64);

// Verdict of the bounded absolute-irreducibility test for plane forms of
// degree 2 or 3: either absolutely irreducible, or a witness linear factor
// together with the relative degree of its field of definition.
struct FactorVerdict {
    bool absolutely_irreducible = false;
    std::vector<Felem> witness;  // 3 coefficients over the witness field, normalized
    int witness_ext_degree = 0;  // j: witness lives over F_{q^j}
};

FactorVerdict linear_factor_search(const HomogPoly& f, std::uint64_t budget = 1ull << 24);

// The exhaustive scan over linear forms per extension degree j = 1..d. Same
// contract; used directly by cross-check tests and as the general route.
FactorVerdict linear_factor_search_exhaustive(const HomogPoly& f, std::uint64_t budget = 1ull << 24);

}  // namespace qslice
