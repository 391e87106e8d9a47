#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qslice/budget.hpp"
#include "qslice/linsub.hpp"
#include "qslice/poly.hpp"

namespace qslice {

using Rational = boost::multiprecision::cpp_rational;

// Declared data of a variety X over F_q, q = p^e: ambient P^n, dimension m
// (= codimension of the slicing subspaces), degree d, and its defining forms.
// m and d are trusted inputs; degree_sanity probes them, nothing proves them.
struct VarietySpec {
    std::uint32_t p = 0;
    std::uint32_t e = 1;
    int n = 0;
    int m = 0;
    int d = 0;
    std::vector<std::string> form_texts;

    // Line-oriented key=value format, '#' comment lines, poly="..." entries.
    static VarietySpec parse_string(const std::string& text);
    static VarietySpec parse_file(const std::string& path);
};

// Rational points of X over one extension level, flat storage.
struct PointSet {
    const FieldCtx* F = nullptr;
    int n = 0;
    int N = 1;
    std::size_t count = 0;
    std::vector<Felem> flat;  // count * (n+1)

    std::span<const Felem> point(std::size_t i) const {
        return std::span<const Felem>(flat).subspan(i * (n + 1), n + 1);
    }
};

// A parsed variety plus per-level caches (embedded forms, point sets).
// Point enumeration happens once per level; the caches are mutex-guarded so
// parallel consumers see one consistent copy.
class Variety {
public:
    explicit Variety(VarietySpec spec);

    const VarietySpec& spec() const { return spec_; }
    const FieldCtx& base() const { return *base_; }
    const std::vector<HomogPoly>& forms() const { return forms_; }

    const FieldCtx& field_at(int N) const;  // F_{p^(e*N)}
    const std::vector<HomogPoly>& forms_over(int N);
    const PointSet& points_over(int N, std::uint64_t max_points);

    // True iff every defining form pulls back to the zero form on V.
    bool forms_vanish_on(const LinearSubspace& V, int N);

private:
    VarietySpec spec_;
    const FieldCtx* base_;
    std::vector<HomogPoly> forms_;
    std::mutex mtx_;
    std::map<int, std::vector<HomogPoly>> forms_cache_;
    std::map<int, std::unique_ptr<PointSet>> points_cache_;
};

std::uint64_t intersection_count(const PointSet& pts, const LinearSubspace& V);

struct SanityLevel {
    int N = 1;
    std::uint64_t max_finite = 0;  // over subspaces with a nonzero restriction
    bool attained = false;         // max_finite == declared d at this level
};

struct SanityReport {
    int declared_degree = 0;
    std::vector<SanityLevel> levels;
    std::vector<std::string> warnings;
};

// Probes the declared degree: the maximum finite intersection count should be
// <= d everywhere and reach d at some level. Warnings only.
SanityReport degree_sanity(Variety& var, int n_probe, const Budget& budget);

struct MuReport {
    int N = 1;
    BigInt total;        // hyperplanes of P^3(F_{q^N})
    BigInt irreducible;  // slices that are absolutely irreducible
    Rational mu;
};

// Fraction of hyperplanes of P^3 whose slice of the (degree <= 3) hypersurface
// is absolutely irreducible. Exact rational.
MuReport slice_irreducibility_density(Variety& var, int N, const Budget& budget);

}  // namespace qslice
