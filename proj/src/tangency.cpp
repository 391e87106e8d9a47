#include "qslice/tangency.hpp"

#include <algorithm>
#include <numeric>

namespace qslice {

namespace {

std::uint32_t lcm_upto(int d) {
    std::uint64_t l = 1;
    for (int i = 2; i <= d; ++i) l = std::lcm<std::uint64_t>(l, i);
    return static_cast<std::uint32_t>(l);
}

const FieldCtx& splitting_field(const FieldCtx& F, int d) {
    const std::uint64_t rel = lcm_upto(d);
    const std::uint64_t abs_deg = rel * F.degree();
    std::uint64_t size = 1;
    for (std::uint64_t i = 0; i < abs_deg; ++i) {
        size *= F.p();
        if (size > FieldCtx::kMaxSize)
            throw BudgetError("splitting field for degree " + std::to_string(d) +
                              " exceeds the field-size cap at this level");
    }
    return FieldCtx::get(F.p(), static_cast<std::uint32_t>(abs_deg));
}

bool is_target_pattern(const std::vector<int>& pattern, int d) {
    if (static_cast<int>(pattern.size()) != d - 1) return false;
    if (pattern[0] != 2) return false;
    return std::all_of(pattern.begin() + 1, pattern.end(), [](int m) { return m == 1; });
}

}  // namespace

LinePattern line_pattern(const HomogPoly& curve, const LinearSubspace& line) {
    if (curve.nvars() != 3) throw InputError("line pattern expects a plane curve");
    if (line.n != 2 || line.m != 1 || line.F != curve.field_ptr())
        throw InputError("line pattern expects a line of the curve's plane");
    BinaryForm g = restrict_to_line(curve, line.row_point(0), line.row_point(1));
    LinePattern out;
    if (g.is_zero()) {
        out.contained = true;
        return out;
    }
    out.pattern = splitting_pattern(g);
    return out;
}

TangencyReport curve_has_simple_tangency(const HomogPoly& curve, int n_max, const Budget& budget) {
    if (curve.nvars() != 3) throw InputError("simple tangency expects a plane curve");
    const int d = curve.degree();
    if (d < 2) throw InputError("simple tangency is undefined for degree < 2");
    if (n_max < 1) throw InputError("tangency search needs n_max >= 1");

    const FieldCtx& base = curve.field();

    TangencyReport report;
    if (base.p() == 2)
        report.advisory =
            "characteristic 2: smooth conics are strange curves; tangency may not exist over any level";

    // p-th power curves have identically vanishing partials; no smooth points
    std::vector<HomogPoly> partials;
    bool all_partials_zero = true;
    for (int i = 0; i < 3; ++i) {
        partials.push_back(curve.derivative(i));
        if (!partials.back().is_zero()) all_partials_zero = false;
    }
    report.degenerate = all_partials_zero;

    for (int j = 1; j <= n_max; ++j) {
        report.levels_searched.push_back(j);
        const std::uint64_t abs_deg = static_cast<std::uint64_t>(base.degree()) * j;
        std::uint64_t size = 1;
        bool over_cap = false;
        for (std::uint64_t i = 0; i < abs_deg; ++i) {
            size *= base.p();
            if (size > FieldCtx::kMaxSize) {
                over_cap = true;
                break;
            }
        }
        if (over_cap)
            throw BudgetError("tangency level " + std::to_string(j) + " exceeds the field-size cap");
        const FieldCtx& Fj = FieldCtx::get(base.p(), static_cast<std::uint32_t>(abs_deg));
        HomogPoly fj = embed_poly(curve, Fj);
        const FieldCtx& ext = splitting_field(Fj, d);
        HomogPoly fext = embed_poly(curve, ext);
        std::vector<HomogPoly> partials_ext;
        for (const auto& df : partials) partials_ext.push_back(embed_poly(df, ext));
        const Embedding& lift = get_embedding(Fj, ext);

        bool found = false;
        TangencyReport hit;
        enumerate_subspaces(Fj, 2, 1, budget.max_subspaces, [&](const LinearSubspace& line) {
            if (found) return;
            BinaryForm g = restrict_to_line(fj, line.row_point(0), line.row_point(1));
            if (g.is_zero()) return;  // line inside the curve
            auto roots = root_multiplicities(g, ext);
            std::vector<int> pattern;
            int sum = 0;
            for (const auto& rt : roots) {
                pattern.push_back(rt.multiplicity);
                sum += rt.multiplicity;
            }
            if (sum != d)
                throw InternalError("restriction does not split over the lcm extension");
            std::sort(pattern.begin(), pattern.end(), std::greater<int>());
            if (!is_target_pattern(pattern, d)) return;

            // the double point must be a smooth point of the curve
            const FormRoot* dbl = nullptr;
            for (const auto& rt : roots)
                if (rt.multiplicity == 2) dbl = &rt;
            std::vector<Felem> P(3);
            for (int c = 0; c < 3; ++c) {
                Felem a = lift(line.row(0)[c]);
                Felem b = lift(line.row(1)[c]);
                P[c] = ext.add(ext.mul(dbl->s, a), ext.mul(dbl->t, b));
            }
            bool smooth = false;
            for (const auto& df : partials_ext) {
                if (!df.is_zero() && df.evaluate(std::span<const Felem>(P)) != 0) {
                    smooth = true;
                    break;
                }
            }
            if (!smooth) return;

            hit.found = true;
            hit.level = j;
            hit.pattern = pattern;
            hit.witness_line_rows.push_back(
                std::vector<Felem>(line.row(0).begin(), line.row(0).end()));
            hit.witness_line_rows.push_back(
                std::vector<Felem>(line.row(1).begin(), line.row(1).end()));
            found = true;
        });
        if (found) {
            hit.levels_searched = report.levels_searched;
            hit.degenerate = report.degenerate;
            hit.advisory = report.advisory;
            return hit;
        }
    }
    return report;
}

TangencyReport variety_has_simple_tangency(Variety& var, int trials, int n_max,
                                           std::uint64_t seed, const Budget& budget) {
    const auto& spec = var.spec();
    if (spec.m < 2) throw InputError("the slicing search needs dim X >= 2");
    if (var.forms().size() != 1 || spec.m != spec.n - 1)
        throw InputError("the slicing search supports hypersurfaces only (m = n-1, one form)");
    if (trials < 0) throw InputError("trials must be >= 0");

    const FieldCtx& base = var.base();
    const HomogPoly& f = var.forms()[0];
    RngStream rng(seed, 0);

    TangencyReport report;
    if (base.p() == 2)
        report.advisory =
            "characteristic 2: smooth conics are strange curves; tangency may not exist over any level";
    for (int t = 0; t < trials; ++t) {
        LinearSubspace W = sample_uniform(base, spec.n, spec.m - 1, rng);
        report.trials_used = t + 1;
        // restrict to the plane W: x = sum_j y_j * row_j
        const int nv = spec.n + 1;
        std::vector<Felem> L(static_cast<std::size_t>(nv) * 3);
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < 3; ++j)
                L[static_cast<std::size_t>(i) * 3 + j] = W.basis[static_cast<std::size_t>(j) * nv + i];
        HomogPoly slice = substitute_linear(f, L, 3);
        if (slice.is_zero()) continue;  // the plane lies inside X
        if (slice.degree() < 2) continue;
        TangencyReport curve_report = curve_has_simple_tangency(slice, n_max, budget);
        if (curve_report.found) {
            curve_report.trials_used = t + 1;
            for (int i = 0; i < W.rows(); ++i)
                curve_report.slicing_rows.push_back(
                    std::vector<Felem>(W.row(i).begin(), W.row(i).end()));
            return curve_report;
        }
        report.levels_searched = curve_report.levels_searched;
        report.degenerate = curve_report.degenerate;
    }
    return report;
}

}  // namespace qslice
