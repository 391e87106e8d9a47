#include "qslice/variety.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace qslice {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InputError("variety spec: key '" + key + "' needs an unsigned integer, got '" +
                         value + "'");
    }
}

}  // namespace

VarietySpec VarietySpec::parse_string(const std::string& text) {
    VarietySpec spec;
    bool saw_p = false, saw_n = false, saw_m = false, saw_d = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError("variety spec line " + std::to_string(lineno) +
                             ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "p") {
            spec.p = static_cast<std::uint32_t>(parse_uint(key, value));
            saw_p = true;
        } else if (key == "e") {
            spec.e = static_cast<std::uint32_t>(parse_uint(key, value));
        } else if (key == "n") {
            spec.n = static_cast<int>(parse_uint(key, value));
            saw_n = true;
        } else if (key == "m") {
            spec.m = static_cast<int>(parse_uint(key, value));
            saw_m = true;
        } else if (key == "d") {
            spec.d = static_cast<int>(parse_uint(key, value));
            saw_d = true;
        } else if (key == "poly") {
            if (value.size() < 2 || value.front() != '"' || value.back() != '"')
                throw InputError("variety spec line " + std::to_string(lineno) +
                                 ": poly value must be double-quoted");
            spec.form_texts.push_back(value.substr(1, value.size() - 2));
        } else {
            throw InputError("variety spec line " + std::to_string(lineno) + ": unknown key '" +
                             key + "'");
        }
    }
    if (!saw_p || !saw_n || !saw_m || !saw_d)
        throw InputError("variety spec: keys p, n, m, d are required");
    if (spec.form_texts.empty()) throw InputError("variety spec: at least one poly=\"...\" required");
    if (spec.e < 1) throw InputError("variety spec: e must be >= 1");
    if (spec.m < 1 || spec.m > spec.n)
        throw InputError("variety spec: dimension m must satisfy 1 <= m <= n");
    if (spec.d < 1) throw InputError("variety spec: degree d must be >= 1");
    return spec;
}

VarietySpec VarietySpec::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open variety spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

Variety::Variety(VarietySpec spec) : spec_(std::move(spec)) {
    base_ = &FieldCtx::get(spec_.p, spec_.e);
    for (const auto& text : spec_.form_texts) {
        HomogPoly f = parse_poly(text, spec_.n, *base_);
        if (f.is_zero()) throw InputError("variety spec: form '" + text + "' is identically zero");
        forms_.push_back(std::move(f));
    }
}

const FieldCtx& Variety::field_at(int N) const {
    if (N < 1) throw InputError("extension level N must be >= 1");
    return FieldCtx::get(spec_.p, spec_.e * static_cast<std::uint32_t>(N));
}

const std::vector<HomogPoly>& Variety::forms_over(int N) {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = forms_cache_.find(N);
    if (it == forms_cache_.end()) {
        const FieldCtx& ext = field_at(N);
        std::vector<HomogPoly> lifted;
        for (const auto& f : forms_) lifted.push_back(embed_poly(f, ext));
        it = forms_cache_.emplace(N, std::move(lifted)).first;
    }
    return it->second;
}

const PointSet& Variety::points_over(int N, std::uint64_t max_points) {
    {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = points_cache_.find(N);
        if (it != points_cache_.end()) return *it->second;
    }
    const FieldCtx& ext = field_at(N);
    const auto& lifted = forms_over(N);

    auto ps = std::make_unique<PointSet>();
    ps->F = &ext;
    ps->n = spec_.n;
    ps->N = N;
    for_each_projective_point(ext, spec_.n, max_points, [&](std::span<const Felem> pt) {
        for (const auto& f : lifted) {
            if (f.evaluate(pt) != 0) return;
        }
        ps->flat.insert(ps->flat.end(), pt.begin(), pt.end());
        ++ps->count;
    });

    std::lock_guard<std::mutex> lock(mtx_);
    auto it = points_cache_.find(N);
    if (it == points_cache_.end()) it = points_cache_.emplace(N, std::move(ps)).first;
    return *it->second;
}

bool Variety::forms_vanish_on(const LinearSubspace& V, int N) {
    const auto& lifted = forms_over(N);
    const int nv = spec_.n + 1;
    const int r = V.rows();
    std::vector<Felem> L(static_cast<std::size_t>(nv) * r);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < r; ++j) L[static_cast<std::size_t>(i) * r + j] = V.basis[static_cast<std::size_t>(j) * nv + i];
    for (const auto& f : lifted) {
        if (!substitute_linear(f, L, r).is_zero()) return false;
    }
    return true;
}

std::uint64_t intersection_count(const PointSet& pts, const LinearSubspace& V) {
    if (pts.F != V.F) throw InputError("intersection count requires matching fields");
    if (pts.n != V.n) throw InputError("intersection count requires matching ambient spaces");
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < pts.count; ++i) {
        if (contains(V, pts.point(i))) ++k;
    }
    return k;
}

SanityReport degree_sanity(Variety& var, int n_probe, const Budget& budget) {
    const auto& spec = var.spec();
    SanityReport report;
    report.declared_degree = spec.d;
    bool attained_anywhere = false;
    bool exceeded = false;
    for (int N = 1; N <= n_probe; ++N) {
        const FieldCtx& ext = var.field_at(N);
        const PointSet& X = var.points_over(N, budget.max_points);
        SanityLevel lvl;
        lvl.N = N;
        enumerate_subspaces(ext, spec.n, spec.m, budget.max_subspaces,
                            [&](const LinearSubspace& V) {
                                std::uint64_t k = intersection_count(X, V);
                                if (k == 0) return;
                                // a subspace the forms die on is not a finite slice
                                BigInt vp = subspace_rational_points(V);
                                if (vp == k && var.forms_vanish_on(V, N)) return;
                                lvl.max_finite = std::max(lvl.max_finite, k);
                            });
        lvl.attained = (lvl.max_finite == static_cast<std::uint64_t>(spec.d));
        if (lvl.attained) attained_anywhere = true;
        if (lvl.max_finite > static_cast<std::uint64_t>(spec.d)) exceeded = true;
        report.levels.push_back(lvl);
    }
    if (exceeded)
        report.warnings.push_back(
            "a subspace meets X in more than d points; the declared degree looks wrong");
    if (!attained_anywhere)
        report.warnings.push_back(
            "no probed subspace attained the declared degree d; small fields can miss it");
    return report;
}

MuReport slice_irreducibility_density(Variety& var, int N, const Budget& budget) {
    const auto& spec = var.spec();
    if (spec.n != 3 || var.forms().size() != 1)
        throw InputError("slice irreducibility density expects a hypersurface in P^3");
    if (spec.d > 3)
        throw InputError("unsupported degree " + std::to_string(spec.d) +
                         " for slice irreducibility (supported: d <= 3)");
    if (var.forms()[0].degree() != spec.d)
        throw InputError("declared degree does not match the defining form");

    const FieldCtx& ext = var.field_at(N);
    const auto& lifted = var.forms_over(N);
    const HomogPoly& f = lifted[0];

    MuReport report;
    report.N = N;
    report.total = subspace_count(ext, 3, 1);
    report.irreducible = 0;

    enumerate_subspaces(ext, 3, 1, budget.max_subspaces, [&](const LinearSubspace& G) {
        // parametrize the hyperplane by its three spanning rows
        std::vector<Felem> L(4 * 3);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) L[static_cast<std::size_t>(i) * 3 + j] = G.basis[static_cast<std::size_t>(j) * 4 + i];
        HomogPoly slice = substitute_linear(f, L, 3);
        bool irr;
        if (slice.is_zero()) {
            irr = false;  // the hyperplane lies inside X
        } else if (spec.d == 1) {
            irr = true;  // linear slices are irreducible
        } else {
            irr = linear_factor_search(slice).absolutely_irreducible;
        }
        if (irr) report.irreducible += 1;
    });

    report.mu = Rational(report.irreducible, report.total);
    return report;
}

}  // namespace qslice
