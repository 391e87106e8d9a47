#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qslice/variety.hpp"

using namespace qslice;

namespace {

Variety make(const std::string& text) { return Variety(VarietySpec::parse_string(text)); }

const char* kConic3 = "p=3\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\"\n";

}  // namespace

TEST_CASE("spec file parsing") {
    VarietySpec spec = VarietySpec::parse_string(
        "# a comment\n"
        "p=3\n"
        "e=1\n"
        "n=2\n"
        "m=1\n"
        "d=2\n"
        "poly=\"x0*x2 - x1^2\"\n");
    CHECK(spec.p == 3);
    CHECK(spec.e == 1);
    CHECK(spec.n == 2);
    CHECK(spec.m == 1);
    CHECK(spec.d == 2);
    REQUIRE(spec.form_texts.size() == 1);
    CHECK(spec.form_texts[0] == "x0*x2 - x1^2");

    CHECK(VarietySpec::parse_file(std::string(QSLICE_TEST_DATA) + "/conic3.var").p == 3);

    CHECK_THROWS_AS(VarietySpec::parse_string("p=3\nn=2\nm=1\nd=2\n"), InputError);  // no poly
    CHECK_THROWS_AS(VarietySpec::parse_string("n=2\nm=1\nd=2\npoly=\"x0\"\n"), InputError);
    CHECK_THROWS_AS(VarietySpec::parse_string("p=3\nn=2\nm=1\nd=2\npoly=x0\n"), InputError);
    CHECK_THROWS_AS(VarietySpec::parse_string("p=3\nn=2\nm=3\nd=2\npoly=\"x0^2\"\n"), InputError);
    CHECK_THROWS_AS(VarietySpec::parse_string("p=3\nn=2\nm=1\nd=2\nbogus=1\npoly=\"x0^2\"\n"),
                    InputError);
    CHECK_THROWS_AS(VarietySpec::parse_file("/nonexistent/x.var"), InputError);
    // a form that cancels to zero is rejected
    CHECK_THROWS_AS(make("p=3\nn=2\nm=1\nd=2\npoly=\"x0^2 - x0^2\"\n"), InputError);
}

TEST_CASE("point enumeration over extensions") {
    Budget budget;
    Variety conic = make(kConic3);

    const PointSet& p1 = conic.points_over(1, budget.max_points);
    CHECK(p1.count == 4);  // q + 1
    const PointSet& p2 = conic.points_over(2, budget.max_points);
    CHECK(p2.count == 10);  // q^2 + 1

    // smooth conic: q^N + 1 points at every probed level (classical count)
    for (int N = 3; N <= 4; ++N) {
        std::uint64_t qn = 1;
        for (int i = 0; i < N; ++i) qn *= 3;
        CHECK(conic.points_over(N, budget.max_points).count == qn + 1);
    }

    // every returned point satisfies every form
    const auto& forms = conic.forms_over(2);
    for (std::size_t i = 0; i < p2.count; ++i) {
        for (const auto& f : forms) CHECK(f.evaluate(p2.point(i)) == 0);
    }
    // normalized and duplicate-free
    std::set<std::vector<Felem>> uniq;
    for (std::size_t i = 0; i < p2.count; ++i) {
        auto pt = p2.point(i);
        std::vector<Felem> v(pt.begin(), pt.end());
        CHECK(normalize(*p2.F, v) == ProjPoint{v});
        uniq.insert(v);
    }
    CHECK(uniq.size() == p2.count);

    Variety hyper = make("p=2\nn=2\nm=1\nd=1\npoly=\"x0\"\n");
    CHECK(hyper.points_over(1, budget.max_points).count == 3);  // a line over F_2

    Variety tight = make(kConic3);
    CHECK_THROWS_AS(tight.points_over(1, 2), BudgetError);
}

TEST_CASE("intersection counting against lines") {
    Budget budget;
    Variety conic = make(kConic3);
    const FieldCtx& f3 = conic.base();
    const PointSet& X = conic.points_over(1, budget.max_points);

    // tangent line {x2 = 0} meets the conic only at (1:0:0)
    LinearSubspace tangent;
    tangent.F = &f3;
    tangent.n = 2;
    tangent.m = 1;
    tangent.basis = {1, 0, 0, 0, 1, 0};
    CHECK(intersection_count(X, tangent) == 1);

    // full space: every point
    CHECK(intersection_count(X, full_space(f3, 2)) == X.count);

    // brute force: exactly 3 external lines (k = 0), matching 13 = 3+4+6
    int external = 0;
    enumerate_subspaces(f3, 2, 1, budget.max_subspaces, [&](const LinearSubspace& V) {
        if (intersection_count(X, V) == 0) ++external;
    });
    CHECK(external == 3);

    // mismatched field is an error
    Variety conic2 = make("p=2\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\"\n");
    const PointSet& Y = conic2.points_over(1, budget.max_points);
    CHECK_THROWS_AS(intersection_count(Y, tangent), InputError);
}

TEST_CASE("forms_vanish_on") {
    Variety line = make("p=3\nn=2\nm=1\nd=1\npoly=\"x0\"\n");
    const FieldCtx& f3 = line.base();
    LinearSubspace self;
    self.F = &f3;
    self.n = 2;
    self.m = 1;
    self.basis = {0, 1, 0, 0, 0, 1};  // {x0 = 0}
    CHECK(line.forms_vanish_on(self, 1));
    LinearSubspace other;
    other.F = &f3;
    other.n = 2;
    other.m = 1;
    other.basis = {1, 0, 0, 0, 1, 0};
    CHECK_FALSE(line.forms_vanish_on(other, 1));
}

TEST_CASE("degree sanity") {
    Budget budget;
    Variety conic = make(kConic3);
    SanityReport r = degree_sanity(conic, 1, budget);
    REQUIRE(r.levels.size() == 1);
    CHECK(r.levels[0].max_finite == 2);  // secants exist over F_3
    CHECK(r.levels[0].attained);
    CHECK(r.warnings.empty());

    // the line: the subspace equal to X is excluded, leaving max 1
    Variety line = make("p=2\nn=2\nm=1\nd=1\npoly=\"x0\"\n");
    r = degree_sanity(line, 1, budget);
    CHECK(r.levels[0].max_finite == 1);
    CHECK(r.levels[0].attained);

    // declared degree too high: warning, never a failure
    Variety fake = make("p=3\nn=2\nm=1\nd=5\npoly=\"x0*x2 - x1^2\"\n");
    r = degree_sanity(fake, 1, budget);
    CHECK(r.levels[0].max_finite == 2);
    CHECK_FALSE(r.levels[0].attained);
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("slice irreducibility density: quadric fixtures") {
    Budget budget;
    Variety quadric = make("p=3\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"\n");

    MuReport m1 = slice_irreducibility_density(quadric, 1, budget);
    CHECK(m1.total == 40);
    CHECK(m1.irreducible == 24);
    CHECK(m1.mu == Rational(24, 40));

    MuReport m2 = slice_irreducibility_density(quadric, 2, budget);
    CHECK(m2.total == 820);
    CHECK(m2.irreducible == 720);
    CHECK(m2.mu == Rational(720, 820));

    // deficit shrinks by at least a factor q
    Rational deficit1 = Rational(1) - m1.mu;
    Rational deficit2 = Rational(1) - m2.mu;
    CHECK(deficit1 >= Rational(3) * deficit2);

    // unsupported degree is an explicit error
    Variety quartic = make("p=3\nn=3\nm=2\nd=4\npoly=\"x0^4 + x1^4 + x2^4 + x3^4\"\n");
    CHECK_THROWS_AS(slice_irreducibility_density(quartic, 1, budget), InputError);
    Variety plane_curve = make(kConic3);
    CHECK_THROWS_AS(slice_irreducibility_density(plane_curve, 1, budget), InputError);
}
