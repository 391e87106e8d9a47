#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qslice/report.hpp"
#include "qslice/stats.hpp"

using namespace qslice;

namespace {

Variety make(const std::string& text) { return Variety(VarietySpec::parse_string(text)); }

const char* kConic3 = "p=3\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\"\n";
const char* kConic2 = "p=2\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\"\n";
const char* kCubic3 = "p=3\nn=2\nm=1\nd=3\npoly=\"x1^2*x2 - x0^2*(x0 + x2)\"\n";
const char* kCubic2 = "p=2\nn=2\nm=1\nd=3\npoly=\"x1^2*x2 - x0^2*(x0 + x2)\"\n";
const char* kLine2 = "p=2\nn=2\nm=1\nd=1\npoly=\"x0\"\n";

// Independent derangement-identity oracle: p_k = (1/k!) * sum_{j=0}^{d-k} (-1)^j / j!
Rational oracle_pk(int d, int k) {
    BigInt kfact = 1;
    for (int i = 2; i <= k; ++i) kfact *= i;
    Rational inner = 0;
    BigInt jfact = 1;
    for (int j = 0; j <= d - k; ++j) {
        if (j > 1) jfact *= j;
        Rational term(1, jfact);
        if (j % 2 != 0) term = -term;
        inner += term;
    }
    return inner / Rational(kfact);
}

// Fully independent double-loop brute force over a prime field: every line
// (dual point, raw modular ints) against every projective point.
std::map<std::uint64_t, std::uint64_t> brute_force_histogram(
    std::uint32_t p, const std::function<int(int, int, int)>& f) {
    auto pts = [&]() {
        std::vector<std::array<int, 3>> out;
        for (int y = 0; y < static_cast<int>(p); ++y)
            for (int z = 0; z < static_cast<int>(p); ++z) out.push_back({1, y, z});
        for (int z = 0; z < static_cast<int>(p); ++z) out.push_back({0, 1, z});
        out.push_back({0, 0, 1});
        return out;
    }();
    std::vector<std::array<int, 3>> curve;
    for (const auto& P : pts)
        if (f(P[0], P[1], P[2]) % static_cast<int>(p) == 0) curve.push_back(P);
    std::map<std::uint64_t, std::uint64_t> hist;
    for (const auto& L : pts) {  // dual coordinates of a line
        std::uint64_t k = 0;
        for (const auto& P : curve) {
            if ((L[0] * P[0] + L[1] * P[1] + L[2] * P[2]) % static_cast<int>(p) == 0) ++k;
        }
        ++hist[k];
    }
    return hist;
}

std::map<std::uint64_t, std::uint64_t> to_u64(const std::map<std::uint64_t, BigInt>& m) {
    std::map<std::uint64_t, std::uint64_t> out;
    for (const auto& [k, c] : m) out[k] = c.convert_to<std::uint64_t>();
    return out;
}

}  // namespace

TEST_CASE("closed form: pinned vectors and the derangement identity") {
    CHECK(closed_form_pk(2, 0) == Rational(1, 2));
    CHECK(closed_form_pk(2, 1) == Rational(0));
    CHECK(closed_form_pk(2, 2) == Rational(1, 2));

    CHECK(closed_form_pk(3, 0) == Rational(1, 3));
    CHECK(closed_form_pk(3, 1) == Rational(1, 2));
    CHECK(closed_form_pk(3, 2) == Rational(0));
    CHECK(closed_form_pk(3, 3) == Rational(1, 6));

    for (int d = 1; d <= 30; ++d) {
        BigInt dfact = 1;
        for (int i = 2; i <= d; ++i) dfact *= i;
        CHECK(closed_form_pk(d, d) == Rational(1, dfact));

        Rational sum = 0, mean = 0;
        for (int k = 0; k <= d; ++k) {
            Rational pk = closed_form_pk(d, k);
            CHECK(pk == oracle_pk(d, k));
            sum += pk;
            mean += Rational(k) * pk;
        }
        CHECK(sum == 1);
        CHECK(mean == 1);
    }

    CHECK_THROWS_AS(closed_form_pk(2, 3), InputError);
}

TEST_CASE("closed form tail: |p_k(d) - 1/(e k!)| <= 1/(d+1-k)!") {
    for (int d = 1; d <= 20; ++d) {
        for (int k = 0; k <= d; ++k) {
            double pk = closed_form_pk(d, k).convert_to<double>();
            double kfact = 1;
            for (int i = 2; i <= k; ++i) kfact *= i;
            double target = std::exp(-1.0) / kfact;
            double bound = 1;
            for (int i = 2; i <= d + 1 - k; ++i) bound *= i;
            CHECK(std::abs(pk - target) <= 1.0 / bound + 1e-15);
        }
    }
}

TEST_CASE("conjecture closed form") {
    for (int k = 0; k <= 2; ++k) CHECK(closed_form_conjecture(1, 2, k) == closed_form_pk(2, k));
    CHECK(closed_form_conjecture(1, 2, 0) == Rational(1, 2));
    CHECK(closed_form_conjecture(1, 2, 1) == Rational(0));
    CHECK(closed_form_conjecture(1, 2, 2) == Rational(1, 2));
    CHECK(closed_form_conjecture(2, 2, 4) == Rational(1, 24));
    for (int d = 1; d <= 4; ++d) {
        for (int e = 1; e <= 3; ++e) {
            Rational sum = 0;
            for (int k = 0; k <= d * e; ++k) sum += closed_form_conjecture(d, e, k);
            CHECK(sum == 1);
        }
    }
    CHECK_THROWS_AS(closed_form_conjecture(2, 2, 5), InputError);
}

TEST_CASE("exact distribution: conic fixtures vs independent brute force") {
    Budget budget;
    Variety conic3 = make(kConic3);
    auto h3 = exact_distribution(conic3, 1, budget);
    CHECK(h3.total == 13);
    CHECK(to_u64(h3.counts) == std::map<std::uint64_t, std::uint64_t>{{0, 3}, {1, 4}, {2, 6}});
    CHECK(h3.contained == 0);
    CHECK(to_u64(h3.counts) ==
          brute_force_histogram(3, [](int x, int y, int z) { return x * z - y * y + 9; }));

    Variety conic2 = make(kConic2);
    auto h2 = exact_distribution(conic2, 1, budget);
    CHECK(h2.total == 7);
    CHECK(to_u64(h2.counts) == std::map<std::uint64_t, std::uint64_t>{{0, 1}, {1, 3}, {2, 3}});
    CHECK(to_u64(h2.counts) ==
          brute_force_histogram(2, [](int x, int y, int z) { return x * z - y * y + 4; }));
}

TEST_CASE("degree-1 line: the self-subspace is counted set-theoretically") {
    Budget budget;
    Variety line = make(kLine2);
    auto h = exact_distribution(line, 1, budget);
    CHECK(h.total == 7);
    CHECK(to_u64(h.counts) == std::map<std::uint64_t, std::uint64_t>{{1, 6}, {3, 1}});
    CHECK(h.contained == 0);
    // deviation = 1 - p_1^N, and the reported value matches exactly
    CHECK(deviation_from_limit(h, 1) == Rational(1) - h.probability(1));
}

TEST_CASE("fast path and generic path agree") {
    Budget budget;
    for (const char* text : {kConic3, kConic2, kCubic3, kCubic2}) {
        Variety var = make(text);
        for (int N = 1; N <= 2; ++N) {
            auto a = exact_distribution_generic(var, N, budget);
            auto b = exact_distribution_pairs(var, N, budget);
            CHECK(a.total == b.total);
            CHECK(a.counts == b.counts);
            CHECK(a.contained == b.contained);
        }
    }
}

TEST_CASE("subspaces strictly inside X land in the contained bucket") {
    Budget budget;
    // the hyperbolic quadric surface carries 2(q+1) = 8 rational lines
    Variety quadric = make("p=3\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"\n");
    auto h = exact_distribution(quadric, 1, budget);
    CHECK(h.total == 130);
    CHECK(h.contained == 8);
    CHECK(to_u64(h.counts) == std::map<std::uint64_t, std::uint64_t>{{0, 18}, {1, 32}, {2, 72}});
    // p_k excludes the contained lines from the numerator only
    CHECK(h.probability(2) == Rational(72, 130));
}

TEST_CASE("histogram mass identity is enforced") {
    IntersectionHistogram h;
    h.N = 1;
    h.mode = "exact";
    h.total = 5;
    h.counts[0] = 3;
    h.contained = 1;
    CHECK_THROWS_AS(h.validate(), InternalError);
    h.counts[1] = 1;
    h.validate();
}

TEST_CASE("nested-pair incidence cross-check of the averaging identity") {
    // p_k^N computed over J_m equals the count over incident pairs (V, W)
    // divided by |I|, since every V sits in the same number of W's.
    Budget budget;
    Variety quadric = make("p=2\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"\n");
    auto direct = exact_distribution(quadric, 1, budget);
    const PointSet& X = quadric.points_over(1, budget.max_points);
    const auto& lifted = quadric.forms_over(1);

    std::map<std::uint64_t, std::uint64_t> pair_counts;
    std::uint64_t pairs = 0, contained_pairs = 0;
    enumerate_nested_pairs(quadric.base(), 3, 2, 1 << 20,
                           [&](const LinearSubspace& V, const LinearSubspace& W) {
                               (void)W;
                               ++pairs;
                               std::uint64_t k = intersection_count(X, V);
                               bool cont = false;
                               if (k == subspace_rational_points(V)) {
                                   if (BigInt(X.count) > subspace_rational_points(V)) {
                                       cont = quadric.forms_vanish_on(V, 1);
                                   }
                               }
                               if (cont)
                                   ++contained_pairs;
                               else
                                   ++pair_counts[k];
                           });
    (void)lifted;
    // each line lies in the same number of planes, so frequencies must match
    for (const auto& [k, c] : direct.counts) {
        CHECK(Rational(pair_counts[k], pairs) == Rational(c, direct.total));
    }
    CHECK(Rational(contained_pairs, pairs) == Rational(direct.contained, direct.total));
}

TEST_CASE("mc: concentration, determinism, thread independence") {
    Budget budget;
    Variety conic = make(kConic3);
    auto exact = exact_distribution(conic, 1, budget);

    const std::uint64_t S = 13000;
    auto mc = mc_distribution(conic, 1, S, 0xB3271, budget);
    CHECK(mc.total == S);
    CHECK(mc.samples == S);
    for (int k = 0; k <= 2; ++k) {
        double pk = exact.probability(k).convert_to<double>();
        double sigma = std::sqrt(pk * (1 - pk) / static_cast<double>(S));
        double freq = mc.probability(k).convert_to<double>();
        CHECK(std::abs(freq - pk) <= 5 * sigma);
        CHECK(mc.stderr_by_k.count(k) == 1);
    }

    auto mc2 = mc_distribution(conic, 1, S, 0xB3271, budget);
    CHECK(mc.counts == mc2.counts);

    Budget four = budget;
    four.threads = 4;
    auto mc4 = mc_distribution(conic, 1, S, 0xB3271, four);
    CHECK(mc.counts == mc4.counts);
    CHECK(mc.contained == mc4.contained);

    auto other_seed = mc_distribution(conic, 1, S, 1234, budget);
    CHECK(other_seed.counts != mc.counts);  // astronomically unlikely to tie

    CHECK_THROWS_AS(mc_distribution(conic, 1, 0, 1, budget), InputError);
}

TEST_CASE("generic path is thread independent") {
    Budget budget;
    Variety cubic = make(kCubic3);
    auto one = exact_distribution_generic(cubic, 2, budget);
    Budget four = budget;
    four.threads = 4;
    auto quad = exact_distribution_generic(cubic, 2, four);
    CHECK(one.counts == quad.counts);
    CHECK(one.contained == quad.contained);
}

TEST_CASE("convergence report") {
    Budget budget;
    Variety conic = make(kConic3);
    auto report = convergence_report(conic, {1, 2, 3, 4}, std::nullopt, 1000, 0xB3271, budget);
    REQUIRE(report.rows.size() == 4);
    for (const auto& row : report.rows) CHECK(row.hist.mode == "exact");
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].deviation < report.rows[i - 1].deviation);
    }
    CHECK(report.rows[3].hist.probability(1) == Rational(82, 6643));
    CHECK(report.limit == limit_vector(2));

    // forced Monte Carlo above level 1
    auto mixed = convergence_report(conic, {1, 2}, 1, 500, 0xB3271, budget);
    CHECK(mixed.rows[0].hist.mode == "exact");
    CHECK(mixed.rows[1].hist.mode == "mc");

    CHECK_THROWS_AS(convergence_report(conic, {}, std::nullopt, 10, 1, budget), InputError);
}

TEST_CASE("conjecture probe: determinism and contract") {
    Budget budget;
    Variety line3 = make("p=3\nn=2\nm=1\nd=1\npoly=\"x0\"\n");
    auto probe = conjecture_probe(line3, 2, 2, 500, 0xB3271, budget);
    CHECK(probe.samples == 500);
    std::uint64_t total = 0;
    for (const auto& [k, c] : probe.counts) total += c;
    CHECK(total == 500);
    REQUIRE(probe.limit.size() == 3);
    CHECK(probe.limit[0] == Rational(1, 2));
    CHECK(probe.limit[1] == Rational(0));
    CHECK(probe.limit[2] == Rational(1, 2));
    CHECK(probe.rejected > 0);  // reducible draws exist and are rejected

    auto again = conjecture_probe(line3, 2, 2, 500, 0xB3271, budget);
    CHECK(probe.counts == again.counts);
    CHECK(probe.rejected == again.rejected);

    Budget four = budget;
    four.threads = 4;
    auto par = conjecture_probe(line3, 2, 2, 500, 0xB3271, four);
    CHECK(probe.counts == par.counts);
    CHECK(probe.rejected == par.rejected);

    CHECK_THROWS_AS(conjecture_probe(line3, 3, 2, 10, 1, budget), InputError);
    CHECK_THROWS_AS(conjecture_probe(line3, 2, 2, 0, 1, budget), InputError);
    Variety quadric = make("p=3\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"\n");
    CHECK_THROWS_AS(conjecture_probe(quadric, 2, 1, 10, 1, budget), InputError);
}

TEST_CASE("report renderings carry identical rational values") {
    Budget budget;
    Variety conic = make(kConic3);
    auto report = convergence_report(conic, {1, 2}, std::nullopt, 100, 0xB3271, budget);
    Json j = levels_report_json(conic.spec(), report.rows, report.limit);
    std::string csv = levels_report_csv(conic.spec(), report.rows, report.limit);

    // every (N, k) row of the CSV appears in the JSON with the same num/den
    std::istringstream is(csv);
    std::string header, lineTxt;
    std::getline(is, header);
    int rows_checked = 0;
    while (std::getline(is, lineTxt)) {
        std::vector<std::string> cols;
        std::istringstream ls(lineTxt);
        std::string col;
        while (std::getline(ls, col, ',')) cols.push_back(col);
        if (cols[0] == "limit") {
            const auto& lim = j["limit"][cols[5]];
            CHECK(lim["num"].get<std::string>() == cols[7]);
            CHECK(lim["den"].get<std::string>() == cols[8]);
        } else {
            int N = std::stoi(cols[0]);
            const Json* level = nullptr;
            for (const auto& l : j["levels"])
                if (l["N"].get<int>() == N) level = &l;
            REQUIRE(level != nullptr);
            const auto& p = (*level)["p"][cols[5]];
            CHECK(p["num"].get<std::string>() == cols[7]);
            CHECK(p["den"].get<std::string>() == cols[8]);
        }
        ++rows_checked;
    }
    CHECK(rows_checked >= 6);
}
