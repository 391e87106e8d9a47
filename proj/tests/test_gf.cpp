#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "qslice/gf.hpp"
#include "qslice/rng.hpp"

using namespace qslice;

namespace {

// Oracle: lexicographically smallest irreducible monic quadratic over F_p by
// exhaustive root search (a quadratic is reducible iff it has a root).
std::vector<std::uint32_t> smallest_irreducible_quadratic(std::uint32_t p) {
    for (std::uint32_t c1 = 0;; ++c1) {
        for (std::uint32_t idx = 0; idx < p * p; ++idx) {
            std::uint32_t c0 = idx % p, ch = idx / p;
            bool has_root = false;
            for (std::uint32_t x = 0; x < p; ++x) {
                if ((x * x + ch * x + c0) % p == 0) {
                    has_root = true;
                    break;
                }
            }
            if (!has_root) return {c0, ch, 1};
        }
        (void)c1;
    }
}

}  // namespace

TEST_CASE("modulus selection is the lexicographically smallest irreducible") {
    const FieldCtx& f4 = FieldCtx::get(2, 2);
    CHECK(f4.modulus() == std::vector<std::uint32_t>{1, 1, 1});  // x^2 + x + 1
    CHECK(f4.modulus() == smallest_irreducible_quadratic(2));

    const FieldCtx& f9 = FieldCtx::get(3, 2);
    CHECK(f9.modulus() == std::vector<std::uint32_t>{1, 0, 1});  // x^2 + 1
    CHECK(f9.modulus() == smallest_irreducible_quadratic(3));

    const FieldCtx& f25 = FieldCtx::get(5, 2);
    CHECK(f25.modulus() == smallest_irreducible_quadratic(5));

    const FieldCtx& f2 = FieldCtx::get(2, 1);
    CHECK(f2.modulus() == std::vector<std::uint32_t>{0, 1});  // placeholder x
    CHECK(f2.size() == 2);
}

TEST_CASE("creation rejects bad parameters") {
    CHECK_THROWS_AS(FieldCtx(4, 1), InputError);   // not prime
    CHECK_THROWS_AS(FieldCtx(1, 1), InputError);
    CHECK_THROWS_AS(FieldCtx(2, 25), InputError);  // over the 2^24 cap
    CHECK_THROWS_AS(FieldCtx(2, 0), InputError);
}

TEST_CASE("arithmetic examples") {
    const FieldCtx& f4 = FieldCtx::get(2, 2);
    Felem t = f4.from_coeffs({0, 1});
    Felem t1 = f4.from_coeffs({1, 1});
    CHECK(f4.mul(t, t1) == f4.one());  // t*(t+1) = t^2+t = 1
    CHECK(f4.inverse(t) == t1);

    const FieldCtx& f5 = FieldCtx::get(5, 1);
    CHECK(f5.add(2, 4) == 1);
    CHECK(f5.inverse(2) == 3);
    CHECK(f5.inverse(1) == 1);
    CHECK_THROWS_AS(f5.inverse(0), InputError);
    CHECK_THROWS_AS(f5.add(5, 1), InputError);  // out of range = wrong context

    RngStream rng(7, 0);
    for (int i = 0; i < 200; ++i) {
        Felem a = rng.bounded(static_cast<std::uint32_t>(f4.size()));
        CHECK(f4.mul(a, f4.one()) == a);
    }
}

TEST_CASE("enumeration order and cardinality") {
    const FieldCtx& f2 = FieldCtx::get(2, 1);
    CHECK(f2.size() == 2);
    CHECK(f2.zero() == 0);
    CHECK(f2.one() == 1);

    const FieldCtx& f4 = FieldCtx::get(2, 2);
    CHECK(f4.size() == 4);
    int nonzero = 0;
    for (Felem a = 0; a < f4.size(); ++a) {
        if (a == 0) continue;
        ++nonzero;
        // Lagrange: a^3 = 1, by brute-force multiplication
        Felem cube = f4.mul(a, f4.mul(a, a));
        CHECK(cube == f4.one());
    }
    CHECK(nonzero == 3);

    CHECK(FieldCtx::get(3, 2).size() == 9);
}

TEST_CASE("field axioms on random triples") {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> fields = {
        {2, 1}, {3, 1}, {5, 1}, {7, 1}, {2, 2}, {3, 2}, {2, 3}, {2, 4}, {3, 3}, {5, 2}, {13, 1}};
    for (auto [p, k] : fields) {
        const FieldCtx& F = FieldCtx::get(p, k);
        RngStream rng(0xfeed, p * 100 + k);
        const std::uint32_t Q = static_cast<std::uint32_t>(F.size());
        for (int i = 0; i < 1000; ++i) {
            Felem a = rng.bounded(Q), b = rng.bounded(Q), c = rng.bounded(Q);
            CHECK(F.add(a, b) == F.add(b, a));
            CHECK(F.mul(a, b) == F.mul(b, a));
            CHECK(F.add(F.add(a, b), c) == F.add(a, F.add(b, c)));
            CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
            CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
            CHECK(F.sub(F.add(a, b), b) == a);
            if (b != 0) CHECK(F.mul(F.mul(a, b), F.inverse(b)) == a);
        }
    }
}

TEST_CASE("multiplicative order and Frobenius") {
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 1}, {3, 1}, {2, 2}, {3, 2}, {2, 4}, {5, 2}, {7, 1}, {3, 4}}) {
        const FieldCtx& F = FieldCtx::get(p, k);
        for (Felem a = 1; a < F.size(); ++a) {
            CHECK(F.pow(a, F.size() - 1) == F.one());
        }
        RngStream rng(0xf0b, p * 100 + k);
        for (int i = 0; i < 1000; ++i) {
            Felem a = rng.bounded(static_cast<std::uint32_t>(F.size()));
            Felem b = rng.bounded(static_cast<std::uint32_t>(F.size()));
            CHECK(F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p)));
        }
    }
}

TEST_CASE("embedding: prime subfield and F_4 into F_16") {
    const FieldCtx& f3 = FieldCtx::get(3, 1);
    const FieldCtx& f9 = FieldCtx::get(3, 2);
    const Embedding& up = get_embedding(f3, f9);
    for (Felem c = 0; c < 3; ++c) CHECK(up(c) == c);  // constants stay packed constants

    const FieldCtx& f4 = FieldCtx::get(2, 2);
    const FieldCtx& f16 = FieldCtx::get(2, 4);
    const Embedding& phi = get_embedding(f4, f16);
    Felem r = phi.root();
    // r is a root of x^2+x+1 and the smallest one in enumeration order
    CHECK(f16.add(f16.add(f16.mul(r, r), r), f16.one()) == 0);
    for (Felem cand = 0; cand < r; ++cand) {
        CHECK(f16.add(f16.add(f16.mul(cand, cand), cand), f16.one()) != 0);
    }
    CHECK(phi(0) == 0);
    CHECK(phi(f4.one()) == f16.one());
}

TEST_CASE("embeddings are injective field homomorphisms (exhaustive <= 2^10)") {
    std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t>> cases = {
        {{2, 2}, 4}, {{2, 3}, 6}, {{2, 5}, 10}, {{3, 2}, 4}, {{3, 1}, 3}, {{5, 1}, 2}, {{2, 4}, 8}};
    for (auto [src_pk, dst_k] : cases) {
        const FieldCtx& src = FieldCtx::get(src_pk.first, src_pk.second);
        const FieldCtx& dst = FieldCtx::get(src_pk.first, dst_k);
        const Embedding& phi = get_embedding(src, dst);
        std::set<Felem> images;
        for (Felem a = 0; a < src.size(); ++a) images.insert(phi(a));
        CHECK(images.size() == src.size());  // injective
        for (Felem a = 0; a < src.size(); ++a) {
            for (Felem b = 0; b < src.size(); ++b) {
                CHECK(phi(src.mul(a, b)) == dst.mul(phi(a), phi(b)));
                CHECK(phi(src.add(a, b)) == dst.add(phi(a), phi(b)));
            }
        }
    }
}

TEST_CASE("embedding requires compatible parameters") {
    CHECK_THROWS_AS(Embedding(FieldCtx::get(2, 2), FieldCtx::get(3, 2)), InputError);
    CHECK_THROWS_AS(Embedding(FieldCtx::get(2, 2), FieldCtx::get(2, 3)), InputError);
}

TEST_CASE("square roots") {
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {3, 2}, {5, 1}, {7, 1}, {13, 1}, {2, 3}, {3, 4}}) {
        const FieldCtx& F = FieldCtx::get(p, k);
        int squares = 0;
        for (Felem a = 0; a < F.size(); ++a) {
            auto s = F.sqrt(a);
            if (s) {
                ++squares;
                CHECK(F.mul(*s, *s) == a);
            }
        }
        if (p == 2) {
            CHECK(squares == static_cast<int>(F.size()));  // Frobenius is onto
        } else {
            CHECK(squares == static_cast<int>(F.size() + 1) / 2);
        }
    }
    // prime field without tables exercises Tonelli-Shanks
    const FieldCtx& big = FieldCtx::get(10007, 1);
    RngStream rng(3, 3);
    for (int i = 0; i < 50; ++i) {
        Felem a = rng.bounded(10007);
        Felem sq = big.mul(a, a);
        auto s = big.sqrt(sq);
        REQUIRE(s.has_value());
        CHECK(big.mul(*s, *s) == sq);
    }
}

TEST_CASE("coefficient round trip and rendering") {
    const FieldCtx& f9 = FieldCtx::get(3, 2);
    for (Felem a = 0; a < f9.size(); ++a) {
        CHECK(f9.from_coeffs(f9.coeffs(a)) == a);
    }
    CHECK(f9.to_string(f9.from_coeffs({1, 2})) == "[1,2]");
    CHECK(FieldCtx::get(5, 1).to_string(3) == "3");
    CHECK(f9.parse_elem("[1,2]") == f9.from_coeffs({1, 2}));
}
