#include "qslice/projspace.hpp"

#include <sstream>

namespace qslice {

void normalize_in_place(const FieldCtx& F, std::span<Felem> v) {
    std::size_t lead = v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0) {
            lead = i;
            break;
        }
    }
    if (lead == v.size()) throw InputError("cannot normalize the zero vector");
    if (v[lead] != 1) {
        Felem inv = F.inverse(v[lead]);
        v[lead] = 1;
        for (std::size_t i = lead + 1; i < v.size(); ++i) v[i] = F.mul(v[i], inv);
    }
}

ProjPoint normalize(const FieldCtx& F, std::vector<Felem> raw) {
    normalize_in_place(F, raw);
    return ProjPoint{std::move(raw)};
}

BigInt projective_point_count(std::uint64_t Q, int n) {
    BigInt q = Q;
    BigInt num = boost::multiprecision::pow(q, n + 1) - 1;
    return num / (q - 1);
}

void for_each_projective_point(const FieldCtx& F, int n, std::uint64_t budget,
                               const std::function<void(std::span<const Felem>)>& fn) {
    if (n < 0) throw InputError("projective dimension must be >= 0");
    BigInt total = projective_point_count(F.size(), n);
    if (total > budget) {
        throw BudgetError("P^" + std::to_string(n) + "(F_" + std::to_string(F.size()) +
                          ") has " + total.str() + " points, over the enumeration budget of " +
                          std::to_string(budget));
    }
    const std::uint64_t Q = F.size();
    std::vector<Felem> v(static_cast<std::size_t>(n) + 1, 0);
    for (int lead = 0; lead <= n; ++lead) {
        std::fill(v.begin(), v.end(), 0);
        v[lead] = 1;
        const int free_from = lead + 1;
        for (;;) {
            fn(std::span<const Felem>(v));
            // odometer over coordinates free_from..n, last coordinate fastest
            int pos = n;
            while (pos >= free_from) {
                if (v[pos] + 1 < Q) {
                    ++v[pos];
                    break;
                }
                v[pos] = 0;
                --pos;
            }
            if (pos < free_from) break;
        }
    }
}

std::vector<ProjPoint> enumerate_points(const FieldCtx& F, int n, std::uint64_t budget) {
    std::vector<ProjPoint> out;
    for_each_projective_point(F, n, budget, [&](std::span<const Felem> v) {
        out.push_back(ProjPoint{std::vector<Felem>(v.begin(), v.end())});
    });
    return out;
}

std::string point_to_string(const FieldCtx& F, std::span<const Felem> coords) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i) os << ':';
        os << F.to_string(coords[i]);
    }
    os << ')';
    return os.str();
}

}  // namespace qslice
