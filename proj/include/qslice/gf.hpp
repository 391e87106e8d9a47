#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qslice/errors.hpp"

namespace qslice {

// Element of F_{p^k}, stored packed: value = sum_i c_i * p^i where (c_0..c_{k-1})
// are the coordinates in the power basis of the modulus, constant term first.
// The packed value doubles as the element's rank in enumeration order, so the
// elements of a field are exactly 0, 1, ..., p^k - 1 with 0 and 1 the additive
// and multiplicative identities.
using Felem = std::uint32_t;

class FieldCtx {
public:
    static constexpr std::uint64_t kMaxSize = 1ull << 24;    // hard cap on p^k
    static constexpr std::uint64_t kTableSize = 1ull << 20;  // log/exp/zech cap

    // Shared cached instance; table construction is not free, so prefer this
    // over the constructor outside of tests.
    static const FieldCtx& get(std::uint32_t p, std::uint32_t k);

    // Builds F_{p^k} with the lexicographically smallest monic irreducible
    // modulus of degree k (deterministic across runs). k = 1 uses plain mod-p
    // arithmetic with the placeholder modulus x.
    FieldCtx(std::uint32_t p, std::uint32_t k);

    FieldCtx(const FieldCtx&) = delete;
    FieldCtx& operator=(const FieldCtx&) = delete;

    std::uint32_t p() const { return p_; }
    std::uint32_t degree() const { return k_; }
    std::uint64_t size() const { return q_; }
    std::uint64_t uid() const { return uid_; }
    // Length k+1, constant term first, monic.
    const std::vector<std::uint32_t>& modulus() const { return mod_; }

    Felem zero() const { return 0; }
    Felem one() const { return 1; }

    Felem from_int(std::int64_t v) const;  // constant in the prime subfield
    Felem from_coeffs(const std::vector<std::uint32_t>& c) const;
    std::vector<std::uint32_t> coeffs(Felem a) const;

    Felem add(Felem a, Felem b) const;
    Felem sub(Felem a, Felem b) const;
    Felem neg(Felem a) const;
    Felem mul(Felem a, Felem b) const;
    Felem inverse(Felem a) const;  // throws InputError on a = 0
    Felem pow(Felem a, std::uint64_t e) const;
    std::optional<Felem> sqrt(Felem a) const;

    // "3" for prime fields, "[c0,c1,...]" for extensions.
    std::string to_string(Felem a) const;
    Felem parse_elem(const std::string& text) const;

    bool valid(Felem a) const { return a < q_; }

private:
    void check(Felem a) const {
        if (a >= q_) throw InputError("field element out of range for F_" + std::to_string(q_));
    }

    Felem add_raw(Felem a, Felem b) const;  // digit-wise, no tables
    Felem neg_raw(Felem a) const;
    Felem mul_raw(Felem a, Felem b) const;  // polynomial product mod modulus
    Felem pow_raw(Felem a, std::uint64_t e) const;
    void build_tables();

    std::uint32_t p_ = 0;
    std::uint32_t k_ = 0;
    std::uint64_t q_ = 0;
    std::uint64_t uid_ = 0;
    std::vector<std::uint32_t> mod_;
    std::vector<std::uint64_t> ppow_;  // p^0..p^k

    // Multiplicative tables for extensions with q <= kTableSize.
    bool tabled_ = false;
    std::vector<std::uint32_t> exp_;   // exp_[i] = g^i, i in [0, q-1)
    std::vector<std::uint32_t> log_;   // log_[exp_[i]] = i; log_[0] unused
    std::vector<std::uint32_t> zech_;  // log(1 + g^z), kZechZero if 1 + g^z = 0
    static constexpr std::uint32_t kZechZero = 0xffffffffu;
};

// Ring embedding F_{p^e} -> F_{p^{e*j}}: the generator of src is sent to the
// smallest root (in enumeration order) of src's modulus inside dst. A field
// homomorphism; fixed per (src, dst) pair and cached.
class Embedding {
public:
    Embedding(const FieldCtx& src, const FieldCtx& dst);

    const FieldCtx& src() const { return *src_; }
    const FieldCtx& dst() const { return *dst_; }
    Felem root() const { return root_; }

    Felem operator()(Felem a) const;

private:
    const FieldCtx* src_;
    const FieldCtx* dst_;
    Felem root_;
    std::vector<Felem> digit_map_;  // [i * p + digit] = digit * root^i in dst
};

const Embedding& get_embedding(const FieldCtx& src, const FieldCtx& dst);

bool is_prime_u32(std::uint32_t n);

}  // namespace qslice
