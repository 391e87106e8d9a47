#include "qslice/gf.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace qslice {

namespace {

std::atomic<std::uint64_t> g_next_uid{1};

// --- small polynomial helpers over F_p (coefficient vectors, constant first) ---

using Poly = std::vector<std::uint32_t>;

void poly_trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

// f mod g, g monic. In-place remainder.
void poly_mod(Poly& f, const Poly& g, std::uint32_t p) {
    const std::size_t dg = g.size() - 1;
    while (f.size() > dg) {
        std::uint64_t c = f.back();
        std::size_t shift = f.size() - 1 - dg;
        if (c != 0) {
            for (std::size_t i = 0; i < dg; ++i) {
                std::uint64_t t = f[shift + i] + (p - g[i]) % p * c % p;
                f[shift + i] = static_cast<std::uint32_t>(t % p);
            }
        }
        f.pop_back();
    }
    poly_trim(f);
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& g, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            r[i + j] = static_cast<std::uint32_t>((r[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
        }
    }
    poly_mod(r, g, p);
    return r;
}

// Exact divisibility test f % g == 0, g monic of positive degree.
bool poly_divisible(const Poly& f, const Poly& g, std::uint32_t p) {
    Poly r = f;
    poly_mod(r, g, p);
    return r.empty();
}

// Irreducibility over F_p by trial division against every monic polynomial of
// degree 1..deg(f)/2. Cost ~ sqrt(p^k), fine under the field-size cap.
bool poly_irreducible(const Poly& f, std::uint32_t p) {
    const std::size_t d = f.size() - 1;
    if (d == 1) return true;
    for (std::size_t dd = 1; dd <= d / 2; ++dd) {
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < dd; ++i) count *= p;
        Poly g(dd + 1, 0);
        g[dd] = 1;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            std::uint64_t v = idx;
            for (std::size_t i = 0; i < dd; ++i) {
                g[i] = static_cast<std::uint32_t>(v % p);
                v /= p;
            }
            if (poly_divisible(f, g, p)) return false;
        }
    }
    return true;
}

std::vector<std::uint32_t> factor_u64(std::uint64_t n) {
    std::vector<std::uint32_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(static_cast<std::uint32_t>(d));
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(static_cast<std::uint32_t>(n));
    return out;
}

}  // namespace

bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

FieldCtx::FieldCtx(std::uint32_t p, std::uint32_t k) : p_(p), k_(k) {
    if (!is_prime_u32(p)) throw InputError("field characteristic " + std::to_string(p) + " is not prime");
    if (k < 1) throw InputError("extension degree must be >= 1");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
        q *= p;
        if (q > kMaxSize) throw InputError("field size p^k exceeds cap 2^24");
    }
    q_ = q;
    uid_ = g_next_uid.fetch_add(1);

    ppow_.resize(k + 1);
    ppow_[0] = 1;
    for (std::uint32_t i = 1; i <= k; ++i) ppow_[i] = ppow_[i - 1] * p;

    if (k == 1) {
        mod_ = {0, 1};  // placeholder x; arithmetic is plain mod p
        return;
    }

    // Lexicographically smallest monic irreducible: scan the non-leading
    // coefficient vectors in packed (enumeration) order.
    Poly f(k + 1, 0);
    f[k] = 1;
    bool found = false;
    for (std::uint64_t idx = 0; idx < ppow_[k]; ++idx) {
        std::uint64_t v = idx;
        for (std::uint32_t i = 0; i < k; ++i) {
            f[i] = static_cast<std::uint32_t>(v % p);
            v /= p;
        }
        if (poly_irreducible(f, p)) {
            found = true;
            break;
        }
    }
    if (!found) throw InternalError("no irreducible modulus found");  // cannot happen
    mod_.assign(f.begin(), f.end());

    if (q_ <= kTableSize) build_tables();
}

Felem FieldCtx::from_int(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<Felem>(r);
}

Felem FieldCtx::from_coeffs(const std::vector<std::uint32_t>& c) const {
    if (c.size() != k_) throw InputError("coefficient vector length does not match extension degree");
    std::uint64_t v = 0;
    for (std::uint32_t i = 0; i < k_; ++i) {
        if (c[i] >= p_) throw InputError("coefficient out of range");
        v += static_cast<std::uint64_t>(c[i]) * ppow_[i];
    }
    return static_cast<Felem>(v);
}

std::vector<std::uint32_t> FieldCtx::coeffs(Felem a) const {
    check(a);
    std::vector<std::uint32_t> c(k_);
    std::uint64_t v = a;
    for (std::uint32_t i = 0; i < k_; ++i) {
        c[i] = static_cast<std::uint32_t>(v % p_);
        v /= p_;
    }
    return c;
}

Felem FieldCtx::add_raw(Felem a, Felem b) const {
    if (p_ == 2) return a ^ b;
    std::uint64_t va = a, vb = b, out = 0;
    for (std::uint32_t i = 0; i < k_; ++i) {
        std::uint32_t s = static_cast<std::uint32_t>(va % p_) + static_cast<std::uint32_t>(vb % p_);
        if (s >= p_) s -= p_;
        out += static_cast<std::uint64_t>(s) * ppow_[i];
        va /= p_;
        vb /= p_;
    }
    return static_cast<Felem>(out);
}

Felem FieldCtx::neg_raw(Felem a) const {
    if (p_ == 2) return a;
    std::uint64_t va = a, out = 0;
    for (std::uint32_t i = 0; i < k_; ++i) {
        std::uint32_t c = static_cast<std::uint32_t>(va % p_);
        if (c != 0) c = p_ - c;
        out += static_cast<std::uint64_t>(c) * ppow_[i];
        va /= p_;
    }
    return static_cast<Felem>(out);
}

Felem FieldCtx::mul_raw(Felem a, Felem b) const {
    if (k_ == 1) return static_cast<Felem>(static_cast<std::uint64_t>(a) * b % p_);
    Poly pa, pb;
    std::uint64_t va = a, vb = b;
    for (std::uint32_t i = 0; i < k_; ++i) {
        pa.push_back(static_cast<std::uint32_t>(va % p_));
        pb.push_back(static_cast<std::uint32_t>(vb % p_));
        va /= p_;
        vb /= p_;
    }
    poly_trim(pa);
    poly_trim(pb);
    Poly r = poly_mulmod(pa, pb, mod_, p_);
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < r.size(); ++i) out += static_cast<std::uint64_t>(r[i]) * ppow_[i];
    return static_cast<Felem>(out);
}

Felem FieldCtx::pow_raw(Felem a, std::uint64_t e) const {
    Felem result = 1, base = a;
    while (e > 0) {
        if (e & 1) result = mul_raw(result, base);
        base = mul_raw(base, base);
        e >>= 1;
    }
    return result;
}

void FieldCtx::build_tables() {
    const std::uint64_t order = q_ - 1;
    const auto primes = factor_u64(order);

    Felem gen = 0;
    for (Felem cand = 2; cand < q_; ++cand) {
        bool ok = true;
        for (std::uint32_t f : primes) {
            if (pow_raw(cand, order / f) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            gen = cand;
            break;
        }
    }
    if (gen == 0) throw InternalError("no multiplicative generator found");

    exp_.resize(order);
    log_.assign(q_, 0);
    exp_[0] = 1;
    for (std::uint64_t i = 1; i < order; ++i) exp_[i] = mul_raw(exp_[i - 1], gen);
    for (std::uint64_t i = 0; i < order; ++i) log_[exp_[i]] = static_cast<std::uint32_t>(i);

    zech_.resize(order);
    for (std::uint64_t z = 0; z < order; ++z) {
        Felem t = add_raw(1, exp_[z]);
        zech_[z] = (t == 0) ? kZechZero : log_[t];
    }
    tabled_ = true;
}

Felem FieldCtx::add(Felem a, Felem b) const {
    check(a);
    check(b);
    if (k_ == 1) {
        std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    if (p_ == 2) return a ^ b;
    if (tabled_) {
        if (a == 0) return b;
        if (b == 0) return a;
        const std::uint64_t order = q_ - 1;
        std::uint32_t la = log_[a], lb = log_[b];
        std::uint64_t dz = (lb >= la) ? (lb - la) : (lb + order - la);
        std::uint32_t z = zech_[dz];
        if (z == kZechZero) return 0;
        return exp_[(la + z) % order];
    }
    return add_raw(a, b);
}

Felem FieldCtx::neg(Felem a) const {
    check(a);
    if (k_ == 1) return a == 0 ? 0 : p_ - a;
    if (p_ == 2) return a;
    if (tabled_) {
        if (a == 0) return 0;
        const std::uint64_t order = q_ - 1;
        return exp_[(log_[a] + order / 2) % order];
    }
    return neg_raw(a);
}

Felem FieldCtx::sub(Felem a, Felem b) const { return add(a, neg(b)); }

Felem FieldCtx::mul(Felem a, Felem b) const {
    check(a);
    check(b);
    if (k_ == 1) return static_cast<Felem>(static_cast<std::uint64_t>(a) * b % p_);
    if (a == 0 || b == 0) return 0;
    if (tabled_) {
        const std::uint64_t order = q_ - 1;
        return exp_[(static_cast<std::uint64_t>(log_[a]) + log_[b]) % order];
    }
    return mul_raw(a, b);
}

Felem FieldCtx::inverse(Felem a) const {
    check(a);
    if (a == 0) throw InputError("division by zero in F_" + std::to_string(q_));
    if (tabled_) {
        const std::uint64_t order = q_ - 1;
        return exp_[(order - log_[a]) % order];
    }
    return pow(a, q_ - 2);
}

Felem FieldCtx::pow(Felem a, std::uint64_t e) const {
    check(a);
    if (a == 0) return e == 0 ? 1 : 0;
    const std::uint64_t order = q_ - 1;
    e %= order;
    if (tabled_) return exp_[static_cast<std::uint64_t>(log_[a]) * e % order];
    if (k_ == 1) {
        std::uint64_t result = 1, base = a;
        while (e > 0) {
            if (e & 1) result = result * base % p_;
            base = base * base % p_;
            e >>= 1;
        }
        return static_cast<Felem>(result);
    }
    return pow_raw(a, e);
}

std::optional<Felem> FieldCtx::sqrt(Felem a) const {
    check(a);
    if (a == 0) return Felem{0};
    if (p_ == 2) return pow(a, q_ / 2);  // Frobenius inverse: squaring is bijective
    if (tabled_) {
        std::uint32_t la = log_[a];
        if (la & 1) return std::nullopt;
        return exp_[la / 2];
    }
    // Tonelli-Shanks on top of generic mul/pow.
    const std::uint64_t order = q_ - 1;
    if (pow(a, order / 2) != 1) return std::nullopt;
    std::uint64_t m = order;
    std::uint32_t s = 0;
    while ((m & 1) == 0) {
        m >>= 1;
        ++s;
    }
    if (s == 1) return pow(a, (q_ + 1) / 4);
    Felem z = 2;
    while (z < q_ && pow(z, order / 2) == 1) ++z;
    Felem c = pow(z, m);
    Felem t = pow(a, m);
    Felem r = pow(a, (m + 1) / 2);
    std::uint32_t e = s;
    while (t != 1) {
        std::uint32_t i = 0;
        Felem t2 = t;
        while (t2 != 1) {
            t2 = mul(t2, t2);
            ++i;
            if (i == e) return std::nullopt;
        }
        Felem b = c;
        for (std::uint32_t j = 0; j + i + 1 < e; ++j) b = mul(b, b);
        r = mul(r, b);
        c = mul(b, b);
        t = mul(t, c);
        e = i;
    }
    return r;
}

std::string FieldCtx::to_string(Felem a) const {
    check(a);
    if (k_ == 1) return std::to_string(a);
    auto c = coeffs(a);
    std::ostringstream os;
    os << '[';
    for (std::uint32_t i = 0; i < k_; ++i) {
        if (i) os << ',';
        os << c[i];
    }
    os << ']';
    return os.str();
}

Felem FieldCtx::parse_elem(const std::string& text) const {
    try {
        if (k_ == 1) {
            std::size_t pos = 0;
            long long v = std::stoll(text, &pos);
            if (pos != text.size()) throw InputError("trailing characters");
            return from_int(v);
        }
        if (text.empty() || text.front() != '[' || text.back() != ']')
            throw InputError("expected [c0,c1,...]");
        std::vector<std::uint32_t> c;
        std::string body = text.substr(1, text.size() - 2);
        std::istringstream is(body);
        std::string item;
        while (std::getline(is, item, ',')) c.push_back(static_cast<std::uint32_t>(std::stoul(item)));
        return from_coeffs(c);
    } catch (const std::exception&) {
        throw InputError("cannot parse field element '" + text + "'");
    }
}

const FieldCtx& FieldCtx::get(std::uint32_t p, std::uint32_t k) {
    static std::mutex mtx;
    static std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<FieldCtx>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(p, k);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<FieldCtx>(p, k)).first;
    return *it->second;
}

Embedding::Embedding(const FieldCtx& src, const FieldCtx& dst) : src_(&src), dst_(&dst) {
    if (src.p() != dst.p()) throw InputError("embedding requires equal characteristic");
    if (dst.degree() % src.degree() != 0)
        throw InputError("source degree does not divide destination degree");

    const std::uint32_t e = src.degree();
    const auto& mod = src.modulus();

    // Smallest root of src's modulus in dst, enumeration order.
    bool found = false;
    Felem root = 0;
    for (std::uint64_t cand = 0; cand < dst.size(); ++cand) {
        // Horner; modulus coefficients are prime-subfield constants.
        Felem acc = dst.from_int(mod[e]);
        for (std::uint32_t i = e; i-- > 0;) {
            acc = dst.add(dst.mul(acc, static_cast<Felem>(cand)), dst.from_int(mod[i]));
        }
        if (acc == 0) {
            root = static_cast<Felem>(cand);
            found = true;
            break;
        }
    }
    if (!found) throw InternalError("modulus has no root in the extension field");
    root_ = root;

    digit_map_.assign(static_cast<std::size_t>(e) * src.p(), 0);
    Felem rp = dst.one();
    for (std::uint32_t i = 0; i < e; ++i) {
        for (std::uint32_t d = 0; d < src.p(); ++d) {
            digit_map_[static_cast<std::size_t>(i) * src.p() + d] = dst.mul(dst.from_int(d), rp);
        }
        rp = dst.mul(rp, root_);
    }
}

Felem Embedding::operator()(Felem a) const {
    if (!src_->valid(a)) throw InputError("element out of range for embedding source field");
    const std::uint32_t p = src_->p();
    std::uint64_t v = a;
    Felem acc = 0;
    for (std::uint32_t i = 0; i < src_->degree(); ++i) {
        std::uint32_t d = static_cast<std::uint32_t>(v % p);
        if (d) acc = dst_->add(acc, digit_map_[static_cast<std::size_t>(i) * p + d]);
        v /= p;
    }
    return acc;
}

const Embedding& get_embedding(const FieldCtx& src, const FieldCtx& dst) {
    static std::mutex mtx;
    static std::map<std::pair<std::uint64_t, std::uint64_t>, std::unique_ptr<Embedding>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(src.uid(), dst.uid());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Embedding>(src, dst)).first;
    return *it->second;
}

}  // namespace qslice
