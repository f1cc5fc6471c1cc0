#pragma once
// Exact scalar backends: word-size prime fields and arbitrary-precision
// rationals behind one compile-time interface.
//
// A field object carries the modulus and derived constants; elements are
// plain values (uint32_t residues resp. cpp_rational), so matrices stay flat
// and field objects can be copied freely.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace npsurf {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod_u64(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

inline u64 powmod_u64(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin; the base set below decides primality exactly
// for every n < 2^64.
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

// Z/p for an odd prime 2^30 < p < 2^31. Elements are residues in [0, p).
// Montgomery form (R = 2^32) is used only inside the dense elimination
// kernel; the public element representation is the plain residue.
class PrimeField {
public:
    using Element = u32;

    explicit PrimeField(u64 p) : p_(static_cast<u32>(p)) {
        if (p <= (1ull << 30) || p >= (1ull << 31))
            throw std::invalid_argument("PrimeField: modulus must lie in (2^30, 2^31)");
        if (!is_prime_u64(p))
            throw std::invalid_argument("PrimeField: modulus is not prime");
        // p^{-1} mod 2^32 by Newton iteration, then negate.
        u32 inv = p_;
        for (int i = 0; i < 5; ++i) inv *= 2u - p_ * inv;
        pinv_neg_ = ~inv + 1u;
        r2_ = static_cast<u32>((static_cast<u128>(1) << 64) % p_);
        mont_one_ = static_cast<u32>((static_cast<u64>(1) << 32) % p_);
    }

    u64 characteristic() const { return p_; }
    u32 modulus() const { return p_; }

    static constexpr Element zero() { return 0; }
    Element one() const { return 1; }
    bool is_zero(Element a) const { return a == 0; }

    Element from_i64(i64 x) const {
        i64 r = x % static_cast<i64>(p_);
        if (r < 0) r += p_;
        return static_cast<Element>(r);
    }

    Element add(Element a, Element b) const {
        u32 s = a + b; // no overflow: a, b < 2^31
        return s >= p_ ? s - p_ : s;
    }
    Element sub(Element a, Element b) const { return a >= b ? a - b : a + p_ - b; }
    Element neg(Element a) const { return a == 0 ? 0 : p_ - a; }
    Element mul(Element a, Element b) const {
        return static_cast<Element>((static_cast<u64>(a) * b) % p_);
    }

    Element inv(Element a) const {
        if (a == 0) throw std::domain_error("PrimeField::inv(0)");
        // extended Euclid on (a, p)
        i64 t = 0, new_t = 1;
        i64 r = p_, new_r = a;
        while (new_r != 0) {
            i64 q = r / new_r;
            i64 tmp = t - q * new_t; t = new_t; new_t = tmp;
            tmp = r - q * new_r; r = new_r; new_r = tmp;
        }
        if (t < 0) t += p_;
        return static_cast<Element>(t);
    }

    std::string to_string(Element a) const { return std::to_string(a); }

    // --- Montgomery domain (dense kernel only) ---
    // redc(t) = t * 2^-32 mod p for t < p * 2^32.
    u32 redc(u64 t) const {
        u32 m = static_cast<u32>(t) * pinv_neg_;
        u64 u = (t + static_cast<u64>(m) * p_) >> 32;
        return u >= p_ ? static_cast<u32>(u - p_) : static_cast<u32>(u);
    }
    u32 to_mont(Element a) const { return redc(static_cast<u64>(a) * r2_); }
    Element from_mont(u32 a) const { return redc(a); }
    u32 mont_mul(u32 a, u32 b) const { return redc(static_cast<u64>(a) * b); }
    u32 mont_one() const { return mont_one_; }
    u32 pinv_neg() const { return pinv_neg_; }

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }

private:
    u32 p_;
    u32 pinv_neg_; // -p^{-1} mod 2^32
    u32 r2_;       // 2^64 mod p
    u32 mont_one_; // 2^32 mod p
};

// Exact rationals. Slow; intended for oracle-scale cross checks of the
// prime-field pipeline, not for production-size ranks.
class RationalField {
public:
    using Element = boost::multiprecision::cpp_rational;

    u64 characteristic() const { return 0; }

    static Element zero() { return Element(0); }
    Element one() const { return Element(1); }
    bool is_zero(const Element& a) const { return a == 0; }

    Element from_i64(i64 x) const { return Element(x); }

    Element add(const Element& a, const Element& b) const { return a + b; }
    Element sub(const Element& a, const Element& b) const { return a - b; }
    Element neg(const Element& a) const { return -a; }
    Element mul(const Element& a, const Element& b) const { return a * b; }
    Element inv(const Element& a) const {
        if (a == 0) throw std::domain_error("RationalField::inv(0)");
        return 1 / a;
    }

    std::string to_string(const Element& a) const { return a.str(); }

    bool operator==(const RationalField&) const { return true; }
};

// Default prime pair: the two largest primes below 2^31. Every production
// rank is computed under both and must agree.
inline constexpr u64 kDefaultPrimeA = 2147483647ull;
inline constexpr u64 kDefaultPrimeB = 2147483629ull;

} // namespace npsurf
