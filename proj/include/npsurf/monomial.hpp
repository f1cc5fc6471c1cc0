#pragma once
// Monomials of fixed total degree in three variables w0, w1, w2.
//
// Degree-n monomials are ordered descending in (exponent of w0, exponent
// of w1): w0^n, w0^(n-1)w1, w0^(n-1)w2, ..., w2^n. The position of
// w0^a w1^b w2^(n-a-b) is (n-a)(n-a+1)/2 + (n-a-b). For n = 2 this reads
// w0^2, w0w1, w0w2, w1^2, w1w2, w2^2.

#include <array>
#include <stdexcept>

#include "field.hpp"

namespace npsurf {

inline u64 binom(u64 n, u64 k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    u64 r = 1;
    for (u64 i = 1; i <= k; ++i) {
        u64 num = n - k + i;
        // r * num always divides evenly at each step; guard the product
        if (r > ~0ull / num) throw std::overflow_error("binom: overflow");
        r = r * num / i;
    }
    return r;
}

// Number of degree-n monomials in three variables.
inline u64 mono_count(u64 n) { return (n + 1) * (n + 2) / 2; }

struct Mono {
    u32 a, b, c; // exponents of w0, w1, w2
    u32 deg() const { return a + b + c; }
};

inline u64 mono_index(u64 n, u64 a, u64 b) {
    if (a + b > n) throw std::invalid_argument("mono_index: exponents exceed degree");
    return (n - a) * (n - a + 1) / 2 + (n - a - b);
}

inline u64 mono_index(u64 n, const Mono& m) { return mono_index(n, m.a, m.b); }

inline Mono mono_unrank(u64 n, u64 idx) {
    if (idx >= mono_count(n)) throw std::invalid_argument("mono_unrank: index out of range");
    // find d = n - a: largest d with d(d+1)/2 <= idx
    u64 d = 0;
    while ((d + 1) * (d + 2) / 2 <= idx) ++d;
    u64 rem = idx - d * (d + 1) / 2; // = d - b
    return Mono{static_cast<u32>(n - d), static_cast<u32>(d - rem),
                static_cast<u32>(rem)};
}

// Index in degree n1+n2 of the product of the i1-th degree-n1 monomial and
// the i2-th degree-n2 monomial.
inline u64 mono_mul_index(u64 n1, u64 i1, u64 n2, u64 i2) {
    Mono x = mono_unrank(n1, i1);
    Mono y = mono_unrank(n2, i2);
    return mono_index(n1 + n2, x.a + y.a, x.b + y.b);
}

} // namespace npsurf
