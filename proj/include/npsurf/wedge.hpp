#pragma once
// p-element subsets of {0, ..., n-1} in colexicographic order.
//
// The subset {s_0 < s_1 < ... < s_{p-1}} has rank sum_j C(s_j, j+1); ranks
// run 0 .. C(n,p)-1 and the successor increments the least movable element.
// Colex rank does not depend on n, which keeps block indices stable while
// a differential is assembled subset by subset.

#include <array>

#include "monomial.hpp"

namespace npsurf {

// Pascal triangle cache; rows up to 63 stay exact in 64 bits.
inline u64 choose(u64 n, u64 k) {
    constexpr u64 kRows = 64;
    static const auto tbl = [] {
        std::array<std::array<u64, kRows>, kRows> t{};
        for (u64 i = 0; i < kRows; ++i) {
            t[i][0] = 1;
            for (u64 j = 1; j <= i; ++j)
                t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
        }
        return t;
    }();
    if (k > n) return 0;
    if (n >= kRows) throw std::invalid_argument("choose: n too large for exact table");
    return tbl[n][k];
}

inline u64 wedge_count(u64 n, u64 p) { return choose(n, p); }

inline u64 wedge_rank(const u32* s, u64 p) {
    u64 r = 0;
    for (u64 j = 0; j < p; ++j) r += choose(s[j], j + 1);
    return r;
}

inline void wedge_unrank(u64 rank, u64 p, u32* out) {
    for (u64 j = p; j-- > 0;) {
        u32 v = static_cast<u32>(j); // least admissible element at position j
        while (choose(v + 1, j + 1) <= rank) ++v;
        out[j] = v;
        rank -= choose(v, j + 1);
    }
}

// Advance to the colex successor among p-subsets of {0..n-1}; returns false
// past the last subset {n-p, ..., n-1}.
inline bool wedge_next(u32* s, u64 p, u64 n) {
    for (u64 j = 0; j < p; ++j) {
        const u32 cap = (j + 1 < p) ? s[j + 1] : static_cast<u32>(n);
        if (s[j] + 1 < cap) {
            ++s[j];
            for (u64 l = 0; l < j; ++l) s[l] = static_cast<u32>(l);
            return true;
        }
    }
    return false;
}

} // namespace npsurf
