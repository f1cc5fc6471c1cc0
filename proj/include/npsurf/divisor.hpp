#pragma once
// Divisor classes on the plane blown up at s points.
//
// Pic is free on E0 (pullback of a line) and the exceptional classes
// E1..Es; a class is stored as a*E0 - sum_i b_i*E_i, so the embedding
// divisor carries the multiplicities directly and the canonical class is
// a = -3, b_i = -1. The intersection form is diag(1, -1, ..., -1).
//
// Global sections are push-forwards: H^0 of a*E0 - sum b_i*E_i is the
// space of degree-a plane forms vanishing to order max(b_i, 0) at the
// i-th point, empty when a < 0 since E0 is nef.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "sections.hpp"

namespace npsurf {

struct DivisorClass {
    i64 a;
    std::vector<i64> b;

    static DivisorClass embedding(i64 t, const FatPointScheme& z) {
        DivisorClass d{t, {}};
        d.b.reserve(z.size());
        for (u32 m : z.mults) d.b.push_back(static_cast<i64>(m));
        return d;
    }

    static DivisorClass canonical(u64 s) { return DivisorClass{-3, std::vector<i64>(s, -1)}; }

    DivisorClass plus(const DivisorClass& o) const {
        if (b.size() != o.b.size())
            throw std::invalid_argument("DivisorClass: rank mismatch");
        DivisorClass r{a + o.a, b};
        for (size_t i = 0; i < b.size(); ++i) r.b[i] += o.b[i];
        return r;
    }

    DivisorClass times(i64 q) const {
        DivisorClass r{q * a, b};
        for (auto& v : r.b) v *= q;
        return r;
    }
};

inline i64 intersect(const DivisorClass& x, const DivisorClass& y) {
    if (x.b.size() != y.b.size())
        throw std::invalid_argument("intersect: rank mismatch");
    i64 r = x.a * y.a;
    for (size_t i = 0; i < x.b.size(); ++i) r -= x.b[i] * y.b[i];
    return r;
}

// Euler characteristic chi(D) = D.(D - K)/2 + 1; the product is always even.
inline i64 chi(const DivisorClass& d) {
    const DivisorClass k = DivisorClass::canonical(d.b.size());
    DivisorClass dk = d;
    dk.a -= k.a;
    for (size_t i = 0; i < d.b.size(); ++i) dk.b[i] -= k.b[i];
    return intersect(d, dk) / 2 + 1;
}

template <class F>
u64 h0(const F& f, const std::vector<PointP2<F>>& pts, const DivisorClass& d,
       const ElimLimits& lim = {}) {
    if (d.a < 0) return 0;
    if (pts.size() != d.b.size())
        throw std::invalid_argument("h0: rank mismatch");
    std::vector<u32> mults(d.b.size());
    for (size_t i = 0; i < d.b.size(); ++i)
        mults[i] = d.b[i] > 0 ? static_cast<u32>(d.b[i]) : 0;
    return mono_count(static_cast<u64>(d.a)) -
           rank(vanishing_matrix(f, pts, mults, static_cast<u64>(d.a)), lim);
}

// Which of the three terms of the bound achieved the max; ties resolve to
// the earliest listed.
enum class BindingTerm { kSigmaPlusOne, kMultSum, kLinearGrowth };

inline const char* binding_term_name(BindingTerm b) {
    switch (b) {
        case BindingTerm::kSigmaPlusOne: return "sigma+1";
        case BindingTerm::kMultSum: return "d";
        case BindingTerm::kLinearGrowth: return "1+(d+p)/3";
    }
    return "?";
}

// The least t for which the main bound admits property N_p:
// t >= max(sigma + 1, d, 1 + (d+p)/3) with d = sum of multiplicities; the
// third term is the least integer t with 3(t-1) >= d + p.
struct NpBound {
    u64 sigma;
    u64 d;
    u64 p;
    u64 t_min;
    BindingTerm binding;
};

inline u64 np_bound_value(u64 sigma_val, u64 d, u64 p) {
    const u64 third = (d + p + 2) / 3 + 1;
    return std::max(std::max(sigma_val + 1, d), third);
}

inline NpBound np_bound_from(u64 sigma_val, u64 d, u64 p) {
    const u64 third = (d + p + 2) / 3 + 1;
    const u64 t = std::max(std::max(sigma_val + 1, d), third);
    BindingTerm b = BindingTerm::kLinearGrowth;
    if (sigma_val + 1 == t) b = BindingTerm::kSigmaPlusOne;
    else if (d == t) b = BindingTerm::kMultSum;
    return NpBound{sigma_val, d, p, t, b};
}

template <class F>
NpBound np_bound(const F& f, const FatPointScheme& z, u64 p, const ElimLimits& lim = {}) {
    return np_bound_from(sigma(f, z, lim), z.mult_sum(), p);
}

// Largest p admitted by the bound at a given t (-1 when even p = 0 is not):
// p <= 3(t-1) - d once t clears sigma+1 and d.
inline i64 max_p_at(u64 sigma_val, u64 d, u64 t) {
    if (t < sigma_val + 1 || t < d) return -1;
    return static_cast<i64>(3 * (t - 1)) - static_cast<i64>(d);
}

// Predicted h^0(K + D_t) = t(t-3)/2 - sum_i C(m_i, 2) + 1. Valid once
// t >= d, where the higher cohomology of K + D_t vanishes; refused below
// that rather than returning an unproven number.
inline i64 riemann_roch_h0(u64 t, const FatPointScheme& z) {
    const u64 d = z.mult_sum();
    if (t < d)
        throw std::domain_error("riemann_roch_h0: t = " + std::to_string(t) +
                                " is below d = " + std::to_string(d) +
                                "; the count is only proven for t >= d");
    i64 r = static_cast<i64>(t) * (static_cast<i64>(t) - 3) / 2 + 1;
    for (u32 m : z.mults) r -= static_cast<i64>(m) * (m - 1) / 2;
    return r;
}

// N = h^0(D_t) - 1 together with the combinatorial lower bound
// C(t+2,2) - degZ - 1. The bound holds unconditionally (each condition
// kills at most one dimension); equality from t >= sigma. Below sigma + 1
// the class need not embed, so the result is flagged.
struct AmbientDim {
    i64 n;
    i64 lower_bound;
    bool very_ample;
};

template <class F>
AmbientDim ambient_dim(const F& f, const FatPointScheme& z, u64 t,
                       const ElimLimits& lim = {}) {
    const auto pts = reduce_points(f, z.points);
    const i64 n =
        static_cast<i64>(h0(f, pts, DivisorClass::embedding(static_cast<i64>(t), z), lim)) - 1;
    const i64 lower = static_cast<i64>(mono_count(t)) - static_cast<i64>(z.degree()) - 1;
    if (n < lower)
        throw std::logic_error("ambient_dim: N = " + std::to_string(n) +
                               " fell below the lower bound " + std::to_string(lower));
    return AmbientDim{n, lower, t >= sigma(f, z, lim) + 1};
}

} // namespace npsurf
