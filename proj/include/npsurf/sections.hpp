#pragma once
// Spaces of plane forms with prescribed vanishing at fat points.
//
// Vanishing to order mu at a point is imposed through the derivative rows
// of exact order min(mu - 1, deg): over a field of characteristic zero or
// larger than deg, the Euler relation (deg - |a|) D^a = sum_j w_j D^(a+e_j)
// propagates vanishing downward from the top order, so the lower-order rows
// are redundant and the count per point stays at C(mu + 1, 2) whenever
// deg >= mu - 1. The clamp to deg handles the degenerate low-degree case,
// where order-deg rows already force the form to zero.

#include <stdexcept>
#include <string>
#include <vector>

#include "elim.hpp"
#include "fatpoints.hpp"
#include "monomial.hpp"

namespace npsurf {

namespace detail {

inline u64 falling(u64 b, u64 a) {
    u64 r = 1;
    for (u64 i = 0; i < a; ++i) r *= b - i;
    return r;
}

} // namespace detail

// 0 means characteristic zero.
template <class F>
u64 field_characteristic(const F& f) {
    if constexpr (requires { f.modulus(); })
        return f.modulus();
    else
        return 0;
}

// Condition rows for: forms of degree `deg` vanishing to order mults[i] at
// pts[i]. Points with multiplicity zero contribute nothing (twisted spaces
// clamp multiplicities and may zero some out).
template <class F>
SparseMatrix<F> vanishing_matrix(const F& f, const std::vector<PointP2<F>>& pts,
                                 const std::vector<u32>& mults, u64 deg) {
    if (pts.size() != mults.size())
        throw std::invalid_argument("vanishing_matrix: points/mults size mismatch");
    const u64 ch = field_characteristic(f);
    if (ch != 0 && deg >= ch)
        throw std::domain_error("vanishing_matrix: characteristic " + std::to_string(ch) +
                                " does not exceed degree " + std::to_string(deg) +
                                "; derivative conditions need char > deg");
    using E = typename F::Element;
    const u64 ncols = mono_count(deg);
    std::vector<typename SparseMatrix<F>::Entry> es;
    u64 row = 0;
    for (size_t pi = 0; pi < pts.size(); ++pi) {
        if (mults[pi] == 0) continue;
        const u64 order = std::min<u64>(mults[pi] - 1, deg);
        // coordinate powers up to deg
        std::vector<E> pw[3];
        for (int j = 0; j < 3; ++j) {
            pw[j].resize(deg + 1);
            pw[j][0] = f.one();
            for (u64 e = 1; e <= deg; ++e) pw[j][e] = f.mul(pw[j][e - 1], pts[pi].c[j]);
        }
        for (u64 a0 = order + 1; a0-- > 0;) {
            for (u64 a1 = order - a0 + 1; a1-- > 0;) {
                const u64 a2 = order - a0 - a1;
                const u64 alpha[3] = {a0, a1, a2};
                for (u64 idx = 0; idx < ncols; ++idx) {
                    const Mono b = mono_unrank(deg, idx);
                    const u64 beta[3] = {b.a, b.b, b.c};
                    if (beta[0] < a0 || beta[1] < a1 || beta[2] < a2) continue;
                    u64 ff = 1;
                    for (int j = 0; j < 3; ++j) ff *= detail::falling(beta[j], alpha[j]);
                    E v = f.from_i64(static_cast<i64>(ff));
                    for (int j = 0; j < 3; ++j)
                        v = f.mul(v, pw[j][beta[j] - alpha[j]]);
                    if (!f.is_zero(v)) es.push_back({row, idx, std::move(v)});
                }
                ++row;
            }
        }
    }
    return SparseMatrix<F>::from_entries(f, row, ncols, std::move(es));
}

// A basis, as coefficient rows over the degree-deg monomials, of the forms
// satisfying the vanishing conditions. Rows are in reduced echelon form, so
// the basis is canonical for a fixed field.
template <class F>
struct SectionSpace {
    u64 deg;
    SparseMatrix<F> basis;

    u64 dim() const { return basis.rows(); }
};

template <class F>
SectionSpace<F> section_space(const F& f, const std::vector<PointP2<F>>& pts,
                              const std::vector<u32>& mults, u64 deg,
                              const ElimLimits& lim = {}) {
    return SectionSpace<F>{deg, kernel_basis(vanishing_matrix(f, pts, mults, deg), lim)};
}

// Hilbert function of the quotient by the ideal of the scheme: the number
// of independent conditions the scheme imposes in degree n.
template <class F>
u64 hilbert_quotient(const F& f, const FatPointScheme& z, u64 n,
                     const ElimLimits& lim = {}) {
    auto pts = reduce_points(f, z.points);
    return rank(vanishing_matrix(f, pts, z.mults, n), lim);
}

template <class F>
u64 h0_ideal(const F& f, const FatPointScheme& z, u64 n, const ElimLimits& lim = {}) {
    return mono_count(n) - hilbert_quotient(f, z, n, lim);
}

// One plus the least degree in which the scheme imposes independent
// conditions. Conditions are always independent from degree mult_sum - 1
// on, so the scan terminates. The empty control scheme imposes none; its
// value is fixed to 0 so thresholds like t >= sigma + 1 stay meaningful.
template <class F>
u64 sigma(const F& f, const FatPointScheme& z, const ElimLimits& lim = {}) {
    if (z.size() == 0) return 0;
    const u64 degz = z.degree();
    for (u64 n = 0; n <= z.mult_sum(); ++n)
        if (hilbert_quotient(f, z, n, lim) == degz) return n + 1;
    throw std::logic_error("sigma: conditions never became independent");
}

} // namespace npsurf
