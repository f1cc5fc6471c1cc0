#pragma once
// Exact elimination: rank, reduced row echelon form, kernel bases.
//
// rank() runs a sparse phase with Markowitz-style pivoting and hands the
// remaining active block to a dense kernel once it densifies or shrinks
// below a threshold. Pivot choice is deterministic for a fixed field and
// input; score ties break by lowest column, then lowest row.
//
// The dense prime-field kernel works in the Montgomery domain and
// eliminates in panels of up to 8 pivots so each sweep of the trailing
// block performs 8 fused multiply-subtracts per load/store pair. Products
// are accumulated two at a time: for p < 2^31, m0*r0 + m1*r1 <= 2(p-1)^2
// < p*2^32, the REDC input bound. Three products would overflow it.

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace npsurf {

struct ElimLimits {
    // Hard refusal threshold: no dense block larger than this is allocated;
    // the sparse phase throws SizeGuard rather than fill past it. Callers
    // surface refusals loudly, they never silently skip.
    u64 max_dense_bytes = 600ull * 1000 * 1000;
    // Matrices whose full dense footprint fits here skip the sparse phase.
    u64 dense_direct_bytes = 48ull * 1000 * 1000;
    // Sparse phase hands off when the active block reaches this density...
    double dense_density = 0.05;
    // ...or when fill exceeds this multiple of the input nnz.
    double fill_growth = 2.5;
    // Cap on candidate rows examined per Markowitz pivot search.
    u64 markowitz_scan = 128;
};

class SizeGuard : public std::runtime_error {
public:
    u64 rows, cols, bytes;
    SizeGuard(u64 r, u64 c, u64 b)
        : std::runtime_error("size guard: dense block " + std::to_string(r) + "x" +
                             std::to_string(c) + " (" + std::to_string(b) +
                             " bytes) exceeds the configured limit"),
          rows(r), cols(c), bytes(b) {}
};

namespace detail {

//////////////////////////////////////////////////////////////////////////
// dense prime-field rank (Montgomery domain, panel elimination)
//////////////////////////////////////////////////////////////////////////

// x[lo..hi) -= sum_i mult[i] * src[i][lo..hi), all in Montgomery form.
// Products are folded pairwise into one REDC so the target row is loaded
// and stored once per panel instead of once per pivot.
inline void fp_fused_update(const PrimeField& f, u32* __restrict x,
                            const u32* const* src, const u32* mult, int k,
                            u64 lo, u64 hi) {
    const u32 p = f.modulus();
    const u32 pinv = f.pinv_neg();
    for (u64 j = lo; j < hi; ++j) {
        u32 acc = x[j];
        int i = 0;
        for (; i + 2 <= k; i += 2) {
            u64 s = static_cast<u64>(mult[i]) * src[i][j] +
                    static_cast<u64>(mult[i + 1]) * src[i + 1][j];
            u32 mm = static_cast<u32>(s) * pinv;
            u32 sm = static_cast<u32>((s + static_cast<u64>(mm) * p) >> 32);
            sm = sm >= p ? sm - p : sm;
            acc = acc >= sm ? acc - sm : acc + p - sm;
        }
        if (i < k) {
            u64 s = static_cast<u64>(mult[i]) * src[i][j];
            u32 mm = static_cast<u32>(s) * pinv;
            u32 sm = static_cast<u32>((s + static_cast<u64>(mm) * p) >> 32);
            sm = sm >= p ? sm - p : sm;
            acc = acc >= sm ? acc - sm : acc + p - sm;
        }
        x[j] = acc;
    }
}

// Rank of an m x n row-major matrix with entries in Montgomery form.
// Destroys the contents. Panel invariants: a pivot row is fully updated
// and normalized the moment it is promoted; for the remaining active rows
// each scanned column is materialized exactly once (pivots discovered
// after a column was scanned contribute nothing there, because every
// already-scanned column is either pivotal, hence cleared, or identically
// zero below the stair), and the value left at a pivot column is exactly
// the multiplier the trailing bulk update needs.
inline u64 fp_dense_rank(const PrimeField& f, std::vector<u32>& a, u64 m, u64 n) {
    if (m == 0 || n == 0) return 0;
    constexpr int kPanel = 8;
    const u32 p = f.modulus();
    const u32 pinv = f.pinv_neg();
    std::vector<u32*> rp(m);
    for (u64 i = 0; i < m; ++i) rp[i] = a.data() + i * n;

    u64 rank = 0;
    u64 col = 0;
    const u32* src[kPanel];
    u32 mult[kPanel];

    while (rank < m && col < n) {
        int k = 0;
        u64 pcols[kPanel];
        u64 c = col;
        for (; c < n && k < kPanel && rank + k < m; ++c) {
            u64 piv_row = m;
            for (u64 i = rank + k; i < m; ++i) {
                u32* x = rp[i];
                u32 t = x[c];
                int j = 0;
                for (; j + 2 <= k; j += 2) {
                    u64 s = static_cast<u64>(x[pcols[j]]) * rp[rank + j][c] +
                            static_cast<u64>(x[pcols[j + 1]]) * rp[rank + j + 1][c];
                    u32 mm = static_cast<u32>(s) * pinv;
                    u32 sm = static_cast<u32>((s + static_cast<u64>(mm) * p) >> 32);
                    sm = sm >= p ? sm - p : sm;
                    t = t >= sm ? t - sm : t + p - sm;
                }
                if (j < k) {
                    u64 s = static_cast<u64>(x[pcols[j]]) * rp[rank + j][c];
                    u32 mm = static_cast<u32>(s) * pinv;
                    u32 sm = static_cast<u32>((s + static_cast<u64>(mm) * p) >> 32);
                    sm = sm >= p ? sm - p : sm;
                    t = t >= sm ? t - sm : t + p - sm;
                }
                x[c] = t;
                if (piv_row == m && t != 0) piv_row = i;
            }
            if (piv_row == m) continue;
            std::swap(rp[rank + k], rp[piv_row]);
            u32* pr = rp[rank + k];
            if (k > 0) {
                for (int j = 0; j < k; ++j) {
                    src[j] = rp[rank + j];
                    mult[j] = pr[pcols[j]];
                }
                fp_fused_update(f, pr, src, mult, k, c + 1, n);
            }
            u32 scale = f.to_mont(f.inv(f.from_mont(pr[c])));
            for (u64 j = c + 1; j < n; ++j) pr[j] = f.mont_mul(pr[j], scale);
            pr[c] = f.mont_one();
            pcols[k++] = c;
        }
        if (k == 0) break;

        if (c < n) {
            for (int j = 0; j < k; ++j) src[j] = rp[rank + j];
            for (u64 i = rank + k; i < m; ++i) {
                u32* x = rp[i];
                const u32* lsrc[kPanel];
                u32 lmult[kPanel];
                int live = 0;
                for (int j = 0; j < k; ++j) {
                    u32 mj = x[pcols[j]];
                    if (mj != 0) {
                        lsrc[live] = src[j];
                        lmult[live] = mj;
                        ++live;
                    }
                }
                if (live > 0) fp_fused_update(f, x, lsrc, lmult, live, c, n);
            }
        }
        rank += k;
        col = c;
    }
    return rank;
}

//////////////////////////////////////////////////////////////////////////
// generic dense elimination (rationals and other slow exact fields)
//////////////////////////////////////////////////////////////////////////

template <class F>
u64 generic_dense_rank(DenseMatrix<F>& d) {
    const F& f = d.field();
    const u64 m = d.rows(), n = d.cols();
    u64 rank = 0;
    for (u64 c = 0; c < n && rank < m; ++c) {
        u64 piv = m;
        for (u64 i = rank; i < m; ++i)
            if (!f.is_zero(d.at(i, c))) { piv = i; break; }
        if (piv == m) continue;
        if (piv != rank)
            for (u64 j = c; j < n; ++j) std::swap(d.at(rank, j), d.at(piv, j));
        auto pv = f.inv(d.at(rank, c));
        for (u64 i = rank + 1; i < m; ++i) {
            if (f.is_zero(d.at(i, c))) continue;
            auto mlt = f.mul(d.at(i, c), pv);
            d.at(i, c) = F::zero();
            for (u64 j = c + 1; j < n; ++j)
                d.at(i, j) = f.sub(d.at(i, j), f.mul(mlt, d.at(rank, j)));
        }
        ++rank;
    }
    return rank;
}

template <class F>
u64 dense_rank_of(const SparseMatrix<F>& m) {
    if constexpr (std::is_same_v<F, PrimeField>) {
        const F& f = m.field();
        std::vector<u32> a(m.rows() * m.cols(), 0);
        for (const auto& e : m.entries()) a[e.row * m.cols() + e.col] = f.to_mont(e.val);
        return fp_dense_rank(f, a, m.rows(), m.cols());
    } else {
        DenseMatrix<F> d = m.to_dense();
        return generic_dense_rank(d);
    }
}

//////////////////////////////////////////////////////////////////////////
// sparse phase state
//////////////////////////////////////////////////////////////////////////

template <class F>
struct SparseWork {
    using E = typename F::Element;
    struct Cell {
        u32 col;
        E val;
    };

    const F& f;
    std::vector<std::vector<Cell>> rows;     // active rows, sorted by col
    std::vector<char> row_active;
    std::vector<u32> col_count;              // nnz per column over active rows
    std::vector<std::vector<u32>> col_rows;  // rows touching a column; may be stale
    std::vector<std::vector<u32>> buckets;   // rows by length; entries may be stale
    u64 min_len = 1;
    u64 nnz = 0;
    u64 active_rows = 0, active_cols = 0;

    explicit SparseWork(const SparseMatrix<F>& m) : f(m.field()) {
        rows.resize(m.rows());
        row_active.assign(m.rows(), 0);
        col_count.assign(m.cols(), 0);
        col_rows.resize(m.cols());
        for (const auto& e : m.entries()) {
            rows[e.row].push_back({static_cast<u32>(e.col), e.val});
            ++col_count[e.col];
            col_rows[e.col].push_back(static_cast<u32>(e.row));
            ++nnz;
        }
        for (u64 r = 0; r < rows.size(); ++r) {
            if (rows[r].empty()) continue;
            row_active[r] = 1;
            ++active_rows;
            bucket_push(static_cast<u32>(r));
        }
        for (u32 c : col_count)
            if (c > 0) ++active_cols;
    }

    void bucket_push(u32 r) {
        const u64 len = rows[r].size();
        if (buckets.size() <= len) buckets.resize(len + 1);
        buckets[len].push_back(r);
        if (len < min_len) min_len = len;
    }

    const E* find(u32 r, u32 c) const {
        const auto& row = rows[r];
        auto it = std::lower_bound(row.begin(), row.end(), c,
                                   [](const Cell& a, u32 col) { return a.col < col; });
        return (it != row.end() && it->col == c) ? &it->val : nullptr;
    }

    // rows[tgt] -= mlt * rows[src_row] (sorted merge); maintains counts.
    void combine(u32 tgt, u32 src_row, const E& mlt) {
        const auto& pr = rows[src_row];
        auto& tr = rows[tgt];
        std::vector<Cell> out;
        out.reserve(tr.size() + pr.size());
        size_t i = 0, j = 0;
        while (i < tr.size() || j < pr.size()) {
            if (j == pr.size() || (i < tr.size() && tr[i].col < pr[j].col)) {
                out.push_back(std::move(tr[i]));
                ++i;
            } else if (i == tr.size() || pr[j].col < tr[i].col) {
                E v = f.neg(f.mul(mlt, pr[j].val));
                if (!f.is_zero(v)) {
                    if (col_count[pr[j].col]++ == 0) ++active_cols;
                    col_rows[pr[j].col].push_back(tgt);
                    ++nnz;
                    out.push_back({pr[j].col, std::move(v)});
                }
                ++j;
            } else {
                E v = f.sub(tr[i].val, f.mul(mlt, pr[j].val));
                if (f.is_zero(v)) {
                    if (--col_count[tr[i].col] == 0) --active_cols;
                    --nnz;
                } else {
                    out.push_back({tr[i].col, std::move(v)});
                }
                ++i;
                ++j;
            }
        }
        tr = std::move(out);
        if (tr.empty()) {
            row_active[tgt] = 0;
            --active_rows;
        } else {
            bucket_push(tgt);
        }
    }

    void retire_row(u32 r) {
        for (const Cell& c : rows[r]) {
            if (--col_count[c.col] == 0) --active_cols;
            --nnz;
        }
        rows[r] = {};
        row_active[r] = 0;
        --active_rows;
    }
};

} // namespace detail

//////////////////////////////////////////////////////////////////////////
// public entry points
//////////////////////////////////////////////////////////////////////////

template <class F>
u64 rank(const SparseMatrix<F>& m, const ElimLimits& lim = {}) {
    if (m.nnz() == 0) return 0;
    if (m.rows() * m.cols() * sizeof(u32) <= lim.dense_direct_bytes)
        return detail::dense_rank_of(m);

    const F& f = m.field();
    detail::SparseWork<F> w(m);
    const u64 nnz0 = w.nnz;
    u64 rank_sparse = 0;

    auto dense_finish = [&]() -> u64 {
        std::vector<u64> col_map(w.col_count.size(), ~0ull);
        u64 nc = 0;
        for (u64 c = 0; c < w.col_count.size(); ++c)
            if (w.col_count[c] > 0) col_map[c] = nc++;
        const u64 nr = w.active_rows;
        if (nr == 0 || nc == 0) return rank_sparse;
        const u64 bytes = nr * nc * sizeof(u32);
        if (bytes > lim.max_dense_bytes) throw SizeGuard(nr, nc, bytes);
        if constexpr (std::is_same_v<F, PrimeField>) {
            std::vector<u32> a(nr * nc, 0);
            u64 r = 0;
            for (u64 i = 0; i < w.rows.size(); ++i) {
                if (!w.row_active[i]) continue;
                for (const auto& cell : w.rows[i])
                    a[r * nc + col_map[cell.col]] = f.to_mont(cell.val);
                ++r;
            }
            return rank_sparse + detail::fp_dense_rank(f, a, nr, nc);
        } else {
            DenseMatrix<F> d(f, nr, nc);
            u64 r = 0;
            for (u64 i = 0; i < w.rows.size(); ++i) {
                if (!w.row_active[i]) continue;
                for (const auto& cell : w.rows[i]) d.at(r, col_map[cell.col]) = cell.val;
                ++r;
            }
            return rank_sparse + detail::generic_dense_rank(d);
        }
    };

    for (;;) {
        if (w.active_rows == 0 || w.active_cols == 0) return rank_sparse;
        const u64 act_bytes = w.active_rows * w.active_cols * sizeof(u32);
        const double density =
            static_cast<double>(w.nnz) /
            (static_cast<double>(w.active_rows) * static_cast<double>(w.active_cols));
        if (act_bytes <= lim.dense_direct_bytes || density >= lim.dense_density ||
            w.nnz > static_cast<u64>(lim.fill_growth * static_cast<double>(nnz0)))
            return dense_finish();

        // Markowitz search over ascending length buckets, budget-capped.
        u64 best_score = ~0ull;
        u32 best_row = 0, best_col = 0;
        u64 scanned = 0;
        for (u64 len = w.min_len; len < w.buckets.size() && scanned < lim.markowitz_scan;
             ++len) {
            auto& b = w.buckets[len];
            size_t bi = 0;
            while (bi < b.size() && scanned < lim.markowitz_scan) {
                const u32 r = b[bi];
                if (!w.row_active[r] || w.rows[r].size() != len) {
                    b[bi] = b.back(); // stale entry; lazy removal
                    b.pop_back();
                    continue;
                }
                ++bi;
                ++scanned;
                for (const auto& cell : w.rows[r]) {
                    const u64 score =
                        (len - 1) * static_cast<u64>(w.col_count[cell.col] - 1);
                    if (score < best_score ||
                        (score == best_score &&
                         (cell.col < best_col || (cell.col == best_col && r < best_row)))) {
                        best_score = score;
                        best_row = r;
                        best_col = cell.col;
                    }
                }
            }
            if (b.empty() && len == w.min_len && len + 1 < w.buckets.size()) ++w.min_len;
            if (best_score == 0) break;
        }
        if (best_score == ~0ull) return dense_finish();

        // Eliminate best_col from every other row that touches it.
        const auto* pv = w.find(best_row, best_col);
        auto pinv = f.inv(*pv);
        std::vector<u32> holders;
        holders.swap(w.col_rows[best_col]);
        std::sort(holders.begin(), holders.end());
        holders.erase(std::unique(holders.begin(), holders.end()), holders.end());
        for (u32 hr : holders) {
            if (hr == best_row || !w.row_active[hr]) continue;
            const auto* v = w.find(hr, best_col);
            if (!v) continue; // stale
            w.combine(hr, best_row, f.mul(*v, pinv));
        }
        w.retire_row(best_row);
        if (w.col_count[best_col] != 0)
            throw std::logic_error("elim: pivot column not cleared");
        ++rank_sparse;
    }
}

// Reduced row echelon form (dense, canonical). Same shape as the input;
// rows beyond the rank are zero. Pivot columns strictly increase.
template <class F>
std::pair<DenseMatrix<F>, std::vector<u64>> rref_dense(const SparseMatrix<F>& m,
                                                       const ElimLimits& lim = {}) {
    const u64 bytes = m.rows() * m.cols() * sizeof(typename F::Element);
    if (bytes > lim.max_dense_bytes) throw SizeGuard(m.rows(), m.cols(), bytes);
    const F& f = m.field();
    DenseMatrix<F> d = m.to_dense();
    const u64 rows = d.rows(), cols = d.cols();
    std::vector<u64> pivots;
    u64 r = 0;
    for (u64 c = 0; c < cols && r < rows; ++c) {
        u64 piv = rows;
        for (u64 i = r; i < rows; ++i)
            if (!f.is_zero(d.at(i, c))) { piv = i; break; }
        if (piv == rows) continue;
        if (piv != r)
            for (u64 j = 0; j < cols; ++j) std::swap(d.at(r, j), d.at(piv, j));
        auto s = f.inv(d.at(r, c));
        for (u64 j = c; j < cols; ++j) d.at(r, j) = f.mul(d.at(r, j), s);
        for (u64 i = 0; i < rows; ++i) {
            if (i == r || f.is_zero(d.at(i, c))) continue;
            auto mlt = d.at(i, c);
            for (u64 j = c; j < cols; ++j)
                d.at(i, j) = f.sub(d.at(i, j), f.mul(mlt, d.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(d), std::move(pivots)};
}

template <class F>
SparseMatrix<F> rref(const SparseMatrix<F>& m, const ElimLimits& lim = {}) {
    auto [d, piv] = rref_dense(m, lim);
    (void)piv;
    return SparseMatrix<F>::from_dense(d);
}

// Basis of the right null space, returned as rows in reduced echelon form.
// rank(M) + kernel_basis(M).rows() == M.cols() always.
template <class F>
SparseMatrix<F> kernel_basis(const SparseMatrix<F>& m, const ElimLimits& lim = {}) {
    const F& f = m.field();
    auto [d, piv] = rref_dense(m, lim);
    const u64 n = m.cols();
    std::vector<char> is_pivot(n, 0);
    for (u64 c : piv) is_pivot[c] = 1;
    std::vector<typename SparseMatrix<F>::Entry> es;
    u64 krow = 0;
    for (u64 fcol = 0; fcol < n; ++fcol) {
        if (is_pivot[fcol]) continue;
        es.push_back({krow, fcol, f.one()});
        for (u64 i = 0; i < piv.size(); ++i)
            if (!f.is_zero(d.at(i, fcol))) es.push_back({krow, piv[i], f.neg(d.at(i, fcol))});
        ++krow;
    }
    auto kern = SparseMatrix<F>::from_entries(f, krow, n, std::move(es));
    // the free-column construction is echelon up to row order and scaling;
    // one more pass makes it canonical
    return rref(kern, lim);
}

} // namespace npsurf
