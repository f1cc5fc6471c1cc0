#pragma once
// Immutable sparse matrices over an exact field, plus a small dense type
// used by the elimination internals and by oracle-scale code.
//
// SparseMatrix invariants: entries sorted row-major, positions in bounds,
// no duplicate positions, no explicitly stored zeros.

#include <algorithm>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "field.hpp"

namespace npsurf {

template <class F>
class DenseMatrix {
public:
    using E = typename F::Element;

    DenseMatrix(const F& f, u64 rows, u64 cols)
        : field_(f), rows_(rows), cols_(cols), a_(rows * cols, F::zero()) {}

    u64 rows() const { return rows_; }
    u64 cols() const { return cols_; }
    const F& field() const { return field_; }

    E& at(u64 r, u64 c) { return a_[r * cols_ + c]; }
    const E& at(u64 r, u64 c) const { return a_[r * cols_ + c]; }
    E* row_ptr(u64 r) { return a_.data() + r * cols_; }
    const E* row_ptr(u64 r) const { return a_.data() + r * cols_; }

private:
    F field_;
    u64 rows_, cols_;
    std::vector<E> a_;
};

template <class F>
class SparseMatrix {
public:
    using E = typename F::Element;
    struct Entry {
        u64 row, col;
        E val;
    };

    SparseMatrix(const F& f, u64 rows, u64 cols)
        : field_(f), rows_(rows), cols_(cols) {}

    // Sorts, validates the representation invariants, drops nothing:
    // out-of-bounds positions, duplicates and stored zeros are errors
    // (callers are expected to produce clean entry lists).
    static SparseMatrix from_entries(const F& f, u64 rows, u64 cols,
                                     std::vector<Entry> entries) {
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        for (size_t i = 0; i < entries.size(); ++i) {
            const Entry& e = entries[i];
            if (e.row >= rows || e.col >= cols)
                throw std::invalid_argument("SparseMatrix: entry out of bounds");
            if (f.is_zero(e.val))
                throw std::invalid_argument("SparseMatrix: explicit zero entry");
            if (i > 0 && entries[i - 1].row == e.row && entries[i - 1].col == e.col)
                throw std::invalid_argument("SparseMatrix: duplicate position");
        }
        SparseMatrix m(f, rows, cols);
        m.entries_ = std::move(entries);
        return m;
    }

    static SparseMatrix from_dense(const DenseMatrix<F>& d) {
        std::vector<Entry> es;
        for (u64 r = 0; r < d.rows(); ++r)
            for (u64 c = 0; c < d.cols(); ++c)
                if (!d.field().is_zero(d.at(r, c))) es.push_back({r, c, d.at(r, c)});
        return from_entries(d.field(), d.rows(), d.cols(), std::move(es));
    }

    DenseMatrix<F> to_dense() const {
        DenseMatrix<F> d(field_, rows_, cols_);
        for (const Entry& e : entries_) d.at(e.row, e.col) = e.val;
        return d;
    }

    u64 rows() const { return rows_; }
    u64 cols() const { return cols_; }
    u64 nnz() const { return entries_.size(); }
    const F& field() const { return field_; }
    const std::vector<Entry>& entries() const { return entries_; }

    // y = M x for a sparse vector x given as (index, value) pairs; returns
    // the nonzero result coordinates, sorted by index.
    std::vector<std::pair<u64, E>> apply(const std::vector<std::pair<u64, E>>& x) const {
        std::vector<std::pair<u64, E>> acc;
        for (const Entry& e : entries_) {
            // entries are row-major; a column-indexed structure would be
            // faster, but apply() is only used on oracle-scale matrices
            for (const auto& [ci, cv] : x)
                if (e.col == ci) acc.push_back({e.row, field_.mul(e.val, cv)});
        }
        std::sort(acc.begin(), acc.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<u64, E>> out;
        for (const auto& [i, v] : acc) {
            if (!out.empty() && out.back().first == i)
                out.back().second = field_.add(out.back().second, v);
            else
                out.push_back({i, v});
        }
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [&](const auto& p) { return field_.is_zero(p.second); }),
                  out.end());
        return out;
    }

    // y = M x for a dense coordinate vector; one pass over the entries.
    std::vector<E> apply_dense(const std::vector<E>& x) const {
        if (x.size() != cols_)
            throw std::invalid_argument("apply_dense: length mismatch");
        std::vector<E> y(rows_, F::zero());
        for (const Entry& e : entries_)
            y[e.row] = field_.add(y[e.row], field_.mul(e.val, x[e.col]));
        return y;
    }

private:
    F field_;
    u64 rows_, cols_;
    std::vector<Entry> entries_;
};

// SMS triplet exchange format: header "rows cols M", one "i j v" line per
// entry (1-based), terminated by "0 0 0". Values are printed as residues
// resp. exact rationals.
template <class F>
void write_sms(std::ostream& os, const SparseMatrix<F>& m) {
    os << m.rows() << ' ' << m.cols() << " M\n";
    for (const auto& e : m.entries())
        os << e.row + 1 << ' ' << e.col + 1 << ' ' << m.field().to_string(e.val) << '\n';
    os << "0 0 0\n";
}

inline SparseMatrix<PrimeField> read_sms_fp(std::istream& is, const PrimeField& f) {
    u64 rows, cols;
    std::string tag;
    if (!(is >> rows >> cols >> tag)) throw std::runtime_error("sms: bad header");
    std::vector<SparseMatrix<PrimeField>::Entry> es;
    for (;;) {
        i64 r, c, v;
        if (!(is >> r >> c >> v)) throw std::runtime_error("sms: truncated");
        if (r == 0 && c == 0) break;
        es.push_back({static_cast<u64>(r - 1), static_cast<u64>(c - 1), f.from_i64(v)});
    }
    return SparseMatrix<PrimeField>::from_entries(f, rows, cols, std::move(es));
}

} // namespace npsurf
