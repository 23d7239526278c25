#pragma once

// Exact integer and GF(2) linear algebra.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace circang {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<Int>;

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    template <class T>
    static IntMatrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols = 0) {
        if (!rows.empty()) cols = rows[0].size();
        IntMatrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = Int(rows[i][j]);
        }
        return m;
    }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    IntVector row(std::size_t i) const { return IntVector(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }
    IntVector col(std::size_t j) const {
        IntVector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
        IntMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Int& x = (*this)(i, k);
                if (x == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += x * o(k, j);
            }
        return r;
    }

    IntVector operator*(const IntVector& v) const {
        if (cols_ != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
        IntVector r(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    bool operator==(const IntMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    // Stack the rows of `below` under this matrix.
    IntMatrix stacked(const IntMatrix& below) const {
        if (rows_ && below.rows_ && cols_ != below.cols_) throw std::invalid_argument("stack shape mismatch");
        IntMatrix r(rows_ + below.rows_, rows_ ? cols_ : below.cols_);
        std::copy(a_.begin(), a_.end(), r.a_.begin());
        std::copy(below.a_.begin(), below.a_.end(), r.a_.begin() + a_.size());
        return r;
    }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
    }
    // row i += c * row j
    void add_row(std::size_t i, std::size_t j, const Int& c) {
        if (c == 0) return;
        for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) += c * (*this)(j, k);
    }
    // col i += c * col j
    void add_col(std::size_t i, std::size_t j, const Int& c) {
        if (c == 0) return;
        for (std::size_t k = 0; k < rows_; ++k) (*this)(k, i) += c * (*this)(k, j);
    }
    void negate_row(std::size_t i) {
        for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) = -(*this)(i, k);
    }
    void negate_col(std::size_t j) {
        for (std::size_t k = 0; k < rows_; ++k) (*this)(k, j) = -(*this)(k, j);
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> a_;
};

// Fraction-free (Bareiss) determinant.
inline Int determinant(IntMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = m.rows();
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return n ? sign * m(n - 1, n - 1) : Int(1);
}

// A = U * S * V, and P * A * Q = S with P = U^-1, Q = V^-1.
struct SNFDecomposition {
    IntMatrix U, S, V;
    IntMatrix P, Q;
    std::size_t rank = 0;

    std::vector<Int> invariant_factors() const {
        std::vector<Int> d(rank);
        for (std::size_t i = 0; i < rank; ++i) d[i] = S(i, i);
        return d;
    }
};

namespace detail {

inline Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

}  // namespace detail

inline SNFDecomposition smith_normal_form(const IntMatrix& A) {
    const std::size_t m = A.rows(), n = A.cols();
    SNFDecomposition d;
    IntMatrix S = A;
    IntMatrix P = IntMatrix::identity(m), U = IntMatrix::identity(m);
    IntMatrix Q = IntMatrix::identity(n), V = IntMatrix::identity(n);

    // Elementary operations, each applied consistently to S, P, U (rows) or S, Q, V (columns).
    auto row_swap = [&](std::size_t i, std::size_t j) {
        S.swap_rows(i, j);
        P.swap_rows(i, j);
        U.swap_cols(i, j);
    };
    auto row_add = [&](std::size_t i, std::size_t j, const Int& c) {
        S.add_row(i, j, c);
        P.add_row(i, j, c);
        U.add_col(j, i, -c);
    };
    auto row_neg = [&](std::size_t i) {
        S.negate_row(i);
        P.negate_row(i);
        U.negate_col(i);
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        S.swap_cols(i, j);
        Q.swap_cols(i, j);
        V.swap_rows(i, j);
    };
    auto col_add = [&](std::size_t i, std::size_t j, const Int& c) {
        S.add_col(i, j, c);
        Q.add_col(i, j, c);
        V.add_row(j, i, -c);
    };

    std::size_t t = 0;
    for (; t < std::min(m, n); ++t) {
        // Pivot: smallest nonzero |entry| in the trailing block, lowest (row, col) on ties.
        auto find_pivot = [&](std::size_t& pr, std::size_t& pc) {
            bool found = false;
            Int best;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j) {
                    if (S(i, j) == 0) continue;
                    Int a = detail::abs_int(S(i, j));
                    if (!found || a < best) {
                        found = true;
                        best = a;
                        pr = i;
                        pc = j;
                    }
                }
            return found;
        };
        std::size_t pr = 0, pc = 0;
        if (!find_pivot(pr, pc)) break;
        row_swap(t, pr);
        col_swap(t, pc);

        for (;;) {
            bool dirty = false;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (S(i, t) == 0) continue;
                row_add(i, t, -S(i, t) / S(t, t));
                if (S(i, t) != 0) dirty = true;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (S(t, j) == 0) continue;
                col_add(j, t, -S(t, j) / S(t, t));
                if (S(t, j) != 0) dirty = true;
            }
            if (dirty) {
                // A remainder survived: move the smallest entry of row/column t to the pivot.
                std::size_t bi = t, bj = t;
                Int best = detail::abs_int(S(t, t));
                for (std::size_t i = t + 1; i < m; ++i)
                    if (S(i, t) != 0 && detail::abs_int(S(i, t)) < best) best = detail::abs_int(S(i, t)), bi = i, bj = t;
                for (std::size_t j = t + 1; j < n; ++j)
                    if (S(t, j) != 0 && detail::abs_int(S(t, j)) < best) best = detail::abs_int(S(t, j)), bi = t, bj = j;
                row_swap(t, bi);
                col_swap(t, bj);
                continue;
            }
            // Divisibility: every trailing entry must be a multiple of the pivot.
            bool fixed = false;
            for (std::size_t i = t + 1; i < m && !fixed; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (S(i, j) % S(t, t) != 0) {
                        row_add(t, i, 1);
                        fixed = true;
                        break;
                    }
            if (!fixed) break;
        }
        if (S(t, t) < 0) row_neg(t);
    }
    d.rank = t;
    d.S = std::move(S);
    d.P = std::move(P);
    d.U = std::move(U);
    d.Q = std::move(Q);
    d.V = std::move(V);
    return d;
}

struct IntegerSolution {
    IntVector particular;
    std::vector<IntVector> kernel;
};

inline std::optional<IntegerSolution> integer_solve(const IntMatrix& A, const IntVector& b, const SNFDecomposition& snf) {
    if (b.size() != A.rows()) throw std::invalid_argument("integer_solve: rhs length mismatch");
    const std::size_t n = A.cols();
    IntVector pb = snf.P * b;
    IntVector y(n);
    for (std::size_t i = 0; i < pb.size(); ++i) {
        if (i < snf.rank) {
            if (pb[i] % snf.S(i, i) != 0) return std::nullopt;
            y[i] = pb[i] / snf.S(i, i);
        } else if (pb[i] != 0) {
            return std::nullopt;
        }
    }
    IntegerSolution sol;
    sol.particular = snf.Q * y;
    for (std::size_t j = snf.rank; j < n; ++j) sol.kernel.push_back(snf.Q.col(j));
    return sol;
}

inline std::optional<IntegerSolution> integer_solve(const IntMatrix& A, const IntVector& b) {
    return integer_solve(A, b, smith_normal_form(A));
}

struct TorusComponents {
    Int count;
    std::size_t dim = 0;
};

// Solutions of prod_j w_j^{E_ij} = sign_i on the torus (S^1)^n.
inline std::optional<TorusComponents> torus_solution_components(const IntMatrix& E, const std::vector<int>& signs,
                                                                const SNFDecomposition& snf) {
    if (signs.size() != E.rows()) throw std::invalid_argument("one sign per equation row required");
    IntVector half(signs.size());
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument("signs must be +1 or -1");
        half[i] = signs[i] == -1 ? 1 : 0;
    }
    IntVector ph = snf.P * half;  // twice the transformed right-hand side
    for (std::size_t i = snf.rank; i < ph.size(); ++i)
        if (ph[i] % 2 != 0) return std::nullopt;
    TorusComponents tc{1, E.cols() - snf.rank};
    for (std::size_t i = 0; i < snf.rank; ++i) tc.count *= snf.S(i, i);
    return tc;
}

inline std::optional<TorusComponents> torus_solution_components(const IntMatrix& E, const std::vector<int>& signs) {
    return torus_solution_components(E, signs, smith_normal_form(E));
}

// ---------------------------------------------------------------------------
// GF(2)

class Z2Vector {
public:
    Z2Vector() = default;
    explicit Z2Vector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    template <class T>
    static Z2Vector from_ints(const std::vector<T>& v) {
        Z2Vector r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] % 2 != 0) r.set(i);
        return r;
    }

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i, bool b = true) {
        if (b)
            w_[i >> 6] |= std::uint64_t{1} << (i & 63);
        else
            w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    Z2Vector& operator^=(const Z2Vector& o) {
        if (o.n_ != n_) throw std::invalid_argument("Z2Vector size mismatch");
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    Z2Vector operator^(const Z2Vector& o) const {
        Z2Vector r = *this;
        r ^= o;
        return r;
    }
    bool dot(const Z2Vector& o) const {
        if (o.n_ != n_) throw std::invalid_argument("Z2Vector size mismatch");
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
        return std::popcount(acc) & 1;
    }
    bool is_zero() const {
        return std::all_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x == 0; });
    }
    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto x : w_) c += std::popcount(x);
        return c;
    }
    // Lowest set index, or size() if zero.
    std::size_t lowest() const {
        for (std::size_t k = 0; k < w_.size(); ++k)
            if (w_[k]) return k * 64 + std::countr_zero(w_[k]);
        return n_;
    }
    std::vector<int> to_ints() const {
        std::vector<int> v(n_);
        for (std::size_t i = 0; i < n_; ++i) v[i] = get(i);
        return v;
    }
    bool operator==(const Z2Vector& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator<(const Z2Vector& o) const { return to_ints() < o.to_ints(); }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

class Z2Matrix {
public:
    Z2Matrix() = default;
    Z2Matrix(std::size_t rows, std::size_t cols) : cols_(cols), r_(rows, Z2Vector(cols)) {}

    static Z2Matrix from_rows(const std::vector<Z2Vector>& rows, std::size_t cols) {
        Z2Matrix m(0, cols);
        for (const auto& r : rows) m.push_row(r);
        return m;
    }
    static Z2Matrix from_int(const IntMatrix& a) {
        Z2Matrix m(a.rows(), a.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                if (a(i, j) % 2 != 0) m.set(i, j);
        return m;
    }
    static Z2Matrix identity(std::size_t n) {
        Z2Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i);
        return m;
    }

    std::size_t rows() const { return r_.size(); }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t i, std::size_t j) const { return r_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool b = true) { r_[i].set(j, b); }
    void flip(std::size_t i, std::size_t j) { r_[i].flip(j); }
    const Z2Vector& row(std::size_t i) const { return r_[i]; }
    void push_row(const Z2Vector& v) {
        if (v.size() != cols_) throw std::invalid_argument("Z2Matrix row length mismatch");
        r_.push_back(v);
    }

    Z2Matrix transpose() const {
        Z2Matrix t(cols_, rows());
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (get(i, j)) t.set(j, i);
        return t;
    }

    Z2Vector operator*(const Z2Vector& v) const {
        if (v.size() != cols_) throw std::invalid_argument("Z2Matrix-vector shape mismatch");
        Z2Vector r(rows());
        for (std::size_t i = 0; i < rows(); ++i)
            if (r_[i].dot(v)) r.set(i);
        return r;
    }

    Z2Matrix operator*(const Z2Matrix& o) const {
        if (cols_ != o.rows()) throw std::invalid_argument("Z2Matrix product shape mismatch");
        Z2Matrix r(rows(), o.cols());
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t k = 0; k < cols_; ++k)
                if (get(i, k)) r.r_[i] ^= o.r_[k];
        return r;
    }

    bool is_zero() const {
        return std::all_of(r_.begin(), r_.end(), [](const Z2Vector& v) { return v.is_zero(); });
    }

private:
    std::size_t cols_ = 0;
    std::vector<Z2Vector> r_;
};

namespace detail {

// Gauss-Jordan elimination in place; pivots at the lowest available column,
// rows scanned in order. `rhs` bits follow the row operations.
inline std::vector<std::size_t> z2_eliminate(std::vector<Z2Vector>& rows, std::vector<bool>& rhs, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        std::swap(rhs[r], rhs[p]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i].get(c)) {
                rows[i] ^= rows[r];
                rhs[i] = rhs[i] != rhs[r];
            }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace detail

inline std::size_t z2_rank(const Z2Matrix& M) {
    std::vector<Z2Vector> rows;
    for (std::size_t i = 0; i < M.rows(); ++i) rows.push_back(M.row(i));
    std::vector<bool> rhs(rows.size(), false);
    return detail::z2_eliminate(rows, rhs, M.cols()).size();
}

struct Z2Solution {
    Z2Vector particular;
    std::vector<Z2Vector> kernel;
};

// Solve M x = b over GF(2).
inline std::optional<Z2Solution> z2_solve(const Z2Matrix& M, const Z2Vector& b) {
    if (b.size() != M.rows()) throw std::invalid_argument("z2_solve: rhs length mismatch");
    std::vector<Z2Vector> rows;
    std::vector<bool> rhs;
    for (std::size_t i = 0; i < M.rows(); ++i) {
        rows.push_back(M.row(i));
        rhs.push_back(b.get(i));
    }
    auto pivots = detail::z2_eliminate(rows, rhs, M.cols());
    const std::size_t r = pivots.size();
    for (std::size_t i = r; i < rows.size(); ++i)
        if (rhs[i]) return std::nullopt;

    Z2Solution s{Z2Vector(M.cols()), {}};
    for (std::size_t i = 0; i < r; ++i) s.particular.set(pivots[i], rhs[i]);
    std::vector<bool> is_pivot(M.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    for (std::size_t f = 0; f < M.cols(); ++f) {
        if (is_pivot[f]) continue;
        Z2Vector k(M.cols());
        k.set(f);
        for (std::size_t i = 0; i < r; ++i)
            if (rows[i].get(f)) k.set(pivots[i]);
        s.kernel.push_back(k);
    }
    return s;
}

// Is v in the column space of M?
inline bool z2_in_image(const Z2Matrix& M, const Z2Vector& v) { return z2_solve(M, v).has_value(); }

// Incremental echelon basis over GF(2). Each stored row remembers which inserted
// generators (by tag index) it is a combination of, so reductions can report
// coordinates.
class Z2Basis {
public:
    explicit Z2Basis(std::size_t dim = 0, std::size_t tags = 0) : dim_(dim), tags_(tags) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return rows_.size(); }

    // Insert v carrying tag vector `tag`; returns false (and inserts nothing) if v is already in the span.
    bool insert(Z2Vector v, Z2Vector tag) {
        reduce_in_place(v, tag);
        if (v.is_zero()) return false;
        std::size_t p = v.lowest();
        // Keep the basis fully reduced so that reduction is a single pass.
        for (auto& row : rows_)
            if (row.v.get(p)) {
                row.v ^= v;
                row.tag ^= tag;
            }
        auto it = std::lower_bound(rows_.begin(), rows_.end(), p, [](const Row& r, std::size_t q) { return r.pivot < q; });
        rows_.insert(it, Row{p, std::move(v), std::move(tag)});
        return true;
    }

    bool contains(Z2Vector v) const {
        Z2Vector t(tags_);
        reduce_in_place(v, t);
        return v.is_zero();
    }

    // Returns (residual, accumulated tag) after eliminating against the basis.
    std::pair<Z2Vector, Z2Vector> reduce(Z2Vector v) const {
        Z2Vector t(tags_);
        reduce_in_place(v, t);
        return {v, t};
    }

private:
    struct Row {
        std::size_t pivot;
        Z2Vector v, tag;
    };
    void reduce_in_place(Z2Vector& v, Z2Vector& tag) const {
        for (const auto& row : rows_)
            if (v.get(row.pivot)) {
                v ^= row.v;
                tag ^= row.tag;
            }
    }
    std::size_t dim_, tags_;
    std::vector<Row> rows_;
};

}  // namespace circang
