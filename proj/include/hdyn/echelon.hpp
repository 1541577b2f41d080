#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hdyn/errors.hpp"
#include "hdyn/numeric.hpp"

namespace hdyn {

/// Sparse integer row: (column, value) pairs, columns strictly increasing, values nonzero.
using SparseRow = std::vector<std::pair<int, Integer>>;
/// Sparse rational vector with the same layout.
using SparseVec = std::vector<std::pair<int, Rational>>;

inline Integer row_content(const SparseRow& r) {
    Integer g = 0;
    for (const auto& [c, v] : r) {
        g = boost::multiprecision::gcd(g, v);
        if (g == 1) break;
    }
    return g;
}

/// Divides out the content and makes the leading (last) entry positive.
inline void make_primitive(SparseRow& r) {
    if (r.empty()) return;
    Integer g = row_content(r);
    if (r.back().second < 0) g = -g;
    if (g != 1)
        for (auto& [c, v] : r) v /= g;
}

/// a*x + b*y, dropping zeros.
inline SparseRow combine(const Integer& a, const SparseRow& x, const Integer& b, const SparseRow& y) {
    SparseRow out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.emplace_back(x[i].first, a * x[i].second);
            ++i;
        } else if (i == x.size() || y[j].first < x[i].first) {
            out.emplace_back(y[j].first, b * y[j].second);
            ++j;
        } else {
            Integer v = a * x[i].second + b * y[j].second;
            if (v != 0) out.emplace_back(x[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

/// Clears denominators of a rational vector into a primitive integer row.
inline SparseRow to_integer_row(const SparseVec& v) {
    Integer l = 1;
    for (const auto& [c, q] : v) {
        const Integer& den = denominator_of(q);
        l = l / boost::multiprecision::gcd(l, den) * den;
    }
    SparseRow r;
    for (const auto& [c, q] : v)
        if (q != 0) r.emplace_back(c, numerator_of(q) * (l / denominator_of(q)));
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    make_primitive(r);
    return r;
}

inline SparseRow dense_to_row(const std::vector<Rational>& v) {
    SparseVec s;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) s.emplace_back(static_cast<int>(i), v[i]);
    return to_integer_row(s);
}

/// Row echelon form over the integers, fraction-free, with primitive rows.
/// Each stored row is keyed by its largest column (its pivot). Eliminating against pivots
/// from the top column downward means a column is a pivot exactly when it is a combination
/// of smaller columns modulo the row space.
class Echelon {
public:
    explicit Echelon(int columns = 0) : columns_(columns) {}

    int columns() const { return columns_; }
    int rank() const { return static_cast<int>(rows_.size()); }
    const std::map<int, SparseRow>& rows() const { return rows_; }
    bool is_pivot(int col) const { return rows_.count(col) != 0; }

    /// Reduces `r` until its leading column is not a pivot (or it vanishes).
    SparseRow reduce_leading(SparseRow r) const {
        while (!r.empty()) {
            auto it = rows_.find(r.back().first);
            if (it == rows_.end()) break;
            const SparseRow& p = it->second;
            const Integer& a = p.back().second;
            Integer b = r.back().second;
            Integer g = boost::multiprecision::gcd(a, b);
            r = combine(a / g, r, -(b / g), p);
            make_primitive(r);
        }
        return r;
    }

    /// Inserts a row; returns true if it increased the rank.
    bool add(SparseRow r) {
        for (const auto& [c, v] : r)
            if (c < 0 || c >= columns_) throw InternalError("row column out of range");
        make_primitive(r);
        r = reduce_leading(std::move(r));
        if (r.empty()) return false;
        int lead = r.back().first;
        rows_.emplace(lead, std::move(r));
        return true;
    }

    bool contains(const SparseRow& r) const {
        SparseRow x = r;
        make_primitive(x);
        return reduce_leading(std::move(x)).empty();
    }

private:
    int columns_;
    std::map<int, SparseRow> rows_;
};

/// Quotient of the free space on `columns` generators by the span of relation rows.
/// The basis consists of the non-pivot columns in increasing order, which is the greedy
/// prefix basis of the generator order.
class Quotient {
public:
    Quotient() = default;

    explicit Quotient(Echelon e) : ech_(std::move(e)) {
        int n = ech_.columns();
        basis_index_.assign(n, -1);
        for (int c = 0; c < n; ++c)
            if (!ech_.is_pivot(c)) {
                basis_index_[c] = static_cast<int>(basis_cols_.size());
                basis_cols_.push_back(c);
            }
        image_.resize(n);
        // pivot columns expressed through smaller columns, resolved bottom up
        for (int c = 0; c < n; ++c) {
            if (basis_index_[c] >= 0) {
                image_[c] = {{basis_index_[c], Rational(1)}};
                continue;
            }
            const SparseRow& row = ech_.rows().at(c);
            const Integer& a = row.back().second;
            std::map<int, Rational> acc;
            for (std::size_t i = 0; i + 1 < row.size(); ++i) {
                Rational f = Rational(-row[i].second) / Rational(a);
                for (const auto& [b, q] : image_[row[i].first]) acc[b] += f * q;
            }
            SparseVec out;
            for (auto& [b, q] : acc)
                if (q != 0) out.emplace_back(b, q);
            image_[c] = std::move(out);
        }
    }

    int generators() const { return ech_.columns(); }
    int dim() const { return static_cast<int>(basis_cols_.size()); }
    const std::vector<int>& basis_columns() const { return basis_cols_; }
    const Echelon& relations() const { return ech_; }

    /// Coordinates of generator `col` in the quotient basis.
    const SparseVec& image(int col) const { return image_.at(col); }

    std::vector<Rational> reduce_dense(const SparseVec& v) const {
        std::vector<Rational> out(dim());
        for (const auto& [c, q] : v)
            for (const auto& [b, x] : image_.at(c)) out[b] += q * x;
        return out;
    }

private:
    Echelon ech_;
    std::vector<int> basis_cols_;
    std::vector<int> basis_index_;
    std::vector<SparseVec> image_;
};

/// Linear subspace of Q^dim, stored in echelon form.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(int ambient) : ech_(ambient) {}

    static Subspace span(int ambient, const std::vector<std::vector<Rational>>& vectors) {
        Subspace s(ambient);
        for (const auto& v : vectors) s.add(v);
        return s;
    }

    bool add(const std::vector<Rational>& v) {
        if (static_cast<int>(v.size()) != ambient()) throw InternalError("vector length mismatch");
        return ech_.add(dense_to_row(v));
    }

    int ambient() const { return ech_.columns(); }
    int dim() const { return ech_.rank(); }
    bool contains(const std::vector<Rational>& v) const { return ech_.contains(dense_to_row(v)); }

    bool contains(const Subspace& o) const {
        for (const auto& [c, r] : o.ech_.rows())
            if (!ech_.contains(r)) return false;
        return true;
    }
    bool operator==(const Subspace& o) const { return dim() == o.dim() && contains(o); }

    /// Echelon basis vectors, ordered by pivot column.
    std::vector<std::vector<Rational>> basis() const {
        std::vector<std::vector<Rational>> out;
        for (const auto& [c, r] : ech_.rows()) {
            std::vector<Rational> v(ambient());
            for (const auto& [j, x] : r) v[j] = Rational(x);
            out.push_back(std::move(v));
        }
        return out;
    }

    const Echelon& echelon() const { return ech_; }

private:
    Echelon ech_;
};

/// Dense rational matrix helpers.
using Matrix = std::vector<std::vector<Rational>>;

inline Matrix identity_matrix(int n) {
    Matrix m(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    std::size_t n = a.size(), inner = b.size(), m = b.empty() ? 0 : b[0].size();
    Matrix c(n, std::vector<Rational>(m));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != inner) throw InternalError("matrix shape mismatch");
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    }
    return c;
}

inline std::vector<Rational> matvec(const Matrix& a, const std::vector<Rational>& x) {
    std::vector<Rational> y(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != x.size()) throw InternalError("matrix shape mismatch");
        for (std::size_t j = 0; j < x.size(); ++j)
            if (x[j] != 0) y[i] += a[i][j] * x[j];
    }
    return y;
}

/// Solves A x = b exactly (A is rows x cols). Returns nullopt if inconsistent.
/// When the solution is not unique, free variables are set to zero.
inline std::optional<std::vector<Rational>> solve_linear(Matrix a, std::vector<Rational> b) {
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::vector<int> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        Rational inv = 1 / a[r][c];
        for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(static_cast<int>(c));
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> x(cols);
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

} // namespace hdyn
