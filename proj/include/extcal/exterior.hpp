#pragma once

#include <cmath>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <vector>

#include "extcal/multi_index.hpp"
#include "extcal/rational.hpp"

namespace extcal {

// Pointwise exterior algebra over an n-dimensional real vector space.
// Multivectors and multicovectors are kept as distinct compile-time kinds so
// they cannot be mixed; components live on strictly increasing index tuples
// and the scalar kind S is either Rational (exact) or double.

enum class Variance { Contra, Co };

template <typename S, Variance V>
class Graded {
public:
    Graded(int dim, int grade) : dim_(dim), grade_(grade) {
        if (dim < 0 || grade < 0) throw std::invalid_argument("Graded: negative dim/grade");
    }

    int dim() const { return dim_; }
    int grade() const { return grade_; }
    const std::map<MultiIndex, S>& components() const { return comps_; }

    // Accepts any index ordering; folds in the permutation sign. Grades above
    // dim() collapse to the zero element rather than erroring.
    void add(std::vector<int> indices, const S& value) {
        if (static_cast<int>(indices.size()) != grade_)
            throw std::invalid_argument("Graded::add: index count != grade");
        if (grade_ > dim_) return;
        for (int i : indices)
            if (i < 0 || i >= dim_) throw std::invalid_argument("Graded::add: index out of range");
        auto [mi, sign] = canonicalize(std::move(indices));
        if (sign == 0) return;
        S v = sign > 0 ? value : S(-value);
        auto it = comps_.find(mi);
        if (it == comps_.end()) {
            if (!scalar_is_zero(v)) comps_.emplace(std::move(mi), std::move(v));
        } else {
            it->second += v;
            if (scalar_is_zero(it->second)) comps_.erase(it);
        }
    }

    S get(std::vector<int> indices) const {
        auto [mi, sign] = canonicalize(std::move(indices));
        if (sign == 0) return S(0);
        auto it = comps_.find(mi);
        if (it == comps_.end()) return S(0);
        return sign > 0 ? it->second : S(-it->second);
    }

    bool is_zero() const { return comps_.empty(); }

    static Graded basis(int dim, std::vector<int> indices) {
        Graded g(dim, static_cast<int>(indices.size()));
        g.add(std::move(indices), S(1));
        return g;
    }

    Graded operator-() const {
        Graded r(dim_, grade_);
        for (const auto& [mi, v] : comps_) r.comps_.emplace(mi, S(-v));
        return r;
    }

    friend Graded operator+(const Graded& a, const Graded& b) {
        a.check_same_shape(b);
        Graded r = a;
        for (const auto& [mi, v] : b.comps_) {
            auto it = r.comps_.find(mi);
            if (it == r.comps_.end()) r.comps_.emplace(mi, v);
            else {
                it->second += v;
                if (scalar_is_zero(it->second)) r.comps_.erase(it);
            }
        }
        return r;
    }
    friend Graded operator-(const Graded& a, const Graded& b) { return a + (-b); }

    friend Graded operator*(const S& c, const Graded& a) {
        Graded r(a.dim_, a.grade_);
        if (scalar_is_zero(c)) return r;
        for (const auto& [mi, v] : a.comps_) {
            S p = c * v;
            if (!scalar_is_zero(p)) r.comps_.emplace(mi, p);
        }
        return r;
    }

    friend bool operator==(const Graded& a, const Graded& b) {
        return a.dim_ == b.dim_ && a.grade_ == b.grade_ && a.comps_ == b.comps_;
    }

    void check_same_shape(const Graded& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("Graded: dimension mismatch");
        if (grade_ != o.grade_) throw std::invalid_argument("Graded: grade mismatch");
    }

private:
    int dim_;
    int grade_;
    std::map<MultiIndex, S> comps_;
};

template <typename S> using KVector = Graded<S, Variance::Contra>;
template <typename S> using KForm = Graded<S, Variance::Co>;

// Wedge product via index-list concatenation and canonicalization. Results of
// grade above dim are the zero element of that grade.
template <typename S, Variance V>
Graded<S, V> wedge(const Graded<S, V>& a, const Graded<S, V>& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
    Graded<S, V> r(a.dim(), a.grade() + b.grade());
    if (r.grade() > a.dim()) return r;
    for (const auto& [ia, va] : a.components())
        for (const auto& [ib, vb] : b.components()) {
            std::vector<int> cat = ia.idx;
            cat.insert(cat.end(), ib.idx.begin(), ib.idx.end());
            r.add(std::move(cat), va * vb);
        }
    return r;
}

// Duality pairing beta(w). On simple elements this is the generalized
// Kronecker determinant; on canonical components it is the plain sum
// over shared multi-indices.
template <typename S>
S pairing(const KForm<S>& beta, const KVector<S>& w) {
    if (beta.dim() != w.dim()) throw std::invalid_argument("pairing: dimension mismatch");
    if (beta.grade() != w.grade()) throw std::invalid_argument("pairing: grade mismatch");
    S acc(0);
    const auto& wc = w.components();
    for (const auto& [mi, bv] : beta.components()) {
        auto it = wc.find(mi);
        if (it != wc.end()) acc += bv * it->second;
    }
    return acc;
}

// Contraction alpha(v): the (p-q)-covector defined by beta(W) = alpha(v ^ W)
// for every (p-q)-vector W.
template <typename S>
KForm<S> contract(const KForm<S>& alpha, const KVector<S>& v) {
    if (alpha.dim() != v.dim()) throw std::invalid_argument("contract: dimension mismatch");
    if (v.grade() > alpha.grade()) throw std::invalid_argument("contract: vector grade exceeds form grade");
    KForm<S> beta(alpha.dim(), alpha.grade() - v.grade());
    for (const MultiIndex& j : canonical_basis(alpha.dim(), beta.grade())) {
        S acc(0);
        for (const auto& [iv, vv] : v.components()) {
            std::vector<int> cat = iv.idx;
            cat.insert(cat.end(), j.idx.begin(), j.idx.end());
            auto [mi, sign] = canonicalize(std::move(cat));
            if (sign == 0) continue;
            S a = alpha.get(mi.idx);
            if (scalar_is_zero(a)) continue;
            acc += sign > 0 ? vv * a : S(-(vv * a));
        }
        if (!scalar_is_zero(acc)) beta.add(j.idx, acc);
    }
    return beta;
}

// Symmetric nondegenerate bilinear form with a cached inverse.
template <typename S>
class Metric {
public:
    explicit Metric(std::vector<std::vector<S>> g) : g_(std::move(g)) {
        n_ = static_cast<int>(g_.size());
        for (const auto& row : g_)
            if (static_cast<int>(row.size()) != n_) throw std::invalid_argument("Metric: not square");
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < i; ++j)
                if (!scalar_is_zero(S(g_[i][j] - g_[j][i])))
                    throw std::invalid_argument("Metric: not symmetric");
        invert();
    }

    static Metric identity(int n) {
        std::vector<std::vector<S>> g(n, std::vector<S>(n, S(0)));
        for (int i = 0; i < n; ++i) g[i][i] = S(1);
        return Metric(std::move(g));
    }

    // Signature (+,-,-,-).
    static Metric minkowski(int n = 4) {
        std::vector<std::vector<S>> g(n, std::vector<S>(n, S(0)));
        g[0][0] = S(1);
        for (int i = 1; i < n; ++i) g[i][i] = S(-1);
        return Metric(std::move(g));
    }

    int dim() const { return n_; }
    const S& operator()(int i, int j) const { return g_[i][j]; }
    const S& inv(int i, int j) const { return ginv_[i][j]; }

    S dot(const std::vector<S>& u, const std::vector<S>& v) const {
        S acc(0);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) acc += g_[i][j] * u[i] * v[j];
        return acc;
    }

private:
    void invert() {
        // Gauss-Jordan with partial pivoting; exact for rational scalars.
        std::vector<std::vector<S>> a = g_;
        ginv_.assign(n_, std::vector<S>(n_, S(0)));
        for (int i = 0; i < n_; ++i) ginv_[i][i] = S(1);
        for (int col = 0; col < n_; ++col) {
            int piv = -1;
            double best = 0.0;
            for (int r = col; r < n_; ++r) {
                double m = std::abs(scalar_to_double(a[r][col]));
                if (m > best) { best = m; piv = r; }
            }
            if (piv < 0) throw std::invalid_argument("Metric: singular (degenerate bilinear form)");
            std::swap(a[piv], a[col]);
            std::swap(ginv_[piv], ginv_[col]);
            S d = a[col][col];
            if (scalar_is_zero(d)) throw std::invalid_argument("Metric: singular (degenerate bilinear form)");
            for (int j = 0; j < n_; ++j) { a[col][j] /= d; ginv_[col][j] /= d; }
            for (int r = 0; r < n_; ++r) {
                if (r == col) continue;
                S f = a[r][col];
                if (scalar_is_zero(f)) continue;
                for (int j = 0; j < n_; ++j) {
                    a[r][j] -= f * a[col][j];
                    ginv_[r][j] -= f * ginv_[col][j];
                }
            }
        }
        // g * g_inv must reproduce the identity.
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                S acc(0);
                for (int k = 0; k < n_; ++k) acc += g_[i][k] * ginv_[k][j];
                double want = i == j ? 1.0 : 0.0;
                if (std::abs(scalar_to_double(acc) - want) > 1e-12)
                    throw std::invalid_argument("Metric: inverse check failed (near-singular)");
            }
    }

    int n_ = 0;
    std::vector<std::vector<S>> g_;
    std::vector<std::vector<S>> ginv_;
};

// Musical maps on grade-1 elements.
template <typename S>
KForm<S> flat(const KVector<S>& v, const Metric<S>& m) {
    if (v.grade() != 1) throw std::invalid_argument("flat: grade-1 input required");
    if (v.dim() != m.dim()) throw std::invalid_argument("flat: dimension mismatch");
    KForm<S> out(v.dim(), 1);
    for (int i = 0; i < v.dim(); ++i) {
        S acc(0);
        for (const auto& [mi, val] : v.components()) acc += m(i, mi.idx[0]) * val;
        if (!scalar_is_zero(acc)) out.add({i}, acc);
    }
    return out;
}

template <typename S>
KVector<S> sharp(const KForm<S>& a, const Metric<S>& m) {
    if (a.grade() != 1) throw std::invalid_argument("sharp: grade-1 input required");
    if (a.dim() != m.dim()) throw std::invalid_argument("sharp: dimension mismatch");
    KVector<S> out(a.dim(), 1);
    for (int i = 0; i < a.dim(); ++i) {
        S acc(0);
        for (const auto& [mi, val] : a.components()) acc += m.inv(i, mi.idx[0]) * val;
        if (!scalar_is_zero(acc)) out.add({i}, acc);
    }
    return out;
}

// det of the p x p matrix g(rows_a, cols_b), expanded by minors; p <= 4 here.
template <typename S>
S gram_minor_det(const std::vector<int>& rows, const std::vector<int>& cols, const Metric<S>& m) {
    const int n = static_cast<int>(rows.size());
    if (n == 0) return S(1);
    if (n == 1) return m(rows[0], cols[0]);
    S det(0);
    int sign = 1;
    std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (int c = 0; c < n; ++c) {
        std::vector<int> sub_cols;
        sub_cols.reserve(n - 1);
        for (int j = 0; j < n; ++j)
            if (j != c) sub_cols.push_back(cols[j]);
        S term = m(rows[0], cols[c]) * gram_minor_det(sub_rows, sub_cols, m);
        det += sign > 0 ? term : S(-term);
        sign = -sign;
    }
    return det;
}

// Squared norm of a grade-p multivector under the metric extended to the
// graded space: <e_I, e_J> = det[g(i_a, j_b)]. For a simple u ^ v this is the
// 2x2 Gram determinant; grade 3 gives the 3x3 one.
template <typename S>
S grade_norm2(const KVector<S>& a, const Metric<S>& m) {
    if (a.dim() != m.dim()) throw std::invalid_argument("grade_norm2: dimension mismatch");
    S acc(0);
    for (const auto& [mi, vi] : a.components())
        for (const auto& [mj, vj] : a.components())
            acc += vi * vj * gram_minor_det(mi.idx, mj.idx, m);
    return acc;
}

} // namespace extcal
