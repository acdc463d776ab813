#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "extcal/exterior.hpp"
#include "extcal/fields.hpp"
#include "extcal/multi_index.hpp"

namespace extcal {

// Differential r-form: canonical multi-index -> coefficient scalar field.
// Exact-zero polynomial coefficients are pruned on insertion.
class FieldForm {
public:
    FieldForm(int dim, int grade) : dim_(dim), grade_(grade) {
        if (dim < 0 || grade < 0) throw std::invalid_argument("FieldForm: negative dim/grade");
    }

    int dim() const { return dim_; }
    int grade() const { return grade_; }
    const std::map<MultiIndex, ScalarField>& terms() const { return coeffs_; }

    void add_term(std::vector<int> indices, const ScalarField& coeff) {
        if (static_cast<int>(indices.size()) != grade_)
            throw std::invalid_argument("FieldForm::add_term: index count != grade");
        if (coeff.nvars() != dim_)
            throw std::invalid_argument("FieldForm::add_term: coefficient arity != dim");
        if (grade_ > dim_) return;
        for (int i : indices)
            if (i < 0 || i >= dim_) throw std::invalid_argument("FieldForm::add_term: index out of range");
        auto [mi, sign] = canonicalize(std::move(indices));
        if (sign == 0) return;
        ScalarField v = sign > 0 ? coeff : -coeff;
        auto it = coeffs_.find(mi);
        if (it == coeffs_.end()) {
            if (!v.is_exact_zero()) coeffs_.emplace(std::move(mi), std::move(v));
        } else {
            it->second = it->second + v;
            if (it->second.is_exact_zero()) coeffs_.erase(it);
        }
    }

    bool is_polynomial() const {
        for (const auto& [mi, c] : coeffs_)
            if (!c.is_poly()) return false;
        return true;
    }

    // Exact structural equality; only defined for polynomial data.
    bool equals_exact(const FieldForm& o) const {
        if (dim_ != o.dim_ || grade_ != o.grade_) return false;
        if (!is_polynomial() || !o.is_polynomial())
            throw std::logic_error("FieldForm::equals_exact: numeric coefficients present");
        if (coeffs_.size() != o.coeffs_.size()) return false;
        for (const auto& [mi, c] : coeffs_) {
            auto it = o.coeffs_.find(mi);
            if (it == o.coeffs_.end()) return false;
            if (!(c.poly() == it->second.poly())) return false;
        }
        return true;
    }

    bool is_exact_zero() const {
        for (const auto& [mi, c] : coeffs_)
            if (!c.is_exact_zero()) return false;
        return true;
    }

    // Pointwise value: a multicovector with double components.
    KForm<double> at(std::span<const double> x) const {
        KForm<double> out(dim_, grade_);
        for (const auto& [mi, c] : coeffs_) {
            double v = c.eval(x);
            if (v != 0.0) out.add(mi.idx, v);
        }
        return out;
    }

    friend FieldForm operator+(const FieldForm& a, const FieldForm& b) {
        if (a.dim_ != b.dim_ || a.grade_ != b.grade_)
            throw std::invalid_argument("FieldForm: shape mismatch in +");
        FieldForm r = a;
        for (const auto& [mi, c] : b.coeffs_) r.add_term(mi.idx, c);
        return r;
    }

    FieldForm operator-() const {
        FieldForm r(dim_, grade_);
        for (const auto& [mi, c] : coeffs_) r.add_term(mi.idx, -c);
        return r;
    }

    FieldForm scaled(const ScalarField& s) const {
        FieldForm r(dim_, grade_);
        for (const auto& [mi, c] : coeffs_) r.add_term(mi.idx, s * c);
        return r;
    }

private:
    int dim_;
    int grade_;
    std::map<MultiIndex, ScalarField> coeffs_;
};

// Exterior derivative: d(omega_I dx^I) = (d omega_I) ^ dx^I, with the sign
// bookkeeping delegated to index canonicalization. Polynomial coefficients
// differentiate exactly; numeric ones by central differences.
inline FieldForm d(const FieldForm& omega) {
    FieldForm out(omega.dim(), omega.grade() + 1);
    for (const auto& [mi, c] : omega.terms()) {
        for (int j = 0; j < omega.dim(); ++j) {
            ScalarField dc = c.partial(j);
            if (dc.is_exact_zero()) continue;
            std::vector<int> idx;
            idx.reserve(mi.size() + 1);
            idx.push_back(j);
            idx.insert(idx.end(), mi.idx.begin(), mi.idx.end());
            out.add_term(std::move(idx), dc);
        }
    }
    return out;
}

inline FieldForm wedge(const FieldForm& a, const FieldForm& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("wedge(FieldForm): dimension mismatch");
    FieldForm r(a.dim(), a.grade() + b.grade());
    if (r.grade() > a.dim()) return r;
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            std::vector<int> cat = ia.idx;
            cat.insert(cat.end(), ib.idx.begin(), ib.idx.end());
            r.add_term(std::move(cat), ca * cb);
        }
    return r;
}

// Pullback along f: coefficients compose with f and each dx^i transports to
// sum_j (df^i/dy^j) dy^j, extended multiplicatively.
inline FieldForm pullback(const SmoothMap& f, const FieldForm& omega) {
    if (omega.dim() != f.codomain_dim())
        throw std::invalid_argument("pullback: form lives on the map codomain");
    const int n = f.domain_dim();
    FieldForm out(n, omega.grade());

    // f*(dx^i) computed once per needed index.
    std::map<int, FieldForm> dx_pull;
    auto pulled_dx = [&](int i) -> const FieldForm& {
        auto it = dx_pull.find(i);
        if (it != dx_pull.end()) return it->second;
        FieldForm fi(n, 1);
        for (int j = 0; j < n; ++j) {
            ScalarField dfij = f.component(i).partial(j);
            if (dfij.is_exact_zero()) continue;
            fi.add_term({j}, dfij);
        }
        return dx_pull.emplace(i, std::move(fi)).first->second;
    };

    for (const auto& [mi, c] : omega.terms()) {
        FieldForm term(n, 0);
        term.add_term({}, c.compose_with(f));
        for (int i : mi.idx) term = wedge(term, pulled_dx(i));
        out = out + term;
    }
    return out;
}

} // namespace extcal
