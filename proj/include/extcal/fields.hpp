#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "extcal/rational.hpp"

namespace extcal {

// Multivariate polynomial with exact rational coefficients, stored as a sparse
// term map keyed by exponent tuples. No zero-coefficient term is ever kept.
class PolyField {
public:
    using Exponents = std::vector<int>;

    explicit PolyField(int nvars) : nvars_(nvars) {
        if (nvars < 0) throw std::invalid_argument("PolyField: negative variable count");
    }

    static PolyField constant(int nvars, Rational c) {
        PolyField p(nvars);
        p.add_term(Exponents(nvars, 0), c);
        return p;
    }

    static PolyField variable(int nvars, int i) {
        if (i < 0 || i >= nvars) throw std::out_of_range("PolyField::variable: index out of range");
        PolyField p(nvars);
        Exponents e(nvars, 0);
        e[i] = 1;
        p.add_term(e, Rational(1));
        return p;
    }

    int nvars() const { return nvars_; }
    const std::map<Exponents, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exponents& e, const Rational& c) {
        if (static_cast<int>(e.size()) != nvars_)
            throw std::invalid_argument("PolyField::add_term: exponent arity mismatch");
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) terms_.emplace(e, c);
        else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend PolyField operator+(const PolyField& a, const PolyField& b) {
        a.check_arity(b);
        PolyField r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, c);
        return r;
    }
    friend PolyField operator-(const PolyField& a, const PolyField& b) {
        a.check_arity(b);
        PolyField r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
        return r;
    }
    PolyField operator-() const {
        PolyField r(nvars_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }
    friend PolyField operator*(const PolyField& a, const PolyField& b) {
        a.check_arity(b);
        PolyField r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(a.nvars_);
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    friend PolyField operator*(const Rational& c, const PolyField& a) {
        PolyField r(a.nvars_);
        for (const auto& [e, v] : a.terms_) r.add_term(e, c * v);
        return r;
    }
    friend bool operator==(const PolyField& a, const PolyField& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    PolyField pow(int k) const {
        if (k < 0) throw std::invalid_argument("PolyField::pow: negative exponent");
        PolyField acc = constant(nvars_, Rational(1));
        for (int i = 0; i < k; ++i) acc = acc * *this;
        return acc;
    }

    PolyField partial(int i) const {
        if (i < 0 || i >= nvars_) throw std::out_of_range("PolyField::partial: index out of range");
        PolyField r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exponents d = e;
            --d[i];
            r.add_term(d, Rational(e[i]) * c);
        }
        return r;
    }

    double eval(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw std::invalid_argument("PolyField::eval: point arity mismatch");
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c.to_double();
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            acc += t;
        }
        return acc;
    }

    Rational eval_exact(std::span<const Rational> x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw std::invalid_argument("PolyField::eval_exact: point arity mismatch");
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            acc += t;
        }
        return acc;
    }

    // Exact substitution of polynomial components for the variables.
    PolyField compose(const std::vector<PolyField>& comps) const {
        if (static_cast<int>(comps.size()) != nvars_)
            throw std::invalid_argument("PolyField::compose: component count mismatch");
        int inner = comps.empty() ? 0 : comps[0].nvars();
        for (const auto& c : comps)
            if (c.nvars() != inner) throw std::invalid_argument("PolyField::compose: mixed arities");
        PolyField acc(inner);
        for (const auto& [e, c] : terms_) {
            PolyField t = constant(inner, c);
            for (int i = 0; i < nvars_; ++i)
                if (e[i] > 0) t = t * comps[i].pow(e[i]);
            acc = acc + t;
        }
        return acc;
    }

private:
    void check_arity(const PolyField& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("PolyField: variable count mismatch");
    }

    int nvars_;
    std::map<Exponents, Rational> terms_;
};

// Black-box evaluable scalar function with central finite differences for
// derivatives. fd_step balances truncation against round-off for smooth
// order-one fields.
class NumericField {
public:
    using Fn = std::function<double(std::span<const double>)>;

    NumericField(int nvars, Fn fn, double fd_step = 1e-6)
        : nvars_(nvars), fn_(std::make_shared<Fn>(std::move(fn))), fd_step_(fd_step) {}

    int nvars() const { return nvars_; }
    double fd_step() const { return fd_step_; }

    double eval(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw std::invalid_argument("NumericField::eval: point arity mismatch");
        return (*fn_)(x);
    }

    NumericField partial(int i) const {
        if (i < 0 || i >= nvars_) throw std::out_of_range("NumericField::partial: index out of range");
        auto f = fn_;
        double h = fd_step_;
        int n = nvars_;
        return NumericField(
            n,
            [f, h, i](std::span<const double> x) {
                std::vector<double> p(x.begin(), x.end());
                p[i] += h;
                double hi = (*f)(p);
                p[i] -= 2 * h;
                double lo = (*f)(p);
                return (hi - lo) / (2 * h);
            },
            h);
    }

private:
    int nvars_;
    std::shared_ptr<Fn> fn_;
    double fd_step_;
};

class SmoothMap;

// Scalar field: exact polynomial or numeric evaluator. Arithmetic stays exact
// while every operand is polynomial and degrades to a closure otherwise.
class ScalarField {
public:
    ScalarField(PolyField p) : v_(std::move(p)) {}
    ScalarField(NumericField f) : v_(std::move(f)) {}

    int nvars() const {
        return std::holds_alternative<PolyField>(v_) ? std::get<PolyField>(v_).nvars()
                                                      : std::get<NumericField>(v_).nvars();
    }
    bool is_poly() const { return std::holds_alternative<PolyField>(v_); }
    const PolyField& poly() const {
        if (!is_poly()) throw std::logic_error("ScalarField: not polynomial");
        return std::get<PolyField>(v_);
    }
    // True only for the exactly-zero polynomial; numeric fields are opaque.
    bool is_exact_zero() const { return is_poly() && poly().is_zero(); }

    double eval(std::span<const double> x) const {
        if (is_poly()) return std::get<PolyField>(v_).eval(x);
        return std::get<NumericField>(v_).eval(x);
    }

    ScalarField partial(int i) const {
        if (is_poly()) return ScalarField(std::get<PolyField>(v_).partial(i));
        return ScalarField(std::get<NumericField>(v_).partial(i));
    }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
        if (a.is_poly() && b.is_poly()) return ScalarField(a.poly() + b.poly());
        ScalarField ca = a, cb = b;
        return ScalarField(NumericField(
            a.nvars(), [ca, cb](std::span<const double> x) { return ca.eval(x) + cb.eval(x); },
            a.min_fd_step(b)));
    }
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
        if (a.is_poly() && b.is_poly()) return ScalarField(a.poly() * b.poly());
        ScalarField ca = a, cb = b;
        return ScalarField(NumericField(
            a.nvars(), [ca, cb](std::span<const double> x) { return ca.eval(x) * cb.eval(x); },
            a.min_fd_step(b)));
    }
    ScalarField operator-() const {
        if (is_poly()) return ScalarField(-poly());
        ScalarField c = *this;
        return ScalarField(NumericField(
            nvars(), [c](std::span<const double> x) { return -c.eval(x); }, fd_step_or_default()));
    }

    // this(map(y)); exact when both sides are polynomial.
    ScalarField compose_with(const SmoothMap& map) const;

    double fd_step_or_default() const {
        return is_poly() ? 1e-6 : std::get<NumericField>(v_).fd_step();
    }

private:
    double min_fd_step(const ScalarField& o) const {
        return std::min(fd_step_or_default(), o.fd_step_or_default());
    }

    std::variant<PolyField, NumericField> v_;
};

// Map between coordinate spaces, component fields sharing one domain arity.
class SmoothMap {
public:
    explicit SmoothMap(std::vector<ScalarField> comps) : comps_(std::move(comps)) {
        if (comps_.empty()) throw std::invalid_argument("SmoothMap: no components");
        domain_dim_ = comps_[0].nvars();
        for (const auto& c : comps_)
            if (c.nvars() != domain_dim_) throw std::invalid_argument("SmoothMap: mixed component arities");
    }

    // Maps from a zero-dimensional domain (a point); used by 0-chains.
    SmoothMap(int domain_dim, std::vector<ScalarField> comps)
        : domain_dim_(domain_dim), comps_(std::move(comps)) {
        for (const auto& c : comps_)
            if (c.nvars() != domain_dim_) throw std::invalid_argument("SmoothMap: mixed component arities");
    }

    static SmoothMap identity(int n) {
        std::vector<ScalarField> comps;
        comps.reserve(n);
        for (int i = 0; i < n; ++i) comps.emplace_back(PolyField::variable(n, i));
        return SmoothMap(std::move(comps));
    }

    int domain_dim() const { return domain_dim_; }
    int codomain_dim() const { return static_cast<int>(comps_.size()); }
    const ScalarField& component(int i) const { return comps_.at(i); }

    bool is_polynomial() const {
        for (const auto& c : comps_)
            if (!c.is_poly()) return false;
        return true;
    }

    std::vector<double> eval(std::span<const double> x) const {
        std::vector<double> out;
        out.reserve(comps_.size());
        for (const auto& c : comps_) out.push_back(c.eval(x));
        return out;
    }

    // this o inner
    SmoothMap compose_after(const SmoothMap& inner) const {
        if (inner.codomain_dim() != domain_dim_)
            throw std::invalid_argument("SmoothMap::compose_after: arity mismatch");
        std::vector<ScalarField> comps;
        comps.reserve(comps_.size());
        for (const auto& c : comps_) comps.push_back(c.compose_with(inner));
        return SmoothMap(inner.domain_dim(), std::move(comps));
    }

    bool equals_exact(const SmoothMap& o) const {
        if (domain_dim_ != o.domain_dim_ || comps_.size() != o.comps_.size()) return false;
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            if (!comps_[i].is_poly() || !o.comps_[i].is_poly()) return false;
            if (!(comps_[i].poly() == o.comps_[i].poly())) return false;
        }
        return true;
    }

private:
    int domain_dim_;
    std::vector<ScalarField> comps_;
};

inline ScalarField ScalarField::compose_with(const SmoothMap& map) const {
    if (map.codomain_dim() != nvars())
        throw std::invalid_argument("ScalarField::compose_with: arity mismatch");
    if (is_poly() && map.is_polynomial()) {
        if (nvars() == 0) {
            // Composing a constant with anything is the same constant on the
            // inner domain.
            Rational c = poly().eval_exact({});
            return ScalarField(PolyField::constant(map.domain_dim(), c));
        }
        std::vector<PolyField> comps;
        comps.reserve(map.codomain_dim());
        for (int i = 0; i < map.codomain_dim(); ++i) comps.push_back(map.component(i).poly());
        return ScalarField(poly().compose(comps));
    }
    ScalarField outer = *this;
    SmoothMap inner = map;
    return ScalarField(NumericField(
        map.domain_dim(),
        [outer, inner](std::span<const double> y) {
            std::vector<double> x = inner.eval(y);
            return outer.eval(x);
        },
        fd_step_or_default()));
}

} // namespace extcal
