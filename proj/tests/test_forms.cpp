#include <doctest.h>

#include "extcal/forms.hpp"
#include "extcal/report.hpp"

using namespace extcal;

namespace {

FieldForm paper_two_form() {
    PolyField x = PolyField::variable(3, 0);
    PolyField y = PolyField::variable(3, 1);
    FieldForm om(3, 2);
    om.add_term({1, 2}, ScalarField(x));
    om.add_term({2, 0}, ScalarField(x * y * y)); // dz^dx stored as -dx^dz
    om.add_term({0, 1}, ScalarField(PolyField::constant(3, Rational(3))));
    return om;
}

SmoothMap paper_map() {
    PolyField u = PolyField::variable(3, 0);
    PolyField v = PolyField::variable(3, 1);
    PolyField w = PolyField::variable(3, 2);
    return SmoothMap(3, {ScalarField(u * u + v), ScalarField(v * v + w), ScalarField(w + v)});
}

} // namespace

TEST_CASE("exterior derivative of the worked 2-form") {
    FieldForm dw = d(paper_two_form());
    PolyField x = PolyField::variable(3, 0);
    PolyField y = PolyField::variable(3, 1);
    FieldForm want(3, 3);
    want.add_term({0, 1, 2},
                  ScalarField(PolyField::constant(3, Rational(1)) + Rational(2) * (x * y)));
    CHECK(dw.equals_exact(want));
}

TEST_CASE("constant-coefficient forms are closed") {
    FieldForm om(4, 2);
    om.add_term({0, 3}, ScalarField(PolyField::constant(4, Rational(5, 2))));
    CHECK(d(om).is_exact_zero());
}

TEST_CASE("d on a top form collapses to zero") {
    FieldForm om(2, 2);
    om.add_term({0, 1}, ScalarField(PolyField::variable(2, 0)));
    FieldForm dd = d(om);
    CHECK(dd.grade() == 3);
    CHECK(dd.is_exact_zero());
}

TEST_CASE("pullback golden identity and commutation") {
    FieldForm om = paper_two_form();
    SmoothMap f = paper_map();
    FieldForm pull_dw = pullback(f, d(om));

    PolyField u = PolyField::variable(3, 0);
    PolyField v = PolyField::variable(3, 1);
    PolyField w = PolyField::variable(3, 2);
    PolyField expected = (Rational(2) * u) *
                         (Rational(2) * v - PolyField::constant(3, Rational(1))) *
                         (PolyField::constant(3, Rational(1)) +
                          Rational(2) * ((u * u + v) * (v * v + w)));
    FieldForm want(3, 3);
    want.add_term({0, 1, 2}, ScalarField(expected));
    CHECK(pull_dw.equals_exact(want));
    CHECK(d(pullback(f, om)).equals_exact(pull_dw));
}

TEST_CASE("pullback along the identity is the identity") {
    FieldForm om = paper_two_form();
    CHECK(pullback(SmoothMap::identity(3), om).equals_exact(om));
}

TEST_CASE("pullback arity guard") {
    FieldForm om = paper_two_form();
    PolyField t = PolyField::variable(1, 0);
    SmoothMap curve(1, {ScalarField(t), ScalarField(t * t)});
    CHECK_THROWS_AS(pullback(curve, om), std::invalid_argument);
}

TEST_CASE("field-form wedge multiplies coefficients with sign bookkeeping") {
    PolyField x = PolyField::variable(2, 0);
    PolyField y = PolyField::variable(2, 1);
    FieldForm a(2, 1), b(2, 1);
    a.add_term({0}, ScalarField(x));
    b.add_term({1}, ScalarField(y));
    FieldForm ab = wedge(a, b);
    FieldForm ba = wedge(b, a);
    CHECK(ab.equals_exact(-ba));
    std::vector<double> at{2.0, 3.0};
    CHECK(ab.at(at).get({0, 1}) == doctest::Approx(6.0));
}

TEST_CASE("pullback of numeric-coefficient forms composes evaluators") {
    FieldForm om(2, 1);
    om.add_term({0}, ScalarField(NumericField(
                         2, [](std::span<const double> x) { return std::sin(x[0] * x[1]); })));
    PolyField t = PolyField::variable(1, 0);
    SmoothMap curve(1, {ScalarField(t), ScalarField(t * t)});
    FieldForm pulled = pullback(curve, om);
    CHECK(pulled.dim() == 1);
    // coefficient of dt is sin(t * t^2) * d(t)/dt = sin(t^3)
    std::vector<double> at{0.8};
    CHECK(pulled.at(at).get({0}) == doctest::Approx(std::sin(0.8 * 0.8 * 0.8)));
    CHECK_THROWS_AS(pulled.equals_exact(pulled), std::logic_error);
}
