#include <doctest.h>

#include <cmath>

#include "extcal/fields.hpp"
#include "extcal/report.hpp"

using namespace extcal;

TEST_CASE("polynomial arithmetic is exact and normalized") {
    PolyField u = PolyField::variable(3, 0);
    PolyField v = PolyField::variable(3, 1);
    PolyField p = u * u + v;
    CHECK(p.partial(0) == Rational(2) * u);
    CHECK(p.partial(2).is_zero());
    CHECK((p - p).is_zero());

    // ring laws on a sample
    PolyField a = u + v, b = u * v, c = v * v - u;
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
}

TEST_CASE("polynomial evaluation, exact and floating") {
    PolyField u = PolyField::variable(2, 0);
    PolyField v = PolyField::variable(2, 1);
    PolyField p = Rational(1, 2) * (u * u * v) + Rational(3) * v;
    std::vector<Rational> xq = {Rational(2), Rational(1, 3)};
    CHECK(p.eval_exact(xq) == Rational(2, 3) + Rational(1));
    double xd[2] = {2.0, 1.0 / 3.0};
    CHECK(p.eval(xd) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("compose substitutes exactly") {
    // the worked map components
    PolyField u = PolyField::variable(3, 0);
    PolyField v = PolyField::variable(3, 1);
    PolyField w = PolyField::variable(3, 2);
    PolyField x = PolyField::variable(3, 0);
    PolyField y = PolyField::variable(3, 1);
    std::vector<PolyField> f = {u * u + v, v * v + w, w + v};
    CHECK(x.compose(f) == u * u + v);
    CHECK((x * y).compose(f) == (u * u + v) * (v * v + w));
    // identity map leaves fields unchanged
    std::vector<PolyField> ident = {u, v, w};
    PolyField q = u * v * w + Rational(2) * u;
    CHECK(q.compose(ident) == q);
    CHECK_THROWS_AS(x.compose({u, v}), std::invalid_argument);
}

TEST_CASE("numeric fields differentiate by central differences") {
    NumericField sine(1, [](std::span<const double> x) { return std::sin(x[0]); });
    double at0[1] = {0.0};
    CHECK(std::abs(sine.partial(0).eval(at0) - 1.0) < 1e-8);
    CHECK_THROWS_AS(sine.partial(1), std::out_of_range);

    // mixed arithmetic degrades to closures but keeps values
    ScalarField s1(PolyField::variable(1, 0));
    ScalarField s2(sine);
    ScalarField prod = s1 * s2;
    double at[1] = {0.7};
    CHECK(prod.eval(at) == doctest::Approx(0.7 * std::sin(0.7)));
    CHECK(!prod.is_poly());
}

TEST_CASE("smooth maps compose and report polynomiality") {
    SmoothMap id2 = SmoothMap::identity(2);
    CHECK(id2.is_polynomial());
    PolyField t = PolyField::variable(1, 0);
    SmoothMap curve(1, {ScalarField(t * t), ScalarField(t)});
    SmoothMap curve2 = id2.compose_after(curve);
    CHECK(curve2.equals_exact(curve));
    double att[1] = {0.5};
    auto out = curve2.eval(att);
    CHECK(out[0] == doctest::Approx(0.25));
    CHECK(out[1] == doctest::Approx(0.5));
}

TEST_CASE("rational scalar guards") {
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK_THROWS_AS(Rational(INT64_MAX) * Rational(INT64_MAX), std::overflow_error);
}
