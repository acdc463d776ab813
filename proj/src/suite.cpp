#include "extcal/suite.hpp"

#include <cmath>
#include <numbers>

#include "extcal/chains.hpp"
#include "extcal/serialize.hpp"
#include "extcal/elliptic.hpp"
#include "extcal/membrane.hpp"
#include "extcal/stringdyn.hpp"
#include "extcal/worldline.hpp"

namespace extcal {

namespace {

constexpr double kPi = std::numbers::pi;

// ----- random generators (all driven by the deterministic Rng) --------------

Rational rand_rational(Rng& rng) {
    return Rational(rng.range(-6, 6), rng.range(1, 3));
}

PolyField rand_poly(Rng& rng, int nvars, int max_deg, int nterms) {
    PolyField p(nvars);
    for (int t = 0; t < nterms; ++t) {
        std::vector<int> e(nvars, 0);
        int budget = max_deg;
        for (int i = 0; i < nvars && budget > 0; ++i) {
            int d = static_cast<int>(rng.range(0, std::min(budget, 2)));
            e[i] = d;
            budget -= d;
        }
        p.add_term(e, rand_rational(rng));
    }
    return p;
}

KVector<Rational> rand_kvector(Rng& rng, int dim, int grade) {
    KVector<Rational> v(dim, grade);
    for (const auto& mi : canonical_basis(dim, grade))
        if (rng.uniform() < 0.8) v.add(mi.idx, rand_rational(rng));
    return v;
}

KForm<Rational> rand_kform(Rng& rng, int dim, int grade) {
    KForm<Rational> v(dim, grade);
    for (const auto& mi : canonical_basis(dim, grade))
        if (rng.uniform() < 0.8) v.add(mi.idx, rand_rational(rng));
    return v;
}

FieldForm rand_form(Rng& rng, int dim, int grade, int max_deg = 3) {
    FieldForm f(dim, grade);
    for (const auto& mi : canonical_basis(dim, grade))
        if (rng.uniform() < 0.8) f.add_term(mi.idx, ScalarField(rand_poly(rng, dim, max_deg, 3)));
    return f;
}

SmoothMap rand_poly_map(Rng& rng, int domain, int codomain, int max_deg = 2) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < codomain; ++i) comps.emplace_back(rand_poly(rng, domain, max_deg, 3));
    return SmoothMap(domain, std::move(comps));
}

Vec4 rand_timelike(Rng& rng) {
    Vec4 u{};
    double s2 = 0.0;
    for (int i = 1; i < 4; ++i) {
        u[i] = rng.uniform(-1.0, 1.0);
        s2 += u[i] * u[i];
    }
    double scale = rng.uniform(0.5, 2.0);
    u[0] = std::sqrt(1.0 + s2);
    for (auto& c : u) c *= scale;
    return u;
}

Vec4 rand_spacelike(Rng& rng) {
    Vec4 v{};
    double s2 = 0.0;
    for (int i = 1; i < 4; ++i) {
        v[i] = rng.uniform(-1.0, 1.0) + (i == 1 ? 1.2 : 0.0); // keep away from zero
        s2 += v[i] * v[i];
    }
    v[0] = rng.uniform(-0.7, 0.7) * std::sqrt(s2);
    double scale = rng.uniform(0.5, 2.0);
    for (auto& c : v) c *= scale;
    return v;
}

Vec4 boost01(const Vec4& v, double rapidity) {
    double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
    return Vec4{ch * v[0] + sh * v[1], sh * v[0] + ch * v[1], v[2], v[3]};
}

double mdot(const Metric<double>& g, const Vec4& a, const Vec4& b) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += g(i, j) * a[i] * b[j];
    return acc;
}

// ----- individual check groups ----------------------------------------------

void exterior_checks(VerificationReport& rep, Rng& rng) {
    using KV = KVector<Rational>;
    using KF = KForm<Rational>;

    // Anticommutativity of basis wedges plus the 2-d component formula.
    bool anti = wedge(KV::basis(3, {0}), KV::basis(3, {1})) ==
                -wedge(KV::basis(3, {1}), KV::basis(3, {0}));
    KV u(2, 1), v(2, 1);
    u.add({0}, Rational(1));
    u.add({1}, Rational(2));
    v.add({0}, Rational(3));
    v.add({1}, Rational(4));
    bool comp2 = wedge(u, v).get({0, 1}) == Rational(-2);
    bool selfzero = wedge(KV::basis(3, {0}), KV::basis(3, {0})).is_zero();
    rep.add_flag("wedge-antisymmetry", "e1^e2 = -(e2^e1); (1,2)^(3,4) = -2 e1^e2; e1^e1 = 0",
                 anti && comp2 && selfzero);

    bool ok = true;
    for (int t = 0; t < 200 && ok; ++t) {
        int n = 4;
        int p = static_cast<int>(rng.range(0, 3));
        int q = static_cast<int>(rng.range(0, 3));
        KV w = rand_kvector(rng, n, p);
        KV y = rand_kvector(rng, n, q);
        KV lhs = wedge(w, y);
        KV rhs = wedge(y, w);
        if ((p * q) % 2 == 1) rhs = -rhs;
        if (!(lhs == rhs)) ok = false;
        // associativity on a third factor
        KV z = rand_kvector(rng, n, static_cast<int>(rng.range(0, 2)));
        if (!(wedge(wedge(w, y), z) == wedge(w, wedge(y, z)))) ok = false;
    }
    rep.add_flag("wedge-graded-commutativity", "W^Y = (-1)^{pq} Y^W and associativity, 200 draws",
                 ok);

    bool pair_ok = pairing(KF::basis(3, {0, 1}), KV::basis(3, {0, 1})) == Rational(1) &&
                   pairing(KF::basis(3, {0, 1}), wedge(KV::basis(3, {1}), KV::basis(3, {0}))) ==
                       Rational(-1) &&
                   pairing(KF::basis(3, {0, 1}), KV::basis(3, {0, 2})) == Rational(0);
    // Random simple elements against the Kronecker determinant.
    Metric<Rational> idm = Metric<Rational>::identity(5);
    for (int t = 0; t < 60 && pair_ok; ++t) {
        int p = static_cast<int>(rng.range(1, 3));
        std::vector<int> fi, vi;
        for (int k = 0; k < p; ++k) {
            fi.push_back(static_cast<int>(rng.range(0, 4)));
            vi.push_back(static_cast<int>(rng.range(0, 4)));
        }
        auto [mf, sf] = canonicalize(fi);
        auto [mv, sv] = canonicalize(vi);
        if (sf == 0 || sv == 0) continue;
        // delta determinant via the identity-metric Gram minor
        Rational det = gram_minor_det(fi, vi, idm);
        KF beta(5, p);
        beta.add(fi, Rational(1));
        KV w(5, p);
        w.add(vi, Rational(1));
        if (!(pairing(beta, w) == det)) pair_ok = false;
    }
    rep.add_flag("pairing-kronecker",
                 "simple pairings equal the generalized Kronecker determinant", pair_ok);

    // contract: beta(W) = alpha(v ^ W) for every basis W, n <= 5, p <= 4.
    bool contract_ok = true;
    for (int n = 3; n <= 5 && contract_ok; ++n)
        for (int p = 1; p <= std::min(4, n) && contract_ok; ++p)
            for (int q = 1; q <= p && contract_ok; ++q) {
                KF alpha = rand_kform(rng, n, p);
                KV vv = rand_kvector(rng, n, q);
                KF beta = contract(alpha, vv);
                for (const auto& mi : canonical_basis(n, p - q)) {
                    KV w(n, p - q);
                    w.add(mi.idx, Rational(1));
                    if (!(pairing(beta, w) == pairing(alpha, wedge(vv, w)))) {
                        contract_ok = false;
                        break;
                    }
                }
            }
    // worked sign cases
    {
        KF f12 = KF::basis(3, {0, 1});
        contract_ok = contract_ok && contract(f12, KV::basis(3, {0})) == KF::basis(3, {1});
        KF f123 = KF::basis(3, {0, 1, 2});
        contract_ok = contract_ok &&
                      contract(f123, KV::basis(3, {1})) == -KF::basis(3, {0, 2});
        KV zero(3, 1);
        contract_ok = contract_ok && contract(f12, zero).is_zero();
    }
    rep.add_flag("contract-adjunction", "alpha(v)(W) = alpha(v^W), exhaustive basis W", contract_ok);

    bool dims_ok = true;
    auto binom = [](int n, int k) {
        long long r = 1;
        for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
        return r;
    };
    for (int n = 2; n <= 4; ++n)
        for (int p = 0; p <= n; ++p)
            if (static_cast<long long>(canonical_basis(n, p).size()) != binom(n, p)) dims_ok = false;
    rep.add_flag("basis-dimensions", "dim of the grade-p space is C(n,p) for n = 2,3,4", dims_ok);

    // Musical maps.
    Metric<Rational> mink = Metric<Rational>::minkowski(4);
    KV v4(4, 1);
    v4.add({0}, Rational(1));
    v4.add({1}, Rational(1));
    KF v4f = flat(v4, mink);
    bool flat_ok = v4f.get({0}) == Rational(1) && v4f.get({1}) == Rational(-1);
    for (int t = 0; t < 50 && flat_ok; ++t) {
        KV r = rand_kvector(rng, 4, 1);
        if (!(sharp(flat(r, mink), mink) == r)) flat_ok = false;
        // pairing(flat(u), v) = g(u, v)
        KV s = rand_kvector(rng, 4, 1);
        std::vector<Rational> ru(4, Rational(0)), rv(4, Rational(0));
        for (const auto& [mi, c] : r.components()) ru[mi.idx[0]] = c;
        for (const auto& [mi, c] : s.components()) rv[mi.idx[0]] = c;
        if (!(pairing(flat(r, mink), s) == mink.dot(ru, rv))) flat_ok = false;
    }
    rep.add_flag("flat-sharp", "sharp(flat(v)) = v; flat matches g(v,.)", flat_ok);

    Metric<double> minkd = Metric<double>::minkowski(4);
    KVector<double> e0(4, 1), e1(4, 1), e2(4, 1);
    e0.add({0}, 1.0);
    e1.add({1}, 1.0);
    e2.add({2}, 1.0);
    double tl_sl = grade_norm2(wedge(e0, e1), minkd);
    double par = grade_norm2(wedge(e1, e1), minkd);
    double triad = grade_norm2(wedge(wedge(e0, e1), e2), minkd);
    rep.add("grade-norm-examples",
            "Gram norms: |e0^e1|^2 = -1, |e1^e1|^2 = 0, |e0^e1^e2|^2 = 1",
            std::abs(tl_sl + 1.0) + std::abs(par) + std::abs(triad - 1.0), 1e-12);
}

void field_checks(VerificationReport& rep, Rng& rng) {
    PolyField uu = PolyField::variable(3, 0);
    PolyField vv = PolyField::variable(3, 1);
    bool partial_ok = (uu * uu + vv).partial(0) == Rational(2) * uu &&
                      PolyField::constant(3, Rational(7)).partial(2).is_zero();
    NumericField sine(1, [](std::span<const double> x) { return std::sin(x[0]); });
    double zero[1] = {0.0};
    double fd = sine.partial(0).eval(zero);
    rep.add_flag("partial-derivatives", "d/du (u^2+v) = 2u exactly; numeric sin'(0) = 1 +- 1e-8",
                 partial_ok && std::abs(fd - 1.0) < 1e-8);

    // compose respects evaluation, exact.
    bool compose_ok = true;
    for (int t = 0; t < 50 && compose_ok; ++t) {
        PolyField p = rand_poly(rng, 2, 3, 3);
        PolyField f0 = rand_poly(rng, 3, 2, 3);
        PolyField f1 = rand_poly(rng, 3, 2, 3);
        PolyField comp = p.compose({f0, f1});
        std::vector<Rational> y = {rand_rational(rng), rand_rational(rng), rand_rational(rng)};
        std::vector<Rational> x = {f0.eval_exact(y), f1.eval_exact(y)};
        if (!(comp.eval_exact(y) == p.eval_exact(x))) compose_ok = false;
    }
    rep.add_flag("compose-evaluation", "(p o f)(y) = p(f(y)), exact, 50 draws", compose_ok);

    // finite differences agree with exact partials on polynomials.
    double worst = 0.0;
    for (int t = 0; t < 30; ++t) {
        PolyField p = rand_poly(rng, 3, 3, 4);
        ScalarField sp(p);
        NumericField np(3, [p](std::span<const double> x) { return p.eval(x); });
        for (int trial = 0; trial < 5; ++trial) {
            double x[3] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            for (int i = 0; i < 3; ++i) {
                double exact = sp.partial(i).eval(x);
                double approx = np.partial(i).eval(x);
                double scale = std::max(1.0, std::abs(exact));
                worst = std::max(worst, std::abs(exact - approx) / scale);
            }
        }
    }
    rep.add("fd-vs-exact", "central differences track exact partials (relative)", worst, 1e-6);
}

// The worked 2-form and map used in several checks.
FieldForm worked_omega() {
    // omega = x dy^dz + x y^2 dz^dx + 3 dx^dy
    PolyField x = PolyField::variable(3, 0);
    PolyField y = PolyField::variable(3, 1);
    FieldForm om(3, 2);
    om.add_term({1, 2}, ScalarField(x));
    om.add_term({2, 0}, ScalarField(x * y * y));
    om.add_term({0, 1}, ScalarField(PolyField::constant(3, Rational(3))));
    return om;
}

SmoothMap worked_map() {
    // (u,v,w) -> (u^2+v, v^2+w, w+v)
    PolyField u = PolyField::variable(3, 0);
    PolyField v = PolyField::variable(3, 1);
    PolyField w = PolyField::variable(3, 2);
    std::vector<ScalarField> comps = {ScalarField(u * u + v), ScalarField(v * v + w),
                                      ScalarField(w + v)};
    return SmoothMap(3, std::move(comps));
}

void forms_checks(VerificationReport& rep, Rng& rng) {
    // d of the worked 2-form.
    FieldForm om = worked_omega();
    FieldForm dw = d(om);
    PolyField x = PolyField::variable(3, 0);
    PolyField y = PolyField::variable(3, 1);
    FieldForm expected_d(3, 3);
    expected_d.add_term({0, 1, 2},
                        ScalarField(PolyField::constant(3, Rational(1)) +
                                    Rational(2) * (x * y)));
    rep.add_flag("d-worked-example", "d(x dy^dz + x y^2 dz^dx + 3 dx^dy) = (1+2xy) dx^dy^dz",
                 dw.equals_exact(expected_d));

    bool poincare_ok = true;
    for (int t = 0; t < 200 && poincare_ok; ++t) {
        int n = static_cast<int>(rng.range(2, 4));
        int r = static_cast<int>(rng.range(0, std::min(3, n - 1)));
        if (!d(d(rand_form(rng, n, r))).is_exact_zero()) poincare_ok = false;
    }
    rep.add_flag("poincare-lemma", "d(d omega) = 0 on 200 random polynomial forms, exact",
                 poincare_ok);

    bool leibniz_ok = true;
    for (int t = 0; t < 100 && leibniz_ok; ++t) {
        int n = 4;
        int r = static_cast<int>(rng.range(0, 2));
        int s = static_cast<int>(rng.range(0, 2));
        FieldForm a = rand_form(rng, n, r, 2);
        FieldForm b = rand_form(rng, n, s, 2);
        FieldForm lhs = d(wedge(a, b));
        FieldForm rhs = wedge(d(a), b) + (r % 2 == 0 ? wedge(a, d(b)) : -wedge(a, d(b)));
        if (!lhs.equals_exact(rhs)) leibniz_ok = false;
    }
    rep.add_flag("leibniz-rule", "d(a^b) = da^b + (-1)^r a^db, 100 draws, exact", leibniz_ok);

    // The golden pullback identity.
    SmoothMap f = worked_map();
    FieldForm pull_dw = pullback(f, dw);
    PolyField u = PolyField::variable(3, 0);
    PolyField v = PolyField::variable(3, 1);
    PolyField w = PolyField::variable(3, 2);
    PolyField jac = Rational(2) * u * (Rational(2) * v - PolyField::constant(3, Rational(1)));
    PolyField dens = PolyField::constant(3, Rational(1)) +
                     Rational(2) * ((u * u + v) * (v * v + w));
    FieldForm expected_pull(3, 3);
    expected_pull.add_term({0, 1, 2}, ScalarField(jac * dens));
    rep.add_flag("pullback-golden",
                 "f*(d omega) = 2u(2v-1)(1 + 2(u^2+v)(v^2+w)) du^dv^dw, exact",
                 pull_dw.equals_exact(expected_pull));
    rep.add_flag("pullback-commutes-d-worked", "d(f* omega) = f*(d omega) on the worked data",
                 d(pullback(f, om)).equals_exact(pull_dw));
    rep.add_flag("pullback-identity-map", "pullback along the identity returns the same form",
                 pullback(SmoothMap::identity(3), om).equals_exact(om));

    bool commute_ok = true;
    for (int t = 0; t < 100 && commute_ok; ++t) {
        int n = 3;
        int r = static_cast<int>(rng.range(0, 2));
        SmoothMap fm = rand_poly_map(rng, n, n);
        FieldForm omr = rand_form(rng, n, r, 2);
        if (!d(pullback(fm, omr)).equals_exact(pullback(fm, d(omr)))) commute_ok = false;
    }
    rep.add_flag("pullback-commutes-d", "f*(d omega) = d(f* omega), 100 random draws, exact",
                 commute_ok);

    bool functor_ok = true;
    for (int t = 0; t < 50 && functor_ok; ++t) {
        SmoothMap fm = rand_poly_map(rng, 3, 3);
        SmoothMap gm = rand_poly_map(rng, 3, 3);
        FieldForm omr = rand_form(rng, 3, static_cast<int>(rng.range(0, 2)), 2);
        FieldForm lhs = pullback(fm.compose_after(gm), omr);
        FieldForm rhs = pullback(gm, pullback(fm, omr));
        if (!lhs.equals_exact(rhs)) functor_ok = false;
    }
    rep.add_flag("pullback-functoriality", "(f o g)* = g* o f*, 50 draws, exact", functor_ok);
}

void chain_checks(VerificationReport& rep, Rng& rng, const BoundaryConvention& conv) {
    auto q8 = QuadratureRule::gauss_legendre(8);
    double wsum = 0.0;
    for (double w : q8.weights) wsum += w;
    rep.add("quadrature-weights", "Gauss-Legendre weights sum to one per axis",
            std::abs(wsum - 1.0), 1e-14);

    // Boundary structure of the square and the cube.
    Chain square = Chain::single(SingularCube::unit(2));
    Chain cube = Chain::single(SingularCube::unit(3));
    bool structure_ok = boundary(square, conv).terms.size() == 4 &&
                        boundary(cube, conv).terms.size() == 6;
    rep.add_flag("boundary-structure",
                 "the square bounds 4 signed edges; the cube bounds 6 oriented faces",
                 structure_ok);

    bool dd_ok = true;
    for (int t = 0; t < 25 && dd_ok; ++t) {
        int r = static_cast<int>(rng.range(2, 3));
        // random affine cube into R^4
        std::vector<ScalarField> comps;
        for (int i = 0; i < 4; ++i) {
            PolyField c = PolyField::constant(r, rand_rational(rng));
            for (int j = 0; j < r; ++j)
                c = c + rand_rational(rng) * PolyField::variable(r, j);
            comps.emplace_back(std::move(c));
        }
        Chain one = Chain::single(SingularCube(r, SmoothMap(r, std::move(comps))));
        Chain dd = boundary(boundary(one, conv), conv).simplified();
        if (!dd.terms.empty()) dd_ok = false;
    }
    rep.add_flag("boundary-squared", "the boundary of a boundary cancels to the empty chain",
                 dd_ok);

    // Stokes on the worked 1-form plus random polynomial data.
    double worst = 0.0;
    {
        FieldForm xdy(2, 1);
        xdy.add_term({1}, ScalarField(PolyField::variable(2, 0)));
        worst = std::max(worst, stokes_residual(xdy, square, q8, conv));
        double per = integrate(xdy, boundary(square, conv), q8);
        worst = std::max(worst, std::abs(per - 1.0));
    }
    for (int t = 0; t < 20; ++t) {
        worst = std::max(worst, stokes_residual(rand_form(rng, 2, 1, 3), square, q8, conv));
        worst = std::max(worst, stokes_residual(rand_form(rng, 3, 2, 3), cube, q8, conv));
    }
    rep.add("stokes", "int_C d(omega) = int_dC omega on the unit square and cube", worst, 1e-8);

    // Chain linearity.
    {
        FieldForm om = rand_form(rng, 2, 2, 2);
        SingularCube c1(2, rand_poly_map(rng, 2, 2, 2));
        SingularCube c2(2, rand_poly_map(rng, 2, 2, 2));
        Chain combined(2, 2);
        combined.add(3, c1);
        combined.add(-2, c2);
        double lhs = integrate(om, combined, q8);
        double rhs = 3 * integrate(om, Chain::single(c1), q8) -
                     2 * integrate(om, Chain::single(c2), q8);
        rep.add("chain-linearity", "integration is linear in the chain", std::abs(lhs - rhs),
                1e-12);
    }

    // The parameterisation-dependent functional vs the invariant one (a=1, b=2).
    {
        const double a = 1.0, b = 2.0;
        PolyField su = PolyField::variable(2, 0), sv = PolyField::variable(2, 1);
        ScalarField f_sq(su * su + sv * sv);
        ScalarField f_len(NumericField(
            2, [](std::span<const double> x) { return std::hypot(x[0], x[1]); }));
        PolyField t = PolyField::variable(1, 0);
        SmoothMap line(1, {ScalarField(Rational(1) * t), ScalarField(Rational(2) * t)});
        SmoothMap line_reparam(1, {ScalarField(Rational(1) * (t * t)),
                                   ScalarField(Rational(2) * (t * t))});
        double i_tau = velocity_functional(f_sq, line, q8);
        double i_sigma = velocity_functional(f_sq, line_reparam, q8);
        double len_tau = velocity_functional(f_len, line, q8);
        double len_sigma = velocity_functional(f_len, line_reparam, q8);
        double resid = std::abs(i_tau - (a * a + b * b)) +
                       std::abs(i_sigma - 4.0 / 3.0 * (a * a + b * b)) +
                       std::abs(len_tau - std::sqrt(5.0)) + std::abs(len_sigma - std::sqrt(5.0));
        rep.add("velocity-functional",
                "I_tau = a^2+b^2, I_sigma = 4/3 (a^2+b^2); degree-one F is invariant", resid,
                1e-8);
    }

    // Form integrals are reparameterisation invariant.
    {
        PolyField t = PolyField::variable(1, 0);
        SmoothMap curve(1, {ScalarField(t * t + t), ScalarField(Rational(2) * t)});
        FieldForm om(2, 1);
        om.add_term({0}, ScalarField(rand_poly(rng, 2, 2, 3)));
        om.add_term({1}, ScalarField(rand_poly(rng, 2, 2, 3)));
        SmoothMap reparam(1, {ScalarField(t * t)}); // orientation-preserving on (0,1)
        auto rc = reparam_invariance_check(om, SingularCube(1, curve), reparam, q8);
        SmoothMap ident = SmoothMap::identity(1);
        auto rc_id = reparam_invariance_check(om, SingularCube(1, curve), ident, q8);

        // theta d theta ^ d phi on a curved patch, 2-d reparameterisation.
        FieldForm theta_form(2, 2);
        theta_form.add_term({0, 1}, ScalarField(PolyField::variable(2, 0)));
        PolyField tt = PolyField::variable(2, 0), ss = PolyField::variable(2, 1);
        SmoothMap patch(2, {ScalarField(tt * tt + ss), ScalarField(ss * ss + tt)});
        PolyField three = PolyField::constant(2, Rational(3));
        PolyField two = PolyField::constant(2, Rational(2));
        SmoothMap smoothstep(2, {ScalarField(tt * tt * (three - two * tt)),
                                 ScalarField(ss * ss * (three - two * ss))});
        auto rc2 = reparam_invariance_check(theta_form, SingularCube(2, patch), smoothstep, q8);
        rep.add("reparam-invariance",
                "form integrals agree under orientation-preserving reparameterisation",
                rc.delta + rc_id.delta + rc2.delta, 1e-8);
    }

    // Refining the rule shrinks the residual for non-polynomial data.
    {
        FieldForm om(2, 1);
        om.add_term({0}, ScalarField(NumericField(2, [](std::span<const double> x) {
                        return std::sin(4.0 * x[0]) * std::exp(x[1]);
                    })));
        double r4 = stokes_residual(om, square, QuadratureRule::gauss_legendre(4), conv);
        double r8 = stokes_residual(om, square, QuadratureRule::gauss_legendre(8), conv);
        rep.add_flag("quadrature-convergence",
                     "doubling points per axis reduces the numeric-data residual", r8 < r4);
    }
}

void worldline_checks(VerificationReport& rep, Rng& rng) {
    Metric<double> mink = Metric<double>::minkowski(4);

    // Free particle: exact conservation and a straight path.
    {
        ParticleScenario sc;
        sc.mass = 2.0;
        sc.x0 = {0, 0, 0, 0};
        sc.u0 = {std::sqrt(2.0), 1.0, 0, 0};
        sc.step = 1e-3;
        sc.tau_end = 1.0; // 1000 steps
        auto traj = integrate_worldline(sc);
        double pdrift = 0.0, path = 0.0;
        for (const auto& s : traj.samples) {
            for (int i = 0; i < 4; ++i) {
                pdrift = std::max(pdrift, std::abs(s.p[i] - traj.samples[0].p[i]));
                path = std::max(path,
                                std::abs(s.x[i] - (sc.x0[i] + traj.samples[0].u[i] * s.tau)));
            }
        }
        rep.add("free-particle-momentum", "free particle: p(tau) = p(0) over 1000 steps", pdrift,
                1e-10);
        rep.add("free-particle-path", "x(tau) = x(0) + u(0) tau", path, 1e-10);
        // momentum map is homogeneous of degree zero
        Vec4 doubled = {2 * std::sqrt(2.0), 2.0, 0, 0};
        Vec4 p1 = momentum(sc.u0, sc.mass, mink);
        Vec4 p2 = momentum(doubled, sc.mass, mink);
        double hdiff = 0.0;
        for (int i = 0; i < 4; ++i) hdiff = std::max(hdiff, std::abs(p1[i] - p2[i]));
        rep.add("momentum-homogeneity", "p is unchanged under rescaling the tangent", hdiff,
                1e-14);
    }

    // Constant magnetic field: gyration at q B / m.
    {
        const double B = 0.5, q = 1.0, m = 1.0;
        PolyField x1 = PolyField::variable(4, 1);
        FieldForm a(4, 1);
        a.add_term({2}, ScalarField(Rational(-1, 2) * x1)); // A = -B x1 dx2 with B = 1/2
        FieldForm f = em_field_strength(a);
        std::vector<double> origin{0, 0, 0, 0};
        rep.add("em-field-strength", "d(-B x1 dx2) = -B dx1^dx2",
                std::abs(f.at(origin).get({1, 2}) + B), 1e-15);

        ParticleScenario sc;
        sc.mass = m;
        sc.charge = q;
        sc.potential = a;
        sc.x0 = {0, 0, 0, 0};
        double v = 0.3;
        sc.u0 = {std::sqrt(1 + v * v), v, 0, 0};
        double omega_c = q * B / m;
        double period = 2 * kPi / omega_c;
        sc.step = period / 4096;
        sc.tau_end = period;
        auto traj = integrate_worldline(sc);

        // Accumulated phase of (u1, u2) over one period.
        double phase = 0.0;
        for (std::size_t k = 1; k < traj.samples.size(); ++k) {
            const auto& a0 = traj.samples[k - 1].u;
            const auto& a1 = traj.samples[k].u;
            double cross = a0[1] * a1[2] - a0[2] * a1[1];
            double dotp = a0[1] * a1[1] + a0[2] * a1[2];
            phase += std::atan2(cross, dotp);
        }
        double omega_measured = std::abs(phase) / sc.tau_end;
        rep.add("gyration-frequency", "proper-time angular frequency equals q B / m",
                std::abs(omega_measured - omega_c) / omega_c, 1e-6);
        rep.add("mass-shell-em", "p.p = m^2 along the charged worldline", traj.max_shell_residual,
                1e-8);

        // Gauge shift A -> A + d phi leaves the trajectory unchanged.
        PolyField phi = rand_poly(rng, 4, 2, 3);
        FieldForm phi0(4, 0);
        phi0.add_term({}, ScalarField(phi));
        FieldForm shifted = a + d(phi0);
        ParticleScenario sc2 = sc;
        sc2.potential = shifted;
        auto traj2 = integrate_worldline(sc2);
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.samples.size(); ++k)
            for (int i = 0; i < 4; ++i)
                worst = std::max(worst, std::abs(traj.samples[k].x[i] - traj2.samples[k].x[i]));
        rep.add("gauge-shift", "A -> A + d phi leaves the worldline unchanged", worst, 1e-10);
        rep.add_flag("maxwell-closure", "d(dA) = 0, exact", d(f).is_exact_zero());
        rep.add_flag("gauge-shift-field", "d(A + d phi) = dA, exact",
                     d(shifted).equals_exact(f));
    }

    // Christoffel symbols of the polar-plane block.
    {
        PolyField r = PolyField::variable(4, 1);
        PolyField zero = PolyField(4);
        PolyField one = PolyField::constant(4, Rational(1));
        std::vector<std::vector<ScalarField>> comps(4, std::vector<ScalarField>(4, ScalarField(zero)));
        comps[0][0] = ScalarField(one);
        comps[1][1] = ScalarField(-one);
        comps[2][2] = ScalarField(-(r * r));
        comps[3][3] = ScalarField(-one);
        MetricField gf = MetricField::from_components(4, comps);
        double x[4] = {0.0, 1.7, 0.4, 0.0};
        auto gamma = christoffel(gf, x);
        double resid = std::abs(gamma[1][2][2] - (-x[1])) + std::abs(gamma[2][1][2] - 1.0 / x[1]);
        // symmetry on a random polynomial metric
        std::vector<std::vector<ScalarField>> rnd(4, std::vector<ScalarField>(4, ScalarField(zero)));
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                PolyField base = i == j ? (i == 0 ? one : -one) : zero;
                PolyField wiggle = Rational(1, 10) * rand_poly(rng, 4, 1, 2);
                rnd[i][j] = rnd[j][i] = ScalarField(base + wiggle);
            }
        MetricField gf2 = MetricField::from_components(4, rnd);
        double x2[4] = {0.1, 0.2, -0.1, 0.05};
        auto gamma2 = christoffel(gf2, x2);
        double sym = 0.0;
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    sym = std::max(sym, std::abs(gamma2[b][i][j] - gamma2[b][j][i]));
        rep.add("christoffel", "polar block: G^r_tt = -r, G^t_rt = 1/r; symmetric lower indices",
                resid + sym, 1e-9);
    }

    // Geodesics of flat space written in polar coordinates are straight lines.
    {
        auto g_tt = NumericField(4, [](std::span<const double>) { return 1.0; });
        auto g_rr = NumericField(4, [](std::span<const double>) { return -1.0; });
        auto g_thth = NumericField(4, [](std::span<const double> x) { return -x[1] * x[1]; });
        auto g_zz = NumericField(4, [](std::span<const double>) { return -1.0; });
        PolyField zero = PolyField(4);
        std::vector<std::vector<ScalarField>> comps(4, std::vector<ScalarField>(4, ScalarField(zero)));
        comps[0][0] = ScalarField(g_tt);
        comps[1][1] = ScalarField(g_rr);
        comps[2][2] = ScalarField(g_thth);
        comps[3][3] = ScalarField(g_zz);
        MetricField gf = MetricField::from_components(4, comps);

        // Straight Cartesian motion: start at (2, 1), velocity (0.1, 0.2).
        double X0 = 2.0, Y0 = 1.0, VX = 0.1, VY = 0.2;
        double r0 = std::hypot(X0, Y0), th0 = std::atan2(Y0, X0);
        double rdot0 = (X0 * VX + Y0 * VY) / r0;
        double thdot0 = (X0 * VY - Y0 * VX) / (r0 * r0);
        double u0t = std::sqrt(1.0 + VX * VX + VY * VY);

        ParticleScenario sc;
        sc.metric = gf;
        sc.x0 = {0.0, r0, th0, 0.0};
        sc.u0 = {u0t, rdot0, thdot0, 0.0};
        sc.step = 2e-3;
        sc.tau_end = 2.0;
        auto traj = integrate_worldline(sc);
        double worst = 0.0;
        for (const auto& s : traj.samples) {
            double cx = s.x[1] * std::cos(s.x[2]);
            double cy = s.x[1] * std::sin(s.x[2]);
            // proper time tau: Cartesian straight line sampled at the same tau
            worst = std::max(worst, std::hypot(cx - (X0 + VX * s.tau), cy - (Y0 + VY * s.tau)));
        }
        rep.add("polar-geodesic", "flat-space geodesics in polar coordinates are straight lines",
                worst, 1e-6);
    }

    // A rescaled evolution parameter reproduces the proper-time path.
    {
        PolyField x1 = PolyField::variable(4, 1);
        FieldForm a(4, 1);
        a.add_term({2}, ScalarField(Rational(-1, 2) * x1));
        ParticleScenario base;
        base.charge = 1.0;
        base.potential = a;
        base.u0 = {std::sqrt(1.09), 0.3, 0, 0};
        base.step = 1e-3;
        base.tau_end = 2.0;
        auto ref = integrate_worldline(base);

        ParticleScenario scaled = base;
        scaled.proper_time_gauge = false;
        for (auto& c : scaled.u0) c *= 2.0; // u.u = 4, tau = 2 t
        scaled.step = base.step / 2.0;
        scaled.tau_end = base.tau_end / 2.0;
        auto alt = integrate_worldline(scaled);
        double worst = 0.0;
        std::size_t n = std::min(ref.samples.size(), alt.samples.size());
        for (std::size_t k = 0; k < n; ++k)
            for (int i = 0; i < 4; ++i)
                worst = std::max(worst, std::abs(ref.samples[k].x[i] - alt.samples[k].x[i]));
        rep.add("worldline-reparameterisation",
                "rescaled evolution parameter retraces the proper-time path", worst, 1e-8);
    }
}

void string_checks(VerificationReport& rep, Rng& rng) {
    Metric<double> mink = Metric<double>::minkowski(4);

    // Identities over random Lorentz-valid pairs, plus boost invariance.
    {
        double worst = 0.0, worst_norm = 0.0, boost_diff = 0.0;
        for (int t = 0; t < 1000; ++t) {
            Vec4 u = rand_timelike(rng);
            Vec4 v = rand_spacelike(rng);
            auto idr = identity_suite(u, v, mink);
            worst = std::max({worst, idr.ptau_norm, idr.psigma_norm, idr.ptau_orth,
                              idr.psigma_orth});
            worst_norm = std::max(worst_norm, idr.normalization);
            if (t % 100 == 0) {
                double chi = rng.uniform(-1.0, 1.0);
                auto idb = identity_suite(boost01(u, chi), boost01(v, chi), mink);
                boost_diff = std::max(boost_diff,
                                      std::abs(idb.max_residual - idr.max_residual));
            }
        }
        rep.add("string-identities",
                "p_tau^2 = -lambda'^2, p_sigma^2 = -lambda_dot^2, p_tau.lambda' = 0, "
                "p_sigma.lambda_dot = 0 over 1000 draws",
                worst, 1e-10);
        rep.add("string-pi-normalization", "Pi evaluated on the worldsheet 2-vector equals one",
                worst_norm, 1e-10);
        rep.add("string-boost-invariance", "identity residuals are Lorentz invariant",
                boost_diff, 1e-9);
    }

    // Orthonormal element: the worked component values.
    {
        Vec4 u{1, 0, 0, 0}, v{0, 1, 0, 0};
        auto mc = momentum_currents(u, v, mink);
        auto pf = pi_components(u, v, mink);
        double resid = std::abs(mc.delta - 1.0) + std::abs(mc.p_tau[0] + 1.0) +
                       std::abs(mc.p_tau[1]) + std::abs(mc.p_sigma[1] - 1.0) +
                       std::abs(pf.pi.get({0, 1}) + 1.0) +
                       std::abs(mdot(mink, mc.p_tau, mc.p_tau) - 1.0) +
                       std::abs(mdot(mink, mc.p_sigma, mc.p_sigma) + 1.0);
        rep.add("string-orthonormal-element",
                "Delta = 1, p_tau = (-1,0,0,0), pi_01 = -1, p_tau^2 = 1, p_sigma^2 = -1", resid,
                1e-14);
        bool rejected = false;
        try {
            momentum_currents(u, Vec4{2, 0, 0, 0}, mink); // parallel timelike pair
        } catch (const PreconditionError&) {
            rejected = true;
        }
        rep.add_flag("string-degenerate-rejected",
                     "a degenerate sheet element (Delta^2 <= 0) is refused", rejected);
    }

    // Static straight string: the covariant residual vanishes to round-off.
    {
        const double L = 2.0;
        SheetGrid sheet;
        sheet.n_sigma = 21;
        sheet.n_tau = 21;
        sheet.dsigma = 1.0 / 20;
        sheet.dtau = 1.0 / 20;
        sheet.lambda.resize(21 * 21);
        for (int j = 0; j < 21; ++j)
            for (int i = 0; i < 21; ++i)
                sheet.at(j, i) = Vec4{j * sheet.dtau, L * i * sheet.dsigma, 0, 0};
        auto cov = covariant_eom_residual(sheet, mink);
        rep.add("string-static", "a static straight string satisfies the covariant equations",
                std::max(cov.max_interior, cov.edge_max), 1e-12);
    }

    // Standing wave: convergence study of all grid residuals.
    {
        const double A = 0.1;
        auto run = [&](int nsig) {
            LightConeInput in;
            in.topology = StringTopology::Open;
            in.n_sigma = nsig;
            in.cfl = 0.5;
            in.tau_end = 2.0;
            in.f0 = [A](double s) { return A * std::cos(kPi * s); };
            in.f0_dot = [](double) { return 0.0; };
            in.g0 = [](double) { return 0.0; };
            in.g0_dot = [](double) { return 0.0; };
            LightConeState st = solve_light_cone(in);
            YReport yr = reconstruct_y(st);
            SheetGrid sheet = lift_to_spacetime(st);
            auto cov = covariant_eom_residual(sheet, light_cone_metric(), 0.05);
            auto momenta = total_momentum_series(sheet, light_cone_metric());
            double pdrift = 0.0;
            for (std::size_t j = 2; j + 2 < momenta.values.size(); ++j)
                for (int mu = 0; mu < 4; ++mu)
                    pdrift = std::max(pdrift,
                                      std::abs(momenta.values[j][mu] - momenta.values[2][mu]));
            // analytic-solution error
            double sol_err = 0.0;
            for (int j = 0; j < st.n_tau; ++j)
                for (int i = 0; i < st.n_sigma; ++i)
                    sol_err = std::max(sol_err,
                                       std::abs(st.f[j][i] - A * std::cos(kPi * st.sigma_at(i)) *
                                                                  std::cos(kPi * st.tau_at(j))));
            return std::array<double, 5>{wave_residual(st), yr.max_compat_residual,
                                         cov.max_interior, pdrift, sol_err};
        };
        auto r1 = run(33), r2 = run(65), r3 = run(129);
        double min_order = 1e9;
        for (int k = 0; k < 5; ++k) {
            double o1 = std::log2(r1[k] / r2[k]);
            double o2 = std::log2(r2[k] / r3[k]);
            min_order = std::min({min_order, o1, o2});
        }
        rep.add("string-standing-wave-convergence",
                "wave, compatibility, covariant, momentum-drift and solution-error residuals "
                "converge at order >= 1.8",
                std::max(0.0, 1.8 - min_order), 0.0);

        // Endpoint null condition on analytic data: with Neumann ends the
        // light-cone line element of the endpoint worldline vanishes.
        double worst = 0.0;
        for (double tau : {0.1, 0.4, 0.9, 1.7}) {
            for (double sigma : {0.0, 1.0}) {
                double fd = -A * kPi * std::cos(kPi * sigma) * std::sin(kPi * tau);
                double fp = -A * kPi * std::sin(kPi * sigma) * std::cos(kPi * tau);
                double yd = 0.5 * (fd * fd + fp * fp); // g terms vanish
                worst = std::max(worst, std::abs(2 * yd - fd * fd));
            }
        }
        rep.add("string-endpoint-null-analytic",
                "2 y_dot = f_dot^2 + g_dot^2 at free ends (analytic standing wave)", worst, 1e-8);

        LightConeInput in;
        in.topology = StringTopology::Open;
        in.n_sigma = 65;
        in.cfl = 0.5;
        in.tau_end = 2.0;
        in.f0 = [A](double s) { return A * std::cos(kPi * s); };
        in.g0 = [](double) { return 0.0; };
        LightConeState st = solve_light_cone(in);
        reconstruct_y(st);
        auto ep = endpoint_null_check(st);
        rep.add("string-endpoint-null-grid",
                "endpoint null residual on the solved grid is discretization-small",
                std::max(ep.residual[0], ep.residual[1]), 50.0 * st.dsigma * st.dsigma);

        // Zero initial data stays zero.
        LightConeInput z = in;
        z.f0 = [](double) { return 0.0; };
        LightConeState zst = solve_light_cone(z);
        double zmax = 0.0;
        for (const auto& row : zst.f)
            for (double vv : row) zmax = std::max(zmax, std::abs(vv));
        rep.add("string-zero-data", "zero initial data evolves to the zero solution", zmax, 0.0);

        // EOM redundancy: at most two significant directions in the pointwise
        // sensitivity (reported, not asserted).
        SheetGrid sheet = lift_to_spacetime(st);
        auto sv = eom_rank_singular_values(sheet, light_cone_metric(), st.n_tau / 2, st.n_sigma / 2);
        rep.add_flag("string-eom-rank",
                     "divergence sensitivity singular values recorded (reparameterisation "
                     "redundancy): s3/s1 = " +
                         format_double(sv[3] / std::max(sv[0], 1e-300)),
                     true);
    }

    // Travelling pulse on the closed string returns after one period.
    {
        const double A = 0.05;
        LightConeInput in;
        in.topology = StringTopology::Closed;
        in.n_sigma = 128;
        in.cfl = 0.5;
        in.tau_end = 1.0;
        in.f0 = [A](double s) { return A * std::sin(2 * kPi * s); };
        in.f0_dot = [A](double s) { return -A * 2 * kPi * std::cos(2 * kPi * s); };
        in.g0 = [](double) { return 0.0; };
        in.g0_dot = [](double) { return 0.0; };
        LightConeState st = solve_light_cone(in);
        double worst = 0.0;
        int last = st.n_tau - 1;
        for (int i = 0; i < st.n_sigma; ++i)
            worst = std::max(worst, std::abs(st.f[last][i] - st.f[0][i]));
        rep.add("string-dalembert-period",
                "a travelling pulse B(sigma - tau) returns after one period",
                worst, 100.0 * st.dsigma * st.dsigma);
    }

    // Non-extremal sheet: the residual is decisively nonzero.
    {
        SheetGrid sheet;
        sheet.n_sigma = 33;
        sheet.n_tau = 33;
        sheet.dsigma = 1.0 / 32;
        sheet.dtau = 1.0 / 32;
        sheet.lambda.resize(33 * 33);
        for (int j = 0; j < 33; ++j)
            for (int i = 0; i < 33; ++i) {
                double tau = j * sheet.dtau, sig = i * sheet.dsigma;
                sheet.at(j, i) = Vec4{tau, 2.0 * sig + 0.3 * sig * sig * tau,
                                      0.2 * std::sin(2 * kPi * sig) * (1 + tau), 0.1 * tau * tau};
            }
        auto cov = covariant_eom_residual(sheet, mink);
        rep.add_flag("string-nonextremal-control",
                     "an arbitrary non-extremal sheet shows an order-one residual",
                     cov.max_interior > 1e-2);
    }

    // Electromagnetic boundary residual: free null ends vs. charged controls.
    {
        const double A = 0.1;
        LightConeInput in;
        in.topology = StringTopology::Open;
        in.n_sigma = 65;
        in.cfl = 0.5;
        in.tau_end = 1.0;
        in.f0 = [A](double s) { return A * std::cos(kPi * s); };
        in.g0 = [](double) { return 0.0; };
        LightConeState st = solve_light_cone(in);
        reconstruct_y(st);
        SheetGrid sheet = lift_to_spacetime(st);
        Metric<double> eta = light_cone_metric();

        PolyField x2 = PolyField::variable(4, 2);
        FieldForm a(4, 1);
        a.add_term({3}, ScalarField(Rational(1, 2) * x2)); // F = 1/2 dx2 ^ dx3
        FieldForm fstr = d(a);
        rep.add_flag("string-maxwell-closure", "d(dA) = 0 for the boundary potential, exact",
                     d(fstr).is_exact_zero());

        auto free_end = em_boundary_residual(sheet, eta, fstr, 0.0);
        auto charged = em_boundary_residual(sheet, eta, fstr, 2.0);
        double h2 = 80.0 * st.dsigma * st.dsigma;
        rep.add("string-free-boundary", "q = 0 reduces to the null-end condition p_sigma = 0",
                std::max(free_end.residual[0], free_end.residual[1]), h2);
        rep.add_flag("string-em-boundary-control",
                     "a free solution violates the charged boundary condition",
                     std::max(charged.residual[0], charged.residual[1]) > 1e-2);
    }
}

void membrane_checks(VerificationReport& rep, Rng& rng) {
    Metric<double> mink = Metric<double>::minkowski(4);

    auto rand_triad = [&](Rng& r) {
        for (;;) {
            MembraneElement el{rand_timelike(r), rand_spacelike(r), rand_spacelike(r)};
            double a = mdot(mink, el.t_tau, el.t_tau);
            double b = mdot(mink, el.t_sigma, el.t_sigma);
            double f = mdot(mink, el.t_rho, el.t_rho);
            double c = mdot(mink, el.t_tau, el.t_sigma);
            double dd = mdot(mink, el.t_tau, el.t_rho);
            double e = mdot(mink, el.t_sigma, el.t_rho);
            double det = a * (b * f - e * e) - c * (c * f - e * dd) + dd * (c * e - b * dd);
            if (det > 1e-3) return el;
        }
    };

    // Normalization and the nine identities.
    {
        MembraneElement ortho{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
        MembranePi mp = membrane_pi(ortho, mink);
        double resid = std::abs(mp.delta - 1.0) +
                       std::abs(membrane_pi_normalization(mp, mink) - 1.0);
        auto rep0 = constraint_suite(ortho, mink);
        resid += std::abs(mdot(mink, rep0.p_tau, rep0.p_tau) - 1.0);
        rep.add("membrane-orthonormal-element",
                "orthonormal triad: Delta = 1, Pi(sharp Pi) = 1, P_tau^2 = 1", resid, 1e-12);

        bool rejected = false;
        try {
            MembraneElement coplanar{{1, 0, 0, 0}, {0, 1, 0, 0}, {0.5, 0.5, 0, 0}};
            membrane_pi(coplanar, mink);
        } catch (const PreconditionError&) {
            rejected = true;
        }
        rep.add_flag("membrane-degenerate-rejected", "a coplanar triad (Delta = 0) is refused",
                     rejected);

        double worst_norm = 0.0, worst_id = 0.0, boost_diff = 0.0;
        for (int t = 0; t < 1000; ++t) {
            MembraneElement el = rand_triad(rng);
            MembranePi mp2 = membrane_pi(el, mink);
            worst_norm = std::max(worst_norm,
                                  std::abs(membrane_pi_normalization(mp2, mink) - 1.0));
            auto cs = constraint_suite(el, mink);
            worst_id = std::max(worst_id, cs.max_residual);
            if (t % 100 == 0) {
                double chi = rng.uniform(-1.0, 1.0);
                MembraneElement bel{boost01(el.t_tau, chi), boost01(el.t_sigma, chi),
                                    boost01(el.t_rho, chi)};
                auto cb = constraint_suite(bel, mink);
                boost_diff = std::max(boost_diff, std::abs(cb.max_residual - cs.max_residual));
            }
        }
        rep.add("membrane-pi-normalization", "Pi(sharp Pi) = 1 over 1000 random triads",
                worst_norm, 1e-10);
        rep.add("membrane-nine-identities",
                "P_K^2 equals the complementary 2x2 Gram determinant and P_K is orthogonal to "
                "its generators, 1000 draws",
                worst_id, 1e-9);
        rep.add("membrane-boost-invariance", "constraint residuals are Lorentz invariant",
                boost_diff, 1e-9);
    }

    // Null-boundary statement in the degenerate sense.
    {
        MembraneElement el{{1, 1, 0, 0}, {0, 0, 1, 0}, {1, -1, 0, 2}};
        auto cs = constraint_suite(el, mink);
        double gram2 = mdot(mink, el.t_tau, el.t_tau) * mdot(mink, el.t_sigma, el.t_sigma) -
                       std::pow(mdot(mink, el.t_tau, el.t_sigma), 2);
        rep.add("membrane-null-boundary",
                "P_rho^2 equals the tau-sigma Gram determinant, zero for a null boundary element",
                std::abs(mdot(mink, cs.p_rho, cs.p_rho)) + std::abs(gram2), 1e-12);
    }

    // Gauge-fixed residual on the spherical pulsation, with a static control.
    {
        const double rmax = 1.3;
        const double k = 1.0 / std::numbers::sqrt2;
        const double gamma = elliptic_K(k);
        const double alpha = std::numbers::sqrt2 / rmax;
        auto R = [=](double tau) { return rmax * jacobi_cn(gamma - alpha * tau, k); };
        auto Rdot = [=](double tau) {
            auto jv = jacobi_elliptic(gamma - alpha * tau, k);
            return rmax * alpha * jv.sn * jv.dn;
        };
        auto make_metric = [&](bool frozen) {
            PolyField zero = PolyField(4);
            std::vector<std::vector<ScalarField>> comps(4,
                                                        std::vector<ScalarField>(4, ScalarField(zero)));
            auto rr = [=](std::span<const double> x) { return frozen ? 0.9 : R(x[0]); };
            auto rd = [=](std::span<const double> x) { return frozen ? 0.0 : Rdot(x[0]); };
            comps[0][0] = ScalarField(NumericField(4, [=](std::span<const double> x) {
                double v = rd(x);
                return 1.0 - v * v;
            }));
            comps[1][1] = ScalarField(NumericField(4, [=](std::span<const double> x) {
                double rx = rr(x) + x[3];
                return -rx * rx;
            }));
            comps[2][2] = ScalarField(NumericField(4, [=](std::span<const double> x) {
                double rx = rr(x) + x[3];
                double s = std::sin(x[1]);
                return -rx * rx * s * s;
            }));
            comps[3][3] = ScalarField(NumericField(4, [](std::span<const double>) { return -1.0; }));
            comps[0][3] = comps[3][0] =
                ScalarField(NumericField(4, [=](std::span<const double> x) { return -rd(x); }));
            return MetricField::from_components(4, comps);
        };

        MetricField pulsing = make_metric(false);
        double worst = 0.0;
        for (double tau : {0.2, 0.5, 0.9}) {
            double x[4] = {tau, 1.1, 0.7, 0.0};
            worst = std::max(worst, std::abs(gauge_fixed_residual(pulsing, x, 1e-5)));
        }
        rep.add("membrane-gauge-fixed-residual",
                "the pulsating sphere satisfies the gauge-fixed field equation", worst, 5e-5);

        MetricField frozen = make_metric(true);
        double xs[4] = {0.3, kPi / 2, 0.7, 0.0};
        double static_resid = gauge_fixed_residual(frozen, xs, 1e-5);
        rep.add("membrane-static-control",
                "a static sphere is not stationary: residual 2R at the equator",
                std::abs(static_resid - 2.0 * 0.9), 1e-4);
    }

    // Covariant residual evaluator on the pulsating-sphere worldvolume.
    {
        auto build = [&](int n, bool frozen) {
            WorldvolumeGrid g;
            g.n_tau = g.n_sigma = g.n_rho = n;
            double t0 = 0.15, t1 = 0.45, s0 = 0.7, s1 = 2.4, r0 = 0.5, r1 = 5.5;
            g.dtau = (t1 - t0) / (n - 1);
            g.dsigma = (s1 - s0) / (n - 1);
            g.drho = (r1 - r0) / (n - 1);
            g.lambda.resize(static_cast<std::size_t>(n) * n * n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < n; ++k) {
                        double tau = t0 + j * g.dtau, sig = s0 + i * g.dsigma,
                               rho = r0 + k * g.drho;
                        double R = frozen ? 0.9
                                          : spherical_closed_form(
                                                1.0, tau + spherical_collapse_time(1.0));
                        g.at(j, i, k) = Vec4{tau, R * std::sin(sig) * std::sin(rho),
                                             R * std::sin(sig) * std::cos(rho),
                                             R * std::cos(sig)};
                    }
            return g;
        };
        auto coarse = membrane_covariant_residual(build(11, false), mink, 1e-3);
        auto fine = membrane_covariant_residual(build(21, false), mink, 1e-3);
        rep.add_flag("membrane-covariant-residual",
                     "the divergence of the momentum currents vanishes on the pulsating sphere "
                     "under refinement",
                     fine.max_interior < coarse.max_interior / 2.5 && fine.max_interior < 5e-3);
        auto frozen = membrane_covariant_residual(build(21, true), mink, 1e-3);
        rep.add_flag("membrane-covariant-control",
                     "a frozen sphere leaves an order-one divergence residual",
                     frozen.max_interior > 1.0);
    }

    // Spherical reduction: turning point, first integral, closed form, timing.
    {
        double c = 1.7;
        double rturn = std::sqrt(c);
        double rddot = spherical_rhs(rturn, 0.0);
        rep.add("spherical-turning-point", "R_dd at the turning point is -2/sqrt(c) = -2R^3/c^2",
                std::abs(rddot + 2.0 / rturn) + std::abs(rddot + 2.0 * std::pow(rturn, 3) / (c * c)),
                1e-12);

        SphericalRun run = integrate_spherical(1.0, 0.0, 2.0, 1e-4);
        rep.add("spherical-first-integral",
                "R^2/sqrt(1 - R_dot^2) is conserved along the integration (relative)",
                run.max_first_integral_rel_drift, 1e-8);
        rep.add_flag("spherical-collapse-stop", "integration stops cleanly near |R_dot| = 1",
                     run.stopped_near_collapse);

        double worst = 0.0;
        for (const auto& s : run.samples)
            worst = std::max(worst, std::abs(s.r - spherical_closed_form(1.0, s.tau +
                                                                                   spherical_collapse_time(1.0))));
        rep.add("spherical-closed-form",
                "numerical R(tau) matches R_max cn(gamma - sqrt2 tau / R_max | 1/sqrt2)", worst,
                1e-6);

        {
            // analytic-derivative substitution of the cn form into the ODE
            const double rmax = 1.7;
            const double kk = 1.0 / std::numbers::sqrt2;
            const double alpha = std::numbers::sqrt2 / rmax;
            double sub_worst = 0.0;
            for (int t = 0; t < 1000; ++t) {
                double u = rng.uniform(-2.0, 2.0);
                auto jv = jacobi_elliptic(u, kk);
                if (jv.cn < 0.05) continue;
                double r = rmax * jv.cn;
                double rdot = alpha * rmax * jv.sn * jv.dn;
                if (std::abs(rdot) >= 1.0) continue;
                double rddot =
                    -alpha * alpha * rmax * jv.cn * (jv.dn * jv.dn - kk * kk * jv.sn * jv.sn);
                sub_worst = std::max(sub_worst, std::abs(rddot - spherical_rhs(r, rdot)));
            }
            rep.add("spherical-ode-substitution",
                    "the cn closed form satisfies the radial equation (analytic sn dn "
                    "derivatives, 1000 points); alpha R_max = sqrt2",
                    sub_worst, 1e-9);
        }

        rep.add("collapse-time",
                "K(1/sqrt2)/sqrt2 equals the quadrature of dR/sqrt(1-R^4) (about 1.31103)",
                std::abs(spherical_collapse_time(1.0) - spherical_collapse_time_quadrature(1.0)),
                1e-6);

        bool zero_end = true;
        SphericalRun none = integrate_spherical(1.0, 0.0, 0.0, 1e-3);
        zero_end = none.samples.size() == 1;
        rep.add_flag("spherical-zero-span", "tau_end = 0 returns only the initial sample",
                     zero_end);
    }

    // Elliptic kit.
    {
        const double k = 1.0 / std::numbers::sqrt2;
        double K = elliptic_K(k);
        double K_quad;
        {
            // defining integral by composite Simpson, 1024 panels
            int panels = 1024;
            double h = (kPi / 2) / panels;
            auto f = [&](double th) {
                double s = std::sin(th);
                return 1.0 / std::sqrt(1.0 - k * k * s * s);
            };
            double acc = f(0.0) + f(kPi / 2);
            for (int i = 1; i < panels; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
            K_quad = acc * h / 3.0;
        }
        double resid = std::abs(K - K_quad);
        rep.add("elliptic-K-agm-vs-quadrature",
                "AGM value of K(1/sqrt2) matches the defining integral", resid, 1e-9);
        rep.add("elliptic-K-reference", "K(1/sqrt2) = 1.854074677...",
                std::abs(K - 1.854074677), 1e-9);
        rep.add("elliptic-K0", "K(0) = pi/2", std::abs(elliptic_K(0.0) - kPi / 2), 1e-15);
        rep.add("elliptic-cn-quarter-period", "cn(K | k) = 0", std::abs(jacobi_cn(K, k)), 1e-12);

        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            double u = rng.uniform(-3.0, 3.0);
            auto jv = jacobi_elliptic(u, k);
            worst = std::max(worst, std::abs(jv.sn * jv.sn + jv.cn * jv.cn - 1.0));
            worst = std::max(worst,
                             std::abs(jv.dn * jv.dn + k * k * jv.sn * jv.sn - 1.0));
        }
        rep.add("elliptic-pythagorean", "sn^2 + cn^2 = 1 and dn^2 + k^2 sn^2 = 1 at 1000 points",
                worst, 1e-12);
        rep.add("elliptic-cn-origin", "cn(0 | k) = 1", std::abs(jacobi_cn(0.0, k) - 1.0), 1e-15);
    }
}

} // namespace

VerificationReport run_suite(std::uint64_t seed, SuiteMutation mutation) {
    VerificationReport rep;
    rep.title = "built-in verification suite";
    rep.seed = seed;
    Rng rng(seed);

    BoundaryConvention conv;
    if (mutation == SuiteMutation::BoundarySign) conv.ignore_axis_parity = true;

    exterior_checks(rep, rng);
    field_checks(rep, rng);
    forms_checks(rep, rng);
    chain_checks(rep, rng, conv);
    worldline_checks(rep, rng);
    string_checks(rep, rng);
    membrane_checks(rep, rng);
    return rep;
}

} // namespace extcal
