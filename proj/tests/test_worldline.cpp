#include <doctest.h>

#include <cmath>
#include <numbers>

#include "extcal/worldline.hpp"

using namespace extcal;

TEST_CASE("momentum satisfies the mass shell and degree-zero homogeneity") {
    Metric<double> mink = Metric<double>::minkowski(4);
    Vec4 rest{1, 0, 0, 0};
    Vec4 p = momentum(rest, 2.0, mink);
    CHECK(p[0] == doctest::Approx(2.0));
    Vec4 scaled{2, 0, 0, 0};
    Vec4 p2 = momentum(scaled, 2.0, mink);
    for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(p2[i]));

    Vec4 boosted{std::sqrt(2.0), 1, 0, 0};
    Vec4 pb = momentum(boosted, 1.0, mink);
    CHECK(pb[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(pb[1] == doctest::Approx(1.0));

    Vec4 spacelike{0, 1, 0, 0};
    CHECK_THROWS_AS(momentum(spacelike, 1.0, mink), PreconditionError);
}

TEST_CASE("christoffel symbols: constant metrics vanish, polar block matches") {
    MetricField flat = MetricField::constant(Metric<double>::minkowski(4));
    double x[4] = {0, 1, 2, 3};
    auto gamma = christoffel(flat, x);
    for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) CHECK(gamma[b][a][c] == 0.0);

    PolyField r = PolyField::variable(4, 1);
    PolyField one = PolyField::constant(4, Rational(1));
    PolyField zero(4);
    std::vector<std::vector<ScalarField>> comps(4, std::vector<ScalarField>(4, ScalarField(zero)));
    comps[0][0] = ScalarField(one);
    comps[1][1] = ScalarField(-one);
    comps[2][2] = ScalarField(-(r * r));
    comps[3][3] = ScalarField(-one);
    MetricField polar = MetricField::from_components(4, comps);
    double y[4] = {0.0, 2.5, 0.3, 0.0};
    auto g2 = christoffel(polar, y);
    CHECK(g2[1][2][2] == doctest::Approx(-2.5));
    CHECK(g2[2][1][2] == doctest::Approx(1.0 / 2.5));
    CHECK(g2[2][2][1] == doctest::Approx(1.0 / 2.5));
}

TEST_CASE("free particle integrates to a straight line with conserved momentum") {
    ParticleScenario sc;
    sc.mass = 1.5;
    sc.u0 = {std::sqrt(1.25), 0.5, 0, 0};
    sc.step = 1e-3;
    sc.tau_end = 1.0;
    auto traj = integrate_worldline(sc);
    CHECK(traj.samples.size() == 1001);
    const auto& last = traj.samples.back();
    CHECK(last.x[1] == doctest::Approx(0.5 * last.tau).epsilon(1e-12));
    double drift = 0.0;
    for (const auto& s : traj.samples)
        for (int i = 0; i < 4; ++i)
            drift = std::max(drift, std::abs(s.p[i] - traj.samples[0].p[i]));
    CHECK(drift < 1e-10);
    CHECK(traj.max_shell_residual < 1e-10);
}

TEST_CASE("zero-length integration returns only the initial sample") {
    ParticleScenario sc;
    sc.tau_end = 0.0;
    auto traj = integrate_worldline(sc);
    CHECK(traj.samples.size() == 1);
}

TEST_CASE("em field strength and the gyration frequency") {
    const double B = 0.4, q = 1.0, m = 1.0;
    FieldForm a(4, 1);
    a.add_term({2}, ScalarField(Rational(-2, 5) * PolyField::variable(4, 1)));
    FieldForm f = em_field_strength(a);
    CHECK(d(f).is_exact_zero());
    std::vector<double> origin{0, 0, 0, 0};
    CHECK(f.at(origin).get({1, 2}) == doctest::Approx(-B));

    ParticleScenario sc;
    sc.mass = m;
    sc.charge = q;
    sc.potential = a;
    double v = 0.2;
    sc.u0 = {std::sqrt(1 + v * v), v, 0, 0};
    double period = 2 * std::numbers::pi / (q * B / m);
    sc.step = period / 4000;
    sc.tau_end = period;
    auto traj = integrate_worldline(sc);

    double phase = 0.0;
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        const auto& u0 = traj.samples[k - 1].u;
        const auto& u1 = traj.samples[k].u;
        phase += std::atan2(u0[1] * u1[2] - u0[2] * u1[1], u0[1] * u1[1] + u0[2] * u1[2]);
    }
    double omega = std::abs(phase) / sc.tau_end;
    CHECK(std::abs(omega - q * B / m) / (q * B / m) < 1e-6);
    CHECK(traj.max_shell_residual < 1e-8);
}

TEST_CASE("drift abort on absurd steps") {
    FieldForm a(4, 1);
    a.add_term({2}, ScalarField(Rational(-50) * PolyField::variable(4, 1)));
    ParticleScenario sc;
    sc.charge = 5.0;
    sc.potential = a;
    sc.u0 = {std::sqrt(1.49), 0.7, 0, 0};
    sc.step = 0.5;
    sc.tau_end = 10.0;
    CHECK_THROWS_AS(integrate_worldline(sc), NumericalAbort);
}

TEST_CASE("non-timelike initial data is refused") {
    ParticleScenario sc;
    sc.u0 = {0.5, 1.0, 0, 0};
    CHECK_THROWS_AS(integrate_worldline(sc), PreconditionError);
}
