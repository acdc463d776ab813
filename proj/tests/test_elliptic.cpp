#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "extcal/elliptic.hpp"
#include "extcal/report.hpp"

using namespace extcal;

TEST_CASE("complete elliptic integral by AGM") {
    CHECK(elliptic_K(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    double k = 1.0 / std::numbers::sqrt2;
    CHECK(std::abs(elliptic_K(k) - 1.8540746773013719) < 1e-12);
    CHECK_THROWS_AS(elliptic_K(1.0), std::domain_error);
    CHECK_THROWS_AS(elliptic_K(-0.1), std::domain_error);
}

TEST_CASE("K matches the defining integral inverted by quadrature") {
    // int_0^phi dtheta / sqrt(1 - k^2 sin^2 theta) at phi = pi/2, composite Simpson
    double k = 0.6;
    int panels = 2048;
    double h = std::numbers::pi / 2 / panels;
    auto f = [&](double th) {
        double s = std::sin(th);
        return 1.0 / std::sqrt(1.0 - k * k * s * s);
    };
    double acc = f(0.0) + f(std::numbers::pi / 2);
    for (int i = 1; i < panels; ++i) acc += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    acc *= h / 3.0;
    CHECK(std::abs(elliptic_K(k) - acc) < 1e-10);
}

TEST_CASE("jacobi functions: special values and identities") {
    double k = 1.0 / std::numbers::sqrt2;
    double K = elliptic_K(k);
    CHECK(jacobi_cn(0.0, k) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(jacobi_cn(K, k)) < 1e-12);

    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        double u = rng.uniform(-4.0, 4.0);
        auto jv = jacobi_elliptic(u, k);
        CHECK(std::abs(jv.sn * jv.sn + jv.cn * jv.cn - 1.0) < 1e-12);
        CHECK(std::abs(jv.dn * jv.dn + k * k * jv.sn * jv.sn - 1.0) < 1e-12);
        CHECK(std::abs(jv.cn) <= 1.0 + 1e-15);
    }

    // degenerate modulus reduces to circular functions
    auto jv0 = jacobi_elliptic(0.9, 0.0);
    CHECK(jv0.sn == doctest::Approx(std::sin(0.9)));
    CHECK(jv0.cn == doctest::Approx(std::cos(0.9)));
    CHECK(jv0.dn == doctest::Approx(1.0));
}

TEST_CASE("cn inverts its defining integral") {
    // u(phi) = int_0^phi dtheta / sqrt(1 - k^2 sin^2 theta); cn(u) = cos(phi).
    double k = 1.0 / std::numbers::sqrt2;
    for (double phi : {0.3, 0.9, 1.4}) {
        int panels = 2048;
        double h = phi / panels;
        auto f = [&](double th) {
            double s = std::sin(th);
            return 1.0 / std::sqrt(1.0 - k * k * s * s);
        };
        double u = f(0.0) + f(phi);
        for (int i = 1; i < panels; ++i) u += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        u *= h / 3.0;
        CHECK(std::abs(jacobi_cn(u, k) - std::cos(phi)) < 1e-10);
    }
}
